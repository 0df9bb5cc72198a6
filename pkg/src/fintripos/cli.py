"""Command-line front door.

Every command builds a :class:`Report`; ``emit`` renders it as text or JSON.
Exit codes: 0 success (the property holds), 1 the property fails (a
counterexample is included), 2 usage, load or budget error.
"""

from __future__ import annotations

import argparse
import json
from importlib import resources
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .derive import (
    LEFT,
    RIGHT,
    CartesianTransform,
    left_derived,
    right_derived,
    worked_example,
)
from .doctrine import check_completion_universal_property, exists_completion, is_exists_prime
from .errors import FinTriposError, LangError, LoadError
from .finset import format_label
from .fuzz import DEFAULT_SEED, SUITES, run_suite
from .io import format_predicate, load_framemap, load_workspace
from .lang.interp import Evaluator, Model, check_judgment
from .lang.parser import parse_judgment
from .order import join_primes, map_class
from .percat import (
    HOM_BUDGET,
    enumerate_funrels,
    enumerate_morphisms,
    funrel_search_size,
    homotopic,
    is_compat,
    is_fibration,
    is_per,
    is_trivial_fibration,
    is_weak_equivalence,
)

OK, FAILS, ERROR = 0, 1, 2
OUTCOMES = {OK: "ok", FAILS: "fails", ERROR: "error"}


@dataclass
class Report:
    command: list
    exit_code: int = OK
    seed: int | None = None
    results: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)
    timings: dict | None = None
    error: str | None = None
    format: str = "text"

    @property
    def outcome(self) -> str:
        return OUTCOMES[self.exit_code]

    def as_dict(self) -> dict:
        d = {
            "command": list(self.command),
            "outcome": self.outcome,
            "exit_code": self.exit_code,
            "seed": self.seed,
            "results": self.results,
            "counterexamples": self.counterexamples,
        }
        if self.error is not None:
            d["error"] = self.error
        if self.timings is not None:
            d["timings"] = self.timings
        return d


def report_schema() -> dict:
    """The JSON schema every ``--format json`` report validates against."""
    return json.loads(resources.files(__package__).joinpath("schema/report.json").read_text(encoding="utf-8"))


def _text_lines(key: str, value, indent: int = 0) -> list[str]:
    pad = "  " * indent
    if isinstance(value, dict):
        out = [f"{pad}{key}:"]
        for k, v in value.items():
            out += _text_lines(str(k), v, indent + 1)
        return out
    if isinstance(value, list) and value and isinstance(value[0], dict):
        out = [f"{pad}{key}:"]
        for i, v in enumerate(value):
            out += _text_lines(f"[{i}]", v, indent + 1)
        return out
    return [f"{pad}{key}: {json.dumps(value, ensure_ascii=False)}"]


def emit(report: Report, fmt: str = "text") -> bytes:
    d = report.as_dict()
    if fmt == "json":
        return (json.dumps(d, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    lines = [f"$ fintripos {' '.join(d['command'])}", f"outcome: {d['outcome']} (exit {d['exit_code']})"]
    if d["seed"] is not None:
        lines.append(f"seed: {d['seed']}")
    if "error" in d:
        lines.append(f"error: {d['error']}")
    for k, v in d["results"].items():
        lines += _text_lines(k, v)
    if d["counterexamples"]:
        lines += _text_lines("counterexamples", d["counterexamples"])
    if "timings" in d:
        lines += _text_lines("timings", d["timings"])
    return ("\n".join(lines) + "\n").encode("utf-8")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _label(x):
    return format_label(x) if x is not None else None


# -- commands --------------------------------------------------------------------


def cmd_check_judgment(args, rep: Report):
    ws = load_workspace(args.manifest)
    sig = ws.signature()
    path = Path(args.judgments)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise LoadError(f"cannot read judgments: {e.strerror}", str(path)) from None
    ev = Evaluator(Model.from_signature(sig))
    checked = []
    for n, raw in enumerate(lines, 1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            j = parse_judgment(text, sig)
        except LangError as e:
            raise LoadError(str(e), str(path), n) from None
        res = check_judgment(sig, j, ev)
        checked.append({"line": n, "judgment": text, "holds": res.holds})
        if not res.holds:
            rep.counterexamples.append({
                "line": n, "judgment": text, "element": _label(res.witness),
                "premises": res.lhs, "conclusion": res.rhs,
            })
    rep.results["frame"] = sig.frame.id
    rep.results["judgments"] = checked
    rep.results["holding"] = sum(c["holds"] for c in checked)
    rep.exit_code = OK if all(c["holds"] for c in checked) else FAILS


def _lookup(table: dict, key: str, kind: str):
    if key not in table:
        raise LoadError(f"no {kind} with id {key!r}")
    return table[key]


def _verdict(v) -> dict:
    return {"ok": v.ok, "failed": v.failed}


def _verdict_cex(v, what: str) -> dict:
    return {"object": what, "axiom": v.failed, "judgment": v.judgment, "element": _label(v.witness)}


def cmd_per_check(args, rep: Report):
    ws = load_workspace(args.manifest)
    X = _lookup(ws.pers, args.per, "per")
    v = is_per(X.carrier, X.rel)
    rep.results["per"] = args.per
    rep.results["carrier"] = len(X.carrier)
    rep.results["frame"] = X.frame.id
    rep.results["is_per"] = v.ok
    if v.ok:
        rep.results["support"] = format_predicate(X.support)
    else:
        rep.counterexamples.append(_verdict_cex(v, args.per))
    rep.exit_code = OK if v.ok else FAILS


def cmd_per_hom_count(args, rep: Report):
    ws = load_workspace(args.manifest)
    X = _lookup(ws.pers, args.src, "per")
    Y = _lookup(ws.pers, args.dst, "per")
    for Z in (X, Y):
        v = is_per(Z.carrier, Z.rel)
        if not v.ok:
            rep.counterexamples.append(_verdict_cex(v, Z.name))
    if rep.counterexamples:
        rep.exit_code = FAILS
        return
    maps = enumerate_morphisms(X, Y)
    classes: list = []
    for m in maps:
        if not any(homotopic(c, m) for c in classes):
            classes.append(m)
    rep.results["source"] = args.src
    rep.results["target"] = args.dst
    rep.results["morphisms"] = len(maps)
    rep.results["homotopy_classes"] = len(classes)
    rep.results["funrel_search_size"] = funrel_search_size(X, Y)
    rep.results["functional_relations"] = len(enumerate_funrels(X, Y, budget=args.budget))


def cmd_fib_check(args, rep: Report):
    ws = load_workspace(args.manifest)
    f = _lookup(ws.morphisms, args.morphism, "morphism")
    for Z in (f.src, f.dst):
        v = is_per(Z.carrier, Z.rel)
        if not v.ok:
            rep.counterexamples.append(_verdict_cex(v, Z.name))
    if rep.counterexamples:
        rep.exit_code = FAILS
        return
    compat = is_compat(f.src, f.dst, f.map)
    if not compat.ok:
        rep.counterexamples.append(_verdict_cex(compat, args.morphism))
        rep.exit_code = FAILS
        return
    fib = is_fibration(f)
    rep.results["morphism"] = args.morphism
    rep.results["fibration"] = _verdict(fib)
    rep.results["weak_equivalence"] = _verdict(is_weak_equivalence(f))
    rep.results["trivial_fibration"] = _verdict(is_trivial_fibration(f))
    if not fib.ok:
        rep.counterexamples.append(_verdict_cex(fib, args.morphism))
    rep.exit_code = OK if fib.ok else FAILS


def cmd_fuzz(args, rep: Report):
    rep.seed = args.seed
    names = list(SUITES) if args.suite == "all" else [args.suite]
    suites = []
    for name in names:
        t = time.perf_counter()
        res = run_suite(name, args.seed, args.iters)
        if rep.timings is not None:
            rep.timings[name] = round(time.perf_counter() - t, 3)
        d = res.as_dict()
        suites.append(d)
        for c in d["checks"]:
            if c["counterexample"] is not None:
                rep.counterexamples.append({"suite": name, "anchor": c["anchor"], "counterexample": c["counterexample"]})
    rep.results["suites"] = suites
    rep.results["violations"] = sum(s["violations"] for s in suites)
    rep.exit_code = OK if rep.results["violations"] == 0 else FAILS


def cmd_complete(args, rep: Report):
    ws = load_workspace(args.manifest)
    P = _lookup(ws.posets, args.poset, "poset")
    _, emb = exists_completion(P)
    L = emb.cod
    rep.results["poset"] = P.id
    rep.results["completion"] = {
        "elements": list(L.elements),
        "join_primes": [L.elements[i] for i in join_primes(L)],
        "embedding": {p: emb(p) for p in P.elements},
    }
    if args.against:
        try:
            A = ws.resolve_frame(args.against)
        except KeyError:
            raise LoadError(f"unknown frame {args.against!r}") from None
        up = check_completion_universal_property(P, A)
        rep.results["universal_property"] = {
            "frame": A.id, "frame_morphisms": up.frame_morphisms, "flat_maps": up.flat_maps,
            "bijective": up.bijective, "order_isomorphism": up.order_isomorphism,
        }
        if not up.ok:
            rep.counterexamples.append({"frame": A.id, "bijective": up.bijective})
            rep.exit_code = FAILS


def cmd_prime(args, rep: Report):
    ws = load_workspace(args.manifest)
    phi = _lookup(ws.preds, args.pred, "pred")
    v = is_exists_prime(phi, args.bound)
    rep.results["pred"] = args.pred
    rep.results["status"] = v.status.value
    rep.results["bound"] = v.bound
    if v.counterexample is not None:
        c = v.counterexample
        rep.counterexamples.append({
            "u": [_label(phi.carrier.elements[i]) for i in c.u],
            "v": list(c.v),
            "psi": [phi.frame.elements[k] for k in c.psi],
        })
    rep.exit_code = OK if v else FAILS


def cmd_derive(args, rep: Report):
    src = load_workspace(args.source)
    dst = load_workspace(args.target)
    X = _lookup(src.pers, args.object, "per")
    v = is_per(X.carrier, X.rel)
    if not v.ok:
        rep.counterexamples.append(_verdict_cex(v, args.object))
        rep.exit_code = FAILS
        return
    fmap = load_framemap(args.map, X.frame, dst.frame)
    phi = CartesianTransform(fmap)
    F = left_derived(phi) if args.side == LEFT else right_derived(phi, src.mode, args.force)
    t = time.perf_counter()
    count = F.class_count(X)
    if rep.timings is not None:
        rep.timings["class_count"] = round(time.perf_counter() - t, 3)
    rep.results["side"] = args.side
    rep.results["object"] = args.object
    rep.results["transform"] = map_class(fmap)
    rep.results["source_frame"] = X.frame.id
    rep.results["target_frame"] = dst.frame.id
    rep.results["class_count"] = count


def _int_list(values) -> list[int]:
    out = []
    for v in values or ():
        out += [int(s) for s in v.split(",") if s.strip()]
    return out


def cmd_example(args, rep: Report):
    t = time.perf_counter()
    w = worked_example(args.a, args.b, args.c, _int_list(args.alpha), _int_list(args.beta), force=args.force)
    if rep.timings is not None:
        rep.timings["worked_example"] = round(time.perf_counter() - t, 3)
    rep.results["example"] = "derived-functors"
    rep.results["sizes"] = {"A": args.a, "B": args.b, "C": args.c}
    rep.results["alpha"] = list(w.alpha)
    rep.results["beta"] = list(w.beta)
    rep.results["pairing_injective"] = w.injective
    rep.results["transform"] = w.transform_class
    rep.results["carrier"] = w.carrier_size
    rep.results["power_names"] = w.names
    rep.results["supported_names"] = w.supported_names
    rep.results["section_oracle"] = dict(w.oracle)
    rep.results["encoding_ok"] = w.encoding_ok
    rep.results["derived"] = [
        {"side": LEFT, "object": "span", "class_count": w.left_count, "verified": w.left_verified},
        {"side": RIGHT, "object": "span", "class_count": w.right_count, "verified": True,
         "keyed_cross_check": w.right_count_keyed},
    ]
    if not w.ok:
        rep.counterexamples.append({"left": w.left_count, "right": w.right_count, "oracle": dict(w.oracle)})
        rep.exit_code = FAILS


# -- argument parsing -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument("--timings", action="store_true", default=argparse.SUPPRESS)

    p = _Parser(prog="fintripos", description="Finite regular hyperdoctrines and triposes.", parents=[common])
    p.add_argument("--version", action="version", version=f"fintripos {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("check-judgment", parents=[common], help="decide judgments against a workspace")
    s.add_argument("manifest")
    s.add_argument("judgments")
    s.set_defaults(fn=cmd_check_judgment)

    per = sub.add_parser("per", parents=[common], help="partial equivalence relations")
    psub = per.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    s = psub.add_parser("check", parents=[common])
    s.add_argument("manifest")
    s.add_argument("per")
    s.set_defaults(fn=cmd_per_check)
    s = psub.add_parser("hom-count", parents=[common])
    s.add_argument("manifest")
    s.add_argument("src")
    s.add_argument("dst")
    s.add_argument("--budget", type=int, default=HOM_BUDGET)
    s.set_defaults(fn=cmd_per_hom_count)

    fib = sub.add_parser("fib", parents=[common], help="fibrations and weak equivalences")
    fsub = fib.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    s = fsub.add_parser("check", parents=[common])
    s.add_argument("manifest")
    s.add_argument("morphism")
    s.set_defaults(fn=cmd_fib_check)

    s = sub.add_parser("fuzz", parents=[common], help="seeded randomized property suites")
    s.add_argument("--suite", choices=(*SUITES, "all"), required=True)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--iters", type=int, default=None)
    s.set_defaults(fn=cmd_fuzz)

    s = sub.add_parser("complete", parents=[common], help="existential completion of a poset")
    s.add_argument("manifest")
    s.add_argument("poset")
    s.add_argument("--against", metavar="FRAME", help="check the universal property against this frame")
    s.set_defaults(fn=cmd_complete)

    s = sub.add_parser("prime", parents=[common], help="existential primality of a predicate")
    s.add_argument("manifest")
    s.add_argument("pred")
    s.add_argument("--bound", type=int, default=None)
    s.set_defaults(fn=cmd_prime)

    s = sub.add_parser("derive", parents=[common], help="derived functor class counts")
    s.add_argument("--side", choices=(LEFT, RIGHT), required=True)
    s.add_argument("--source", required=True, help="manifest of the source doctrine")
    s.add_argument("--target", required=True, help="manifest of the target doctrine")
    s.add_argument("--map", required=True, help="file holding one framemap block")
    s.add_argument("--object", required=True, help="per id in the source workspace")
    s.add_argument("--force", action="store_true")
    s.set_defaults(fn=cmd_derive)

    ex = sub.add_parser("example", parents=[common], help="built-in worked examples")
    esub = ex.add_subparsers(dest="name", required=True, parser_class=_Parser)
    s = esub.add_parser("derived-functors", parents=[common])
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--b", type=int, required=True)
    s.add_argument("--c", type=int, required=True)
    s.add_argument("--alpha", nargs="*", default=[], help="images of C in A, comma or space separated")
    s.add_argument("--beta", nargs="*", default=[], help="images of C in B, comma or space separated")
    s.add_argument("--force", action="store_true")
    s.set_defaults(fn=cmd_example)
    return p


def run(argv) -> tuple[int, Report]:
    argv = list(argv)
    rep = Report(argv)
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as e:
        rep.exit_code, rep.error = ERROR, f"usage: {e}"
        return ERROR, rep
    rep.format = getattr(args, "format", "text")
    if getattr(args, "timings", False):
        rep.timings = {}
    t = time.perf_counter()
    try:
        args.fn(args, rep)
    except (FinTriposError, LangError, ValueError) as e:
        rep.exit_code, rep.error = ERROR, f"{type(e).__name__}: {e}"
    if rep.timings is not None:
        rep.timings["total"] = round(time.perf_counter() - t, 3)
    return rep.exit_code, rep


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, rep = run(argv)
    sys.stdout.buffer.write(emit(rep, rep.format))
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
