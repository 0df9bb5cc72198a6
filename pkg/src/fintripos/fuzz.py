"""Seeded randomized suites.

Every suite is a list of named checks; each check counts instances, instances
whose hypotheses actually held (``nonvacuous``) and violations, and keeps the
first counterexample.  Identical ``(suite, seed, iters)`` give identical
results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .doctrine import (
    Predicate, check_adjunctions, check_beck_chevalley, check_frobenius, check_power_object,
)
from .finset import FinMap, FinSet, compose, diagonal, product
from .lang.gen import FormulaGen, random_instance, random_world
from .lang.interp import Evaluator
from .lang.printer import print_formula, print_judgment
from .lang.rules import ALL_RULES, FIRST_ORDER_RULES, PULLBACK_RULE, REGULAR_RULES, evaluate_rule, shape
from .lang.subst import fresh_name, substitute
from .order import distributive_lattices
from .percat import (
    PerMorphism, PerObject, compose_per, composition_replay, enumerate_funrels, enumerate_morphisms,
    enumerate_pers, is_compat, is_fibration, is_trivial_fibration, is_weak_equivalence, path_object,
    per_pullback, span_equation_holds, span_factorization, terminal_projection,
)

DEFAULT_SEED = 20240601
MODELS_PER_INSTANCE = 10


@dataclass
class Check:
    anchor: str
    instances: int = 0
    nonvacuous: int = 0
    violations: int = 0
    counterexample: dict | None = None

    def record(self, ok: bool, nonvacuous: bool = True, witness=None, n: int = 1, nv: int | None = None, bad: int | None = None):
        self.instances += n
        self.nonvacuous += (n if nonvacuous else 0) if nv is None else nv
        v = (0 if ok else n) if bad is None else bad
        self.violations += v
        if v and self.counterexample is None:
            self.counterexample = witness() if callable(witness) else witness

    def as_dict(self) -> dict:
        return {
            "anchor": self.anchor,
            "instances": self.instances,
            "nonvacuous": self.nonvacuous,
            "violations": self.violations,
            "counterexample": self.counterexample,
        }


@dataclass
class SuiteResult:
    suite: str
    seed: int
    iters: int
    checks: list = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(c.violations for c in self.checks)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "iters": self.iters,
            "violations": self.violations,
            "checks": [c.as_dict() for c in self.checks],
        }


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, stream]))


# -- soundness of the inference rules ----------------------------------------------


def rule_anchor(rule: str) -> str:
    if rule in REGULAR_RULES:
        return f"regular-logic rule {rule}"
    if rule in FIRST_ORDER_RULES:
        return f"first-order rule {rule}"
    return "pullback rule: reindexing a judgment along a pullback square"


def soundness(seed: int = DEFAULT_SEED, iters: int = 10_000, rules=ALL_RULES) -> SuiteResult:
    """``iters`` (instance, model) pairs per rule: ``iters / 10`` syntactic
    instances, each checked in a batch of 10 random models."""
    res = SuiteResult("soundness", seed, iters)
    for k, rule in enumerate(rules):
        rng = _rng(seed, k)
        chk = Check(rule_anchor(rule))
        while chk.instances < iters:
            batch = min(MODELS_PER_INSTANCE, iters - chk.instances)
            regular = rng.random() < 0.4 and rule not in FIRST_ORDER_RULES
            w = random_world(rng, batch, regular, with_square=(rule == PULLBACK_RULE))
            inst = random_instance(rule, FormulaGen(rng, w))
            if inst is None:
                continue
            out = evaluate_rule(rule, inst, Evaluator(w.model))

            def witness(inst=inst, out=out, w=w):
                sh = shape(rule, inst)
                return {
                    "rule": rule,
                    "frame": w.frame.id,
                    "model": int(np.flatnonzero(~out.sound)[0]),
                    "conclusion": print_judgment(sh.conclusion),
                }

            chk.record(out.violations == 0, witness=witness, n=batch, nv=out.nonvacuous, bad=out.violations)
        res.checks.append(chk)
    return res


# -- substitution and weakening -------------------------------------------------------


def lemmas(seed: int = DEFAULT_SEED, iters: int = 1000) -> SuiteResult:
    """Semantic substitution and weakening on random formulas (batched models)."""
    res = SuiteResult("lemmas", seed, iters)
    sub = Check("substitution: ⟦φ[t/x]⟧ is ⟦φ⟧ reindexed along (id, ⟦t⟧)")
    weak = Check("weakening: ⟦φ⟧ in an extended context is ⟦φ⟧ reindexed along the projection")
    rng = _rng(seed, 0)
    while sub.instances < iters or weak.instances < iters:
        w = random_world(rng, MODELS_PER_INSTANCE, rng.random() < 0.4)
        g = FormulaGen(rng, w)
        ctx = g.context()
        env = dict(ctx)
        if not ctx:
            continue
        ev = Evaluator(w.model)
        # substitution for the last variable
        x, s = ctx[-1]
        base = ctx[:-1]
        t = g.term(dict(base), s)
        phi = g.formula(env)
        if t is not None and sub.instances < iters:
            lhs = np.broadcast_to(ev.formula(base, substitute(phi, x, t)), (w.model.batch, ev.size(base)))
            full = np.broadcast_to(ev.formula(ctx, phi), (w.model.batch, ev.size(ctx)))
            tv = np.broadcast_to(ev.term(base, t), (w.model.batch, ev.size(base)))
            ns = w.sort_sizes[s]
            idx = np.arange(ev.size(base))[None, :] * ns + tv
            rhs = np.take_along_axis(full, idx, axis=1) if ev.size(base) else lhs
            ok = bool(np.array_equal(lhs, rhs))
            sub.record(ok, witness=lambda: {"formula": print_formula(phi), "var": x})
        if weak.instances < iters:
            y = fresh_name({v for v, _ in ctx}, "y")
            sy = g.choice(sorted(w.sort_sizes))
            ext = ctx + ((y, sy),)
            a = np.broadcast_to(ev.formula(ctx, phi), (w.model.batch, ev.size(ctx)))
            b = np.broadcast_to(ev.formula(ext, phi), (w.model.batch, ev.size(ext)))
            expect = np.repeat(a, w.sort_sizes[sy], axis=1)
            ok = bool(np.array_equal(b, expect))
            weak.record(ok, witness=lambda: {"formula": print_formula(phi), "added": y})
    res.checks += [sub, weak]
    return res


# -- doctrine axioms ------------------------------------------------------------------


def _random_set(rng, id: str, max_size: int = 4) -> FinSet:
    return FinSet(id, range(int(rng.integers(0, max_size + 1))))


def _random_map(rng, A: FinSet, B: FinSet) -> FinMap | None:
    if len(B) == 0 and len(A) > 0:
        return None
    return FinMap(A, B, rng.integers(0, max(len(B), 1), size=len(A)))


def _random_pred(rng, A: FinSet, frame) -> Predicate:
    return Predicate(A, frame, rng.integers(0, frame.n, size=len(A)))


def doctrine(seed: int = DEFAULT_SEED, iters: int = 10_000) -> SuiteResult:
    res = SuiteResult("doctrine", seed, iters)
    fr_chk = Check("(Fr) Frobenius reciprocity: ∃f φ ∧ ψ = ∃f(φ ∧ f*ψ)")
    bc_chk = Check("(BC) Beck-Chevalley: ∃k h* = g* ∃f on pullback squares")
    adj_chk = Check("adjunctions ∃f ⊣ f* ⊣ ∀f")
    po_chk = Check("(PO) power objects: (J x ⌜φ⌝)*ε = φ")
    rng = _rng(seed, 0)
    frames = [f for f in distributive_lattices(6) if f.n > 1]
    small = [f for f in frames if f.n <= 5]
    while fr_chk.instances < iters:
        frame = frames[int(rng.integers(len(frames)))]
        A, B, C = (_random_set(rng, n) for n in "ABC")
        f = _random_map(rng, A, C)
        g = _random_map(rng, B, C)
        if f is None or g is None:
            continue
        phi, psi = _random_pred(rng, A, frame), _random_pred(rng, C, frame)
        wit = lambda: {"frame": frame.id, "f": f.table.tolist(), "phi": phi.values.tolist()}
        fr_chk.record(check_frobenius(f, phi, psi), witness=wit)
        bc_chk.record(check_beck_chevalley(f, g, phi), witness=wit)
        adj_chk.record(check_adjunctions(f, phi, psi), witness=wit)
        if po_chk.instances < max(iters // 10, 1):
            I, J = (FinSet(n, range(int(rng.integers(0, 4)))) for n in "IJ")
            pred = _random_pred(rng, product(I, J).apex, small[int(rng.integers(len(small)))])
            po_chk.record(check_power_object(pred, I, J), witness=lambda: {"values": pred.values.tolist()})
    res.checks += [fr_chk, bc_chk, adj_chk, po_chk]
    return res


# -- category of fibrant objects ------------------------------------------------------


@lru_cache(maxsize=None)
def _pers(n: int, frame) -> tuple:
    return tuple(enumerate_pers(FinSet("A" if n else "E", [f"e{i}" for i in range(n)]), frame))


class _Objects:
    def __init__(self, rng, max_frame: int = 4, max_carrier: int = 3):
        self.rng = rng
        self.frames = [f for f in distributive_lattices(max_frame) if f.n > 1]
        self.max_carrier = max_carrier

    def frame(self):
        return self.frames[int(self.rng.integers(len(self.frames)))]

    def obj(self, frame, n: int | None = None) -> PerObject:
        if n is None:
            n = int(self.rng.choice([0, 1, 2, 3][: self.max_carrier + 1], p=_sizes_p(self.max_carrier)))
        pool = _pers(n, frame)
        return pool[int(self.rng.integers(len(pool)))]

    def morphism(self, X: PerObject, Y: PerObject, pred=None) -> PerMorphism | None:
        ms = enumerate_morphisms(X, Y)
        if pred is not None:
            ms = [m for m in ms if pred(m)]
        if not ms:
            return None
        return ms[int(self.rng.integers(len(ms)))]


def _sizes_p(k: int):
    p = [0.05, 0.3, 0.35, 0.3][: k + 1]
    s = sum(p)
    return [x / s for x in p]


def _mtab(m: PerMorphism) -> dict:
    return {
        "src": m.src.matrix().tolist(), "dst": m.dst.matrix().tolist(),
        "map": m.map.table.tolist(), "frame": m.src.frame.id,
    }


def _is_iso(f: PerMorphism) -> bool:
    if not (f.map.is_injective() and f.map.is_surjective()):
        return False
    inv = np.empty_like(f.map.table)
    inv[f.map.table] = np.arange(len(f.map.table))
    return is_compat(f.dst, f.src, FinMap(f.dst.carrier, f.src.carrier, inv)).ok


def cfo(seed: int = DEFAULT_SEED, iters: int = 1000) -> SuiteResult:
    res = SuiteResult("cfo", seed, iters)
    a = Check("(A) weak equivalences satisfy 2-out-of-3 and contain the isomorphisms")
    b = Check("(B) fibrations are closed under composition")
    c = Check("(C) fibrations and trivial fibrations are stable under pullback")
    d = Check("(D) path objects factor the diagonal as a weak equivalence then a fibration")
    e = Check("(E) terminal projections are fibrations")
    rng = _rng(seed, 0)
    src = _Objects(rng)

    while a.instances < iters:
        fr = src.frame()
        X, Y, Z = src.obj(fr), src.obj(fr), src.obj(fr)
        f, g = src.morphism(X, Y), src.morphism(Y, Z)
        if f is None or g is None:
            continue
        gf = compose_per(g, f)
        wf, wg, wgf = (is_weak_equivalence(m).ok for m in (f, g, gf))
        two = (wf + wg + wgf) >= 2
        iso_ok = all(is_trivial_fibration(m).ok for m in (f, g) if _is_iso(m))
        a.record((not two or (wf and wg and wgf)) and iso_ok, nonvacuous=two,
                 witness=lambda: {"f": _mtab(f), "g": _mtab(g)})

    while b.instances < iters:
        fr = src.frame()
        X, Y, Z = src.obj(fr), src.obj(fr), src.obj(fr)
        f = src.morphism(X, Y, lambda m: is_fibration(m).ok)
        g = src.morphism(Y, Z, lambda m: is_fibration(m).ok)
        if f is None or g is None:
            continue
        b.record(is_fibration(compose_per(g, f)).ok, witness=lambda: {"f": _mtab(f), "g": _mtab(g)})

    while c.instances < iters:
        fr = src.frame()
        X, Y, Z = src.obj(fr), src.obj(fr), src.obj(fr)
        f = src.morphism(X, Z, lambda m: is_fibration(m).ok)
        g = src.morphism(Y, Z)
        if f is None or g is None:
            continue
        cone = per_pullback(f, g)
        k = cone.legs[1]  # pullback of f along g
        ok = is_fibration(k).ok
        if is_trivial_fibration(f).ok:
            ok = ok and is_trivial_fibration(k).ok
        c.record(ok, witness=lambda: {"f": _mtab(f), "g": _mtab(g)})

    while d.instances < iters:
        fr = src.frame()
        X = src.obj(fr)
        po = path_object(X)
        diag = compose(po.fibration.map, po.section.map)
        ok = (
            is_weak_equivalence(po.section).ok and is_fibration(po.fibration).ok
            and diag == diagonal(X.carrier)
        )
        d.record(ok, witness=lambda: {"X": X.matrix().tolist(), "frame": fr.id})

    while e.instances < iters:
        fr = src.frame()
        X = src.obj(fr)
        e.record(is_fibration(terminal_projection(X)).ok, witness=lambda: {"X": X.matrix().tolist()})

    res.checks += [a, b, c, d, e]
    return res


# -- localization -----------------------------------------------------------------------


def localization(seed: int = DEFAULT_SEED, iters: int = 1000) -> SuiteResult:
    """Span factorization equation and the composition diagram on random funrel pairs."""
    res = SuiteResult("localization", seed, iters)
    eq = Check("span factorization: φ ∘ E(φ_l) = E(φ_r) with φ_l a trivial fibration")
    comp = Check("composition via spans agrees with relational composition")
    rng = _rng(seed, 0)
    src = _Objects(rng, max_frame=4, max_carrier=2)
    while comp.instances < iters:
        fr = src.frame()
        X, Y, Z = src.obj(fr), src.obj(fr), src.obj(fr)
        fs, gs = enumerate_funrels(X, Y), enumerate_funrels(Y, Z)
        if not fs or not gs:
            continue
        phi = fs[int(rng.integers(len(fs)))]
        gamma = gs[int(rng.integers(len(gs)))]
        sp = span_factorization(phi)
        ok = span_equation_holds(phi, sp) and is_trivial_fibration(sp.left).ok
        eq.record(ok, witness=lambda: {"phi": phi.matrix().tolist(), "frame": fr.id})
        r = composition_replay(phi, gamma)
        comp.record(r.ok, witness=lambda: {
            "phi": phi.matrix().tolist(), "gamma": gamma.matrix().tolist(), "frame": fr.id,
            "replay": {k: bool(v) for k, v in vars(r).items()},
        })
    res.checks += [eq, comp]
    return res


SUITES = {
    "soundness": soundness,
    "lemmas": lemmas,
    "doctrine": doctrine,
    "cfo": cfo,
    "localization": localization,
}


def run_suite(name: str, seed: int = DEFAULT_SEED, iters: int | None = None) -> SuiteResult:
    fn = SUITES[name]
    return fn(seed) if iters is None else fn(seed, iters)
