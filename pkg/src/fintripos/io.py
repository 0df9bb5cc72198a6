"""Line-based file formats and workspaces.

A file holds one or more blocks, each opened by a keyword line::

    set A
    elements a0 a1
    map f : A -> B
    a0 |-> b0
    poset V
    elements l top r
    le l top
    pred p on A*A in low(V)
    (a0,a1) |-> {l,r}
    per X carrier A rel p
    morphism m : X -> Y via f
    framemap phi : low(V) -> 2
    {l,r} |-> 1

A manifest starts with ``workspace [name]``, may set ``mode regular|tripos``
and ``frame <frameid>``, and lists ``include <path>`` lines (relative to the
manifest).  Frame ids are ``low(<posetid>)``, a loaded poset that is itself a
frame, ``2`` or ``chain<n>``.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .doctrine import REGULAR, TRIPOS, Predicate
from .errors import FinTriposError, LoadError
from .finset import FinMap, FinSet, format_label, parse_label, product_n
from .lang.signature import Signature
from .order import FinFrame, FinPoset, MonotoneMap, chain, frame_from_poset, lower_sets, two_chain, validate
from .percat import PerMorphism, PerObject

KEYWORDS = ("set", "map", "poset", "pred", "per", "morphism", "framemap")
ARROW = "|->"


@dataclass
class Block:
    kind: str
    header: str
    path: str
    line: int
    body: list = field(default_factory=list)  # (line number, text)


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def read_blocks(path: str | Path) -> list[Block]:
    path = str(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise LoadError(f"cannot read file: {e.strerror}", path) from None
    blocks: list[Block] = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        word = line.split(None, 1)[0]
        if word in KEYWORDS:
            blocks.append(Block(word, line, path, n))
        elif not blocks:
            raise LoadError(f"expected one of {', '.join(KEYWORDS)}, got {word!r}", path, n)
        else:
            blocks[-1].body.append((n, line))
    return blocks


def _mapping_lines(block: Block) -> list[tuple[int, str, str]]:
    out = []
    for n, line in block.body:
        if ARROW not in line:
            raise LoadError(f"expected '<label> {ARROW} <label>'", block.path, n)
        lhs, rhs = (s.strip() for s in line.split(ARROW, 1))
        if not lhs or not rhs:
            raise LoadError(f"empty side in '{line}'", block.path, n)
        out.append((n, lhs, rhs))
    return out


def frame_element(frame: FinFrame, text: str) -> int:
    """Index of a frame element; lower sets may list their members in any order."""
    masks = getattr(frame, "masks", None)
    if masks is not None and text.startswith("{") and text.endswith("}"):
        members = [s.strip() for s in text[1:-1].split(",") if s.strip()]
        base = frame.base_poset
        mask = 0
        for m in members:
            if m not in base.elements:
                raise KeyError(m)
            mask |= 1 << base.elements.index(m)
        return masks.index(mask)
    return frame.index(text)


@dataclass
class Workspace:
    """One doctrine instance: a frame, a mode, and named data over it."""

    path: str
    name: str = ""
    mode: str = TRIPOS
    frame_id: str | None = None
    sets: dict = field(default_factory=dict)
    posets: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    preds: dict = field(default_factory=dict)
    pred_args: dict = field(default_factory=dict)
    pers: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    framemaps: dict = field(default_factory=dict)
    _frames: dict = field(default_factory=dict)

    # -- resolution helpers ----------------------------------------------------

    def resolve_frame(self, fid: str) -> FinFrame:
        if fid in self._frames:
            return self._frames[fid]
        m = re.fullmatch(r"low\((.+)\)", fid)
        if m:
            P = self.posets.get(m.group(1))
            if P is None:
                raise KeyError(m.group(1))
            frame, _ = lower_sets(P)
        elif fid in self.posets:
            frame = frame_from_poset(self.posets[fid])
        elif fid == "2":
            frame = two_chain()
        elif re.fullmatch(r"chain[1-9][0-9]*", fid):
            frame = chain(int(fid[5:]))
        else:
            raise KeyError(fid)
        self._frames[fid] = frame
        return frame

    def set_expr(self, text: str) -> tuple[tuple[str, ...], FinSet]:
        parts = tuple(p.strip() for p in text.split("*"))
        for p in parts:
            if p not in self.sets:
                raise KeyError(p)
        return parts, product_n([self.sets[p] for p in parts])

    @property
    def frame(self) -> FinFrame:
        """The workspace frame: the ``frame`` directive, else the one all predicates share."""
        if self.frame_id is not None:
            return self.resolve_frame(self.frame_id)
        frames = {p.frame for p in self.preds.values()}
        if len(frames) == 1:
            return frames.pop()
        if not frames:
            return two_chain()
        raise LoadError("predicates use several frames; add a 'frame' line to the manifest", self.path)

    def signature(self) -> Signature:
        """Sorts are the sets, relation symbols the predicates, function symbols the maps."""
        sig = Signature(self.frame, self.mode)
        for sid, s in self.sets.items():
            sig.add_sort(sid, s)
        for mid, (args, res, fmap) in self.maps.items():
            sig.add_function(mid, args, res, fmap)
        for pid, pred in self.preds.items():
            if pred.frame == sig.frame:
                sig.add_relation(pid, self.pred_args[pid], pred)
        return sig


def load_workspace(manifest: str | Path) -> Workspace:
    manifest = Path(manifest)
    mpath = str(manifest)
    try:
        lines = manifest.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise LoadError(f"cannot read manifest: {e.strerror}", mpath) from None
    ws = Workspace(mpath)
    includes = []
    seen_header = False
    for n, raw in enumerate(lines, 1):
        line = _strip(raw)
        if not line:
            continue
        words = line.split()
        if not seen_header:
            if words[0] != "workspace":
                raise LoadError("manifest must start with a 'workspace' line", mpath, n)
            ws.name = " ".join(words[1:])
            seen_header = True
        elif words[0] == "mode" and len(words) == 2 and words[1] in (REGULAR, TRIPOS):
            ws.mode = words[1]
        elif words[0] == "frame" and len(words) == 2:
            ws.frame_id = words[1]
        elif words[0] == "include" and len(words) == 2:
            includes.append((n, manifest.parent / words[1]))
        else:
            raise LoadError(f"unrecognized manifest line {line!r}", mpath, n)
    if not seen_header:
        raise LoadError("empty manifest", mpath)
    blocks = []
    for n, p in includes:
        if not p.exists():
            raise LoadError(f"included file {str(p)!r} not found", mpath, n)
        blocks.extend(read_blocks(p))
    _resolve(ws, blocks)
    if ws.frame_id is not None:
        try:
            ws.resolve_frame(ws.frame_id)
        except KeyError:
            raise LoadError(f"unknown frame {ws.frame_id!r}", mpath) from None
    return ws


def load_files(paths, mode: str = TRIPOS, frame_id: str | None = None) -> Workspace:
    """A workspace from data files directly, without a manifest."""
    ws = Workspace(str(paths[0]) if paths else "", mode=mode, frame_id=frame_id)
    blocks = []
    for p in paths:
        blocks.extend(read_blocks(p))
    _resolve(ws, blocks)
    return ws


ORDER = ("set", "poset", "map", "pred", "per", "morphism", "framemap")


def _resolve(ws: Workspace, blocks: list[Block]):
    for kind in ORDER:
        for b in (b for b in blocks if b.kind == kind):
            try:
                _LOADERS[kind](ws, b)
            except LoadError:
                raise
            except KeyError as e:
                raise LoadError(f"unknown reference {e.args[0]!r}", b.path, b.line) from None
            except (FinTriposError, ValueError) as e:
                raise LoadError(str(e), b.path, b.line) from None


def _claim(table: dict, key: str, b: Block):
    if key in table:
        raise LoadError(f"duplicate {b.kind} id {key!r}", b.path, b.line)


def _load_set(ws: Workspace, b: Block):
    words = b.header.split()
    if len(words) != 2:
        raise LoadError("expected 'set <id>'", b.path, b.line)
    sid = words[1]
    _claim(ws.sets, sid, b)
    labels = []
    for n, line in b.body:
        w = line.split()
        if w[0] != "elements":
            raise LoadError("expected 'elements <label> ...'", b.path, n)
        labels.extend(w[1:])
    if len(set(labels)) != len(labels):
        raise LoadError(f"set {sid}: duplicate element label", b.path, b.line)
    ws.sets[sid] = FinSet(sid, labels)


def _load_poset(ws: Workspace, b: Block):
    words = b.header.split()
    if len(words) != 2:
        raise LoadError("expected 'poset <id>'", b.path, b.line)
    pid = words[1]
    _claim(ws.posets, pid, b)
    labels, pairs = [], []
    for n, line in b.body:
        w = line.split()
        if w[0] == "elements":
            labels.extend(w[1:])
        elif w[0] == "le" and len(w) == 3:
            pairs.append((n, w[1], w[2]))
        else:
            raise LoadError("expected 'elements ...' or 'le <a> <b>'", b.path, n)
    for n, x, y in pairs:
        for v in (x, y):
            if v not in labels:
                raise LoadError(f"unknown element {v!r}", b.path, n)
    P = FinPoset.from_pairs(pid, labels, [(x, y) for _, x, y in pairs])
    ws.posets[pid] = validate(P)


def _load_map(ws: Workspace, b: Block):
    m = re.fullmatch(r"map\s+(\S+)\s*:\s*(.+?)\s*->\s*(\S+)", b.header)
    if not m:
        raise LoadError("expected 'map <id> : <dom> -> <cod>'", b.path, b.line)
    mid, dom_text, cod_id = m.groups()
    _claim(ws.maps, mid, b)
    args, dom = ws.set_expr(dom_text)
    cod = ws.sets[cod_id]
    assign = {}
    for n, lhs, rhs in _mapping_lines(b):
        lab = parse_label(lhs)
        if lab not in dom:
            raise LoadError(f"{lhs!r} is not an element of {dom_text}", b.path, n)
        if rhs not in cod:
            raise LoadError(f"{rhs!r} is not an element of {cod_id}", b.path, n)
        if lab in assign:
            raise LoadError(f"{lhs!r} assigned twice", b.path, n)
        assign[lab] = rhs
    missing = [e for e in dom if e not in assign]
    if missing:
        raise LoadError(f"map {mid}: no image for {missing[0]!r}", b.path, b.line)
    ws.maps[mid] = (args, cod_id, FinMap.from_dict(dom, cod, assign))


def _load_pred(ws: Workspace, b: Block):
    m = re.fullmatch(r"pred\s+(\S+)\s+on\s+(.+?)\s+in\s+(\S+)", b.header)
    if not m:
        raise LoadError("expected 'pred <id> on <set> in <frame>'", b.path, b.line)
    pid, set_text, fid = m.groups()
    _claim(ws.preds, pid, b)
    args, carrier = ws.set_expr(set_text)
    frame = ws.resolve_frame(fid)
    vals = {}
    for n, lhs, rhs in _mapping_lines(b):
        lab = parse_label(lhs)
        if lab not in carrier:
            raise LoadError(f"{lhs!r} is not an element of {set_text}", b.path, n)
        try:
            vals[lab] = frame_element(frame, rhs)
        except (KeyError, ValueError, FinTriposError):
            raise LoadError(f"{rhs!r} is not an element of frame {fid}", b.path, n) from None
    missing = [e for e in carrier if e not in vals]
    if missing:
        raise LoadError(f"pred {pid}: no value for {missing[0]!r}", b.path, b.line)
    ws.preds[pid] = Predicate(carrier, frame, [vals[e] for e in carrier])
    ws.pred_args[pid] = args


def _load_per(ws: Workspace, b: Block):
    m = re.fullmatch(r"per\s+(\S+)\s+carrier\s+(\S+)\s+rel\s+(\S+)", b.header)
    if not m or b.body:
        raise LoadError("expected 'per <id> carrier <set> rel <pred>'", b.path, b.line)
    pid, sid, rid = m.groups()
    _claim(ws.pers, pid, b)
    ws.pers[pid] = PerObject(ws.sets[sid], ws.preds[rid], pid, check=False)


def _load_morphism(ws: Workspace, b: Block):
    m = re.fullmatch(r"morphism\s+(\S+)\s*:\s*(\S+)\s*->\s*(\S+)\s+via\s+(\S+)", b.header)
    if not m or b.body:
        raise LoadError("expected 'morphism <id> : <per> -> <per> via <map>'", b.path, b.line)
    mid, s, t, f = m.groups()
    _claim(ws.morphisms, mid, b)
    ws.morphisms[mid] = PerMorphism(ws.pers[s], ws.pers[t], ws.maps[f][2], check=False)


def _load_framemap(ws: Workspace, b: Block):
    m = re.fullmatch(r"framemap\s+(\S+)\s*:\s*(\S+)\s*->\s*(\S+)", b.header)
    if not m:
        raise LoadError("expected 'framemap <id> : <frame> -> <frame>'", b.path, b.line)
    mid, s, t = m.groups()
    _claim(ws.framemaps, mid, b)
    ws.framemaps[mid] = (s, t, _mapping_lines(b), b)


_LOADERS = {
    "set": _load_set, "poset": _load_poset, "map": _load_map, "pred": _load_pred,
    "per": _load_per, "morphism": _load_morphism, "framemap": _load_framemap,
}


def resolve_framemap(entry, source: FinFrame, target: FinFrame) -> MonotoneMap:
    """Build a frame map once both frames are known (they may live in two workspaces)."""
    _, _, lines, b = entry
    table = {}
    for n, lhs, rhs in lines:
        try:
            i, j = frame_element(source, lhs), frame_element(target, rhs)
        except (KeyError, ValueError, FinTriposError):
            raise LoadError(f"unknown frame element in '{lhs} {ARROW} {rhs}'", b.path, n) from None
        table[i] = j
    missing = [source.elements[i] for i in range(source.n) if i not in table]
    if missing:
        raise LoadError(f"framemap: no image for {missing[0]!r}", b.path, b.line)
    try:
        return MonotoneMap(source, target, [table[i] for i in range(source.n)])
    except FinTriposError as e:
        raise LoadError(str(e), b.path, b.line) from None


def load_framemap(path: str | Path, source: FinFrame, target: FinFrame) -> MonotoneMap:
    blocks = [b for b in read_blocks(path)]
    if len(blocks) != 1 or blocks[0].kind != "framemap":
        raise LoadError("expected exactly one framemap block", str(path))
    ws = Workspace(str(path))
    _load_framemap(ws, blocks[0])
    return resolve_framemap(next(iter(ws.framemaps.values())), source, target)


def format_predicate(pred: Predicate) -> list[str]:
    return [f"{format_label(e)} {ARROW} {pred.frame.elements[v]}" for e, v in zip(pred.carrier, pred.values)]
