"""Finite sets and total functions: the base category.

Element labels are strings or (nested) tuples of labels.  Products and
pullbacks label their elements by ordered pairs of constituent labels, so a
product of products prints as ``(a,(b,c))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Hashable, Iterator, Sequence

import numpy as np

from .errors import CompositionError, ConeError, NotInStructure

Label = Hashable


def _frozen(arr) -> np.ndarray:
    a = np.array(arr, dtype=np.int64).reshape(-1)
    a.flags.writeable = False
    return a


class FinSet:
    """A finite set with a fixed element order.

    Equality and hashing go by the element tuple, so two independently built
    products of the same sets compare equal; ``id`` is a display name.
    """

    __slots__ = ("id", "elements", "_index", "_hash")

    def __init__(self, id: str, elements: Sequence[Label]):
        elements = tuple(elements)
        index = {}
        for i, e in enumerate(elements):
            if e in index:
                raise ValueError(f"set {id}: duplicate element label {e!r}")
            index[e] = i
        self.id = id
        self.elements = elements
        self._index = index
        self._hash = hash(elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Label]:
        return iter(self.elements)

    def __contains__(self, label) -> bool:
        return label in self._index

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, FinSet):
            return NotImplemented
        return self._hash == other._hash and self.elements == other.elements

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"FinSet({self.id!r}, {len(self)} elements)"

    def index(self, label: Label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise NotInStructure(f"{label!r} is not an element of set {self.id}") from None

    def relabel(self, mapping: Callable[[Label], Label], id: str | None = None) -> "FinSet":
        return FinSet(id or self.id, [mapping(e) for e in self.elements])


@dataclass(frozen=True, eq=False)
class FinMap:
    """A total function ``dom -> cod`` stored as an index table."""

    dom: FinSet
    cod: FinSet
    table: np.ndarray

    def __post_init__(self):
        t = _frozen(self.table)
        if len(t) != len(self.dom):
            raise ValueError(f"map table has {len(t)} entries, domain has {len(self.dom)}")
        if len(t) and (t.min() < 0 or t.max() >= len(self.cod)):
            raise ValueError("map image lies outside the codomain")
        object.__setattr__(self, "table", t)

    @classmethod
    def from_dict(cls, dom: FinSet, cod: FinSet, assignment: dict) -> "FinMap":
        missing = [a for a in dom if a not in assignment]
        if missing:
            raise ValueError(f"no image given for {missing[0]!r}")
        return cls(dom, cod, [cod.index(assignment[a]) for a in dom])

    @classmethod
    def identity(cls, A: FinSet) -> "FinMap":
        return cls(A, A, np.arange(len(A)))

    def __call__(self, label: Label) -> Label:
        return self.cod.elements[self.table[self.dom.index(label)]]

    def as_dict(self) -> dict:
        return {a: self.cod.elements[j] for a, j in zip(self.dom.elements, self.table)}

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinMap):
            return NotImplemented
        return (
            self.dom == other.dom
            and self.cod == other.cod
            and np.array_equal(self.table, other.table)
        )

    def __hash__(self) -> int:
        return hash((self.dom, self.cod, self.table.tobytes()))

    def __repr__(self) -> str:
        return f"FinMap({self.dom.id} -> {self.cod.id}, {self.table.tolist()})"

    def is_injective(self) -> bool:
        return len(np.unique(self.table)) == len(self.table)

    def is_surjective(self) -> bool:
        return len(np.unique(self.table)) == len(self.cod)


def compose(g: FinMap, f: FinMap) -> FinMap:
    """``g ∘ f``."""
    if f.cod != g.dom:
        raise CompositionError(f"cannot compose {g.dom.id} -> {g.cod.id} after {f.dom.id} -> {f.cod.id}")
    return FinMap(f.dom, g.cod, g.table[f.table])


@dataclass(frozen=True)
class LimitCone:
    apex: FinSet
    legs: tuple
    mediator: Callable[..., FinMap] = field(compare=False)


TERMINAL_LABEL = "*"


@lru_cache(maxsize=None)
def terminal() -> FinSet:
    return FinSet("1", [TERMINAL_LABEL])


def to_terminal(A: FinSet) -> FinMap:
    return FinMap(A, terminal(), np.zeros(len(A), dtype=np.int64))


@lru_cache(maxsize=4096)
def _product_apex(A: FinSet, B: FinSet) -> FinSet:
    return FinSet(f"{A.id}*{B.id}", [(a, b) for a in A.elements for b in B.elements])


def pairing(f: FinMap, g: FinMap) -> FinMap:
    """``<f, g> : X -> A x B``."""
    if f.dom != g.dom:
        raise ConeError(f"pairing needs equal domains, got {f.dom.id} and {g.dom.id}")
    apex = _product_apex(f.cod, g.cod)
    return FinMap(f.dom, apex, f.table * len(g.cod) + g.table)


def product(A: FinSet, B: FinSet) -> LimitCone:
    apex = _product_apex(A, B)
    nb = len(B)
    idx = np.arange(len(apex))
    p1 = FinMap(apex, A, idx // nb if nb else idx)
    p2 = FinMap(apex, B, idx % nb if nb else idx)

    def mediator(f: FinMap, g: FinMap) -> FinMap:
        if f.cod != A or g.cod != B:
            raise ConeError("competing cone has the wrong feet")
        return pairing(f, g)

    return LimitCone(apex, (p1, p2), mediator)


def product_n(sets: Sequence[FinSet]) -> FinSet:
    """Right-nested iterated product; the empty product is the terminal set."""
    sets = list(sets)
    if not sets:
        return terminal()
    out = sets[-1]
    for s in reversed(sets[:-1]):
        out = _product_apex(s, out)
    return out


def product_map(f: FinMap, g: FinMap) -> FinMap:
    """``f x g : A x B -> C x D``."""
    a, b = product(f.dom, g.dom).legs
    return pairing(compose(f, a), compose(g, b))


def diagonal(A: FinSet) -> FinMap:
    i = FinMap.identity(A)
    return pairing(i, i)


def pullback(f: FinMap, g: FinMap) -> LimitCone:
    """Pullback of ``f: A -> C`` and ``g: B -> C`` with legs ``h: D -> A``, ``k: D -> B``."""
    if f.cod != g.cod:
        raise ConeError(f"pullback needs a common codomain, got {f.cod.id} and {g.cod.id}")
    A, B = f.dom, g.dom
    pairs = [
        (i, j)
        for i in range(len(A))
        for j in range(len(B))
        if f.table[i] == g.table[j]
    ]
    apex = FinSet(
        f"{A.id}x[{f.cod.id}]{B.id}",
        [(A.elements[i], B.elements[j]) for i, j in pairs],
    )
    h = FinMap(apex, A, [i for i, _ in pairs])
    k = FinMap(apex, B, [j for _, j in pairs])
    where = {p: n for n, p in enumerate(pairs)}

    def mediator(h2: FinMap, k2: FinMap) -> FinMap:
        if h2.dom != k2.dom or h2.cod != A or k2.cod != B:
            raise ConeError("competing cone has the wrong shape")
        if not np.array_equal(f.table[h2.table], g.table[k2.table]):
            raise ConeError("competing cone does not commute")
        return FinMap(h2.dom, apex, [where[(i, j)] for i, j in zip(h2.table, k2.table)])

    return LimitCone(apex, (h, k), mediator)


def enumerate_maps(A: FinSet, B: FinSet) -> Iterator[FinMap]:
    """All ``|B|**|A|`` maps in lexicographic order of their tables."""
    for table in itertools.product(range(len(B)), repeat=len(A)):
        yield FinMap(A, B, table)


def finset(id: str, n_or_labels) -> FinSet:
    """Convenience constructor: ``finset("A", 3)`` gives elements a0, a1, a2."""
    if isinstance(n_or_labels, int):
        stem = id.lower()
        return FinSet(id, [f"{stem}{i}" for i in range(n_or_labels)])
    return FinSet(id, n_or_labels)


def format_label(label: Label) -> str:
    if isinstance(label, tuple):
        return "(" + ",".join(format_label(x) for x in label) + ")"
    return str(label)


def parse_label(text: str) -> Label:
    """Inverse of :func:`format_label`; brace groups such as ``{l,r}`` stay atomic."""
    pos = 0

    def atom_end(i: int) -> int:
        depth = 0
        while i < len(text):
            c = text[i]
            if c == "{":
                depth += 1
            elif c == "}":
                depth -= 1
            elif depth == 0 and c in ",()":
                break
            i += 1
        return i

    def parse() -> Label:
        nonlocal pos
        if pos < len(text) and text[pos] == "(":
            pos += 1
            items = []
            if pos < len(text) and text[pos] == ")":
                pos += 1
                return ()
            while True:
                items.append(parse())
                if pos >= len(text):
                    raise ValueError(f"unterminated tuple label {text!r}")
                if text[pos] == ",":
                    pos += 1
                    continue
                if text[pos] == ")":
                    pos += 1
                    return tuple(items)
                raise ValueError(f"bad tuple label {text!r}")
        end = atom_end(pos)
        if end == pos:
            raise ValueError(f"empty label in {text!r}")
        atom = text[pos:end]
        pos = end
        return atom

    out = parse()
    if pos != len(text):
        raise ValueError(f"trailing characters in label {text!r}")
    return out
