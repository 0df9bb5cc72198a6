"""Finite posets, lattices and frames.

A :class:`FinFrame` is a finite distributive lattice.  Besides the meet, join
and Heyting tables it carries a Birkhoff encoding: each element is mapped to
the bitmask of join-irreducibles below it, which turns meets into ``&`` and
joins into ``|``.  Predicate computations use these codes throughout.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import NotALattice, NotAPoset, NotDistributive, NotInStructure


class FinPoset:
    def __init__(self, id: str, elements: Sequence, leq):
        self.id = id
        self.elements = tuple(elements)
        leq = np.array(leq, dtype=bool).reshape(len(self.elements), len(self.elements))
        leq.flags.writeable = False
        self.leq = leq
        self._index = {e: i for i, e in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise NotAPoset(f"{id}: duplicate element labels")

    @classmethod
    def from_pairs(cls, id: str, elements: Sequence, pairs) -> "FinPoset":
        """Reflexive-transitive closure of the generating pairs ``a <= b``."""
        elements = tuple(elements)
        index = {e: i for i, e in enumerate(elements)}
        n = len(elements)
        leq = np.eye(n, dtype=bool)
        for a, b in pairs:
            for x in (a, b):
                if x not in index:
                    raise NotInStructure(f"{id}: unknown element {x!r}")
            leq[index[a], index[b]] = True
        for k in range(n):
            leq |= leq[:, [k]] & leq[[k], :]
        return validate(cls(id, elements, leq))

    @property
    def n(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise NotInStructure(f"{label!r} is not an element of {self.id}") from None

    def le(self, a, b) -> bool:
        return bool(self.leq[self.index(a), self.index(b)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinPoset):
            return NotImplemented
        return self.elements == other.elements and np.array_equal(self.leq, other.leq)

    def __hash__(self) -> int:
        return hash((self.elements, self.leq.tobytes()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.id!r}, {list(self.elements)})"

    def lower_bounds(self, idxs) -> np.ndarray:
        """Indices below every element of ``idxs`` (everything, for an empty list)."""
        mask = np.ones(self.n, dtype=bool)
        for i in idxs:
            mask &= self.leq[:, i]
        return np.flatnonzero(mask)

    def upper_bounds(self, idxs) -> np.ndarray:
        mask = np.ones(self.n, dtype=bool)
        for i in idxs:
            mask &= self.leq[i, :]
        return np.flatnonzero(mask)

    def maxima(self, idxs) -> list[int]:
        idxs = list(idxs)
        return [i for i in idxs if not any(i != j and self.leq[i, j] for j in idxs)]


def validate(poset: FinPoset) -> FinPoset:
    leq = poset.leq
    n = poset.n
    for i in range(n):
        if not leq[i, i]:
            raise NotAPoset(f"{poset.id}: not reflexive at {poset.elements[i]!r}")
    for i in range(n):
        for j in range(i + 1, n):
            if leq[i, j] and leq[j, i]:
                raise NotAPoset(
                    f"{poset.id}: antisymmetry fails for {poset.elements[i]!r} and {poset.elements[j]!r}"
                )
    comp = (leq.astype(np.int64) @ leq.astype(np.int64)) > 0
    bad = np.argwhere(comp & ~leq)
    if len(bad):
        i, j = bad[0]
        raise NotAPoset(f"{poset.id}: not transitive, {poset.elements[i]!r} <= ... <= {poset.elements[j]!r}")
    return poset


class FinLattice(FinPoset):
    def __init__(self, id, elements, leq, meet, join, top: int, bottom: int):
        super().__init__(id, elements, leq)
        self.meet_t = _frozen_table(meet)
        self.join_t = _frozen_table(join)
        self.top = int(top)
        self.bottom = int(bottom)

    def meet(self, a, b):
        return self.elements[self.meet_t[self.index(a), self.index(b)]]

    def join(self, a, b):
        return self.elements[self.join_t[self.index(a), self.index(b)]]

    def meet_all(self, idxs) -> int:
        out = self.top
        for i in idxs:
            out = self.meet_t[out, i]
        return int(out)

    def join_all(self, idxs) -> int:
        out = self.bottom
        for i in idxs:
            out = self.join_t[out, i]
        return int(out)


def _frozen_table(t) -> np.ndarray:
    a = np.array(t, dtype=np.int64)
    a.flags.writeable = False
    return a


def _bound(poset: FinPoset, a: int, b: int, lower: bool) -> int | None:
    cands = (poset.lower_bounds if lower else poset.upper_bounds)([a, b])
    for c in cands:
        if lower and all(poset.leq[d, c] for d in cands):
            return int(c)
        if not lower and all(poset.leq[c, d] for d in cands):
            return int(c)
    return None


def complete_to_lattice(poset: FinPoset) -> FinLattice:
    """Return ``poset`` with its meet and join tables; fails if some pair lacks either."""
    if isinstance(poset, FinLattice):
        return poset
    n = poset.n
    if n == 0:
        raise NotALattice(f"{poset.id}: the empty poset has no top or bottom")
    meet = np.zeros((n, n), dtype=np.int64)
    join = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(a, n):
            m = _bound(poset, a, b, lower=True)
            if m is None:
                raise NotALattice(
                    f"{poset.id}: {poset.elements[a]!r} and {poset.elements[b]!r} have no meet"
                )
            j = _bound(poset, a, b, lower=False)
            if j is None:
                raise NotALattice(
                    f"{poset.id}: {poset.elements[a]!r} and {poset.elements[b]!r} have no join"
                )
            meet[a, b] = meet[b, a] = m
            join[a, b] = join[b, a] = j
    tops = poset.maxima(range(n))
    bots = [i for i in range(n) if all(poset.leq[i, j] for j in range(n))]
    return FinLattice(poset.id, poset.elements, poset.leq, meet, join, tops[0], bots[0])


class FinFrame(FinLattice):
    """Finite distributive lattice with Heyting implication and Birkhoff codes."""

    def __init__(self, id, elements, leq, meet, join, top, bottom, heyting):
        super().__init__(id, elements, leq, meet, join, top, bottom)
        self.imp_t = _frozen_table(heyting)
        n = self.n
        # join-irreducibles: nonzero elements with exactly one lower cover
        irr = []
        for a in range(n):
            if a == self.bottom:
                continue
            below = [b for b in range(n) if b != a and self.leq[b, a]]
            if len(self.maxima(below)) == 1:
                irr.append(a)
        self.irreducibles = tuple(irr)
        code = np.zeros(n, dtype=np.int64)
        for bit, j in enumerate(irr):
            code[self.leq[j, :]] |= 1 << bit
        if len(set(code.tolist())) != n:
            raise NotDistributive(f"{id}: Birkhoff encoding is not injective")
        code.flags.writeable = False
        self.code = code
        self.top_code = int(code[self.top])
        decode = np.full(1 << len(irr), -1, dtype=np.int64)
        decode[code] = np.arange(n)
        decode.flags.writeable = False
        self.decode = decode
        # Heyting implication on codes, indexed by code values
        size = 1 << len(irr)
        imp_code = np.zeros((size, size), dtype=np.int64)
        imp_code[np.ix_(code, code)] = code[self.imp_t]
        imp_code.flags.writeable = False
        self.imp_code = imp_code

    def imp(self, a, b):
        return self.elements[self.imp_t[self.index(a), self.index(b)]]

    def label(self, i: int):
        return self.elements[i]

    def codes(self, idx) -> np.ndarray:
        return self.code[np.asarray(idx, dtype=np.int64)]

    def from_codes(self, codes) -> np.ndarray:
        return self.decode[np.asarray(codes, dtype=np.int64)]


def check_frame(lattice: FinLattice) -> FinFrame:
    """Validate distributivity and attach the Heyting table."""
    if isinstance(lattice, FinFrame):
        return lattice
    if not isinstance(lattice, FinLattice):
        lattice = complete_to_lattice(lattice)
    n = lattice.n
    M, J = lattice.meet_t, lattice.join_t
    for a in range(n):
        lhs = M[a][J]  # a ∧ (b ∨ c)
        rhs = J[M[a][:, None], M[a][None, :]]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            b, c = bad[0]
            e = lattice.elements
            raise NotDistributive(
                f"{lattice.id}: {e[a]!r} ∧ ({e[b]!r} ∨ {e[c]!r}) differs from the distributed form"
            )
    heyting = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            below = [c for c in range(n) if lattice.leq[M[c, a], b]]
            heyting[a, b] = lattice.join_all(below)
    return FinFrame(
        lattice.id, lattice.elements, lattice.leq, M, J, lattice.top, lattice.bottom, heyting
    )


def frame_from_poset(poset: FinPoset) -> FinFrame:
    return check_frame(complete_to_lattice(validate(poset)))


class MonotoneMap:
    __slots__ = ("dom", "cod", "table")

    def __init__(self, dom: FinPoset, cod: FinPoset, table, check: bool = True):
        self.dom = dom
        self.cod = cod
        t = np.array(table, dtype=np.int64).reshape(-1)
        t.flags.writeable = False
        self.table = t
        if len(t) != dom.n:
            raise ValueError("monotone map table has the wrong length")
        if check and not self._is_monotone():
            raise ValueError(f"map {dom.id} -> {cod.id} is not monotone")

    @classmethod
    def from_dict(cls, dom, cod, assignment: dict) -> "MonotoneMap":
        return cls(dom, cod, [cod.index(assignment[a]) for a in dom.elements])

    @classmethod
    def identity(cls, P: FinPoset) -> "MonotoneMap":
        return cls(P, P, np.arange(P.n), check=False)

    def _is_monotone(self) -> bool:
        t = self.table
        return bool(np.all(~self.dom.leq | self.cod.leq[np.ix_(t, t)]))

    def __call__(self, label):
        return self.cod.elements[self.table[self.dom.index(label)]]

    def __eq__(self, other) -> bool:
        if not isinstance(other, MonotoneMap):
            return NotImplemented
        return self.dom == other.dom and self.cod == other.cod and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash(self.table.tobytes())

    def __repr__(self) -> str:
        return f"MonotoneMap({self.dom.id} -> {self.cod.id}, {[self.cod.elements[i] for i in self.table]})"

    def leq(self, other: "MonotoneMap") -> bool:
        """Pointwise order."""
        return bool(np.all(self.cod.leq[self.table, other.table]))

    def compose_after(self, inner: "MonotoneMap") -> "MonotoneMap":
        """``self ∘ inner``."""
        return MonotoneMap(inner.dom, self.cod, self.table[inner.table], check=False)


MONOTONE = "monotone"
MEET_PRESERVING = "meet_preserving"
FRAME_MORPHISM = "frame_morphism"


def preserves_meets(m: MonotoneMap) -> bool:
    D, C, t = m.dom, m.cod, m.table
    if t[D.top] != C.top:
        return False
    return bool(np.array_equal(t[D.meet_t], C.meet_t[np.ix_(t, t)]))


def preserves_joins(m: MonotoneMap) -> bool:
    D, C, t = m.dom, m.cod, m.table
    if t[D.bottom] != C.bottom:
        return False
    return bool(np.array_equal(t[D.join_t], C.join_t[np.ix_(t, t)]))


def map_class(m: MonotoneMap) -> str:
    if not (isinstance(m.dom, FinLattice) and isinstance(m.cod, FinLattice)):
        return MONOTONE
    if not preserves_meets(m):
        return MONOTONE
    if preserves_joins(m):
        return FRAME_MORPHISM
    return MEET_PRESERVING


def is_join_prime(a, L: FinFrame) -> bool:
    """``a`` is join-prime: nonzero, and ``a <= x ∨ y`` forces ``a <= x`` or ``a <= y``."""
    if not isinstance(L, FinFrame):
        raise NotDistributive(f"{L.id}: join-primality is only decided on frames")
    i = L.index(a) if not isinstance(a, (int, np.integer)) else int(a)
    if not 0 <= i < L.n:
        raise NotInStructure(f"element {a!r} not in {L.id}")
    if i == L.bottom:
        return False
    below_join = L.leq[i][L.join_t]  # a <= x ∨ y
    either = L.leq[i][:, None] | L.leq[i][None, :]
    return bool(np.all(~below_join | either))


def join_primes(L: FinFrame) -> list[int]:
    return [i for i in range(L.n) if is_join_prime(i, L)]


def has_enough_join_primes(L: FinFrame) -> bool:
    primes = join_primes(L)
    return all(L.join_all([p for p in primes if L.leq[p, a]]) == a for a in range(L.n))


def _mask_label(P: FinPoset, mask: int) -> str:
    return "{" + ",".join(str(P.elements[i]) for i in range(P.n) if mask >> i & 1) + "}"


def lower_sets(P: FinPoset) -> tuple[FinFrame, MonotoneMap]:
    """The frame low(P) of down-closed subsets, and the embedding ``p -> ↓p``.

    Elements are bitmasks over P's element order, listed in increasing mask
    order; labels are brace-wrapped member lists such as ``{l,r}``.
    """
    n = P.n
    down = [sum(1 << j for j in range(n) if P.leq[j, i]) for i in range(n)]
    masks = [
        m for m in range(1 << n)
        if all(down[i] & ~m == 0 for i in range(n) if m >> i & 1)
    ]
    k = len(masks)
    pos = {m: i for i, m in enumerate(masks)}
    leq = np.array([[a & ~b == 0 for b in masks] for a in masks], dtype=bool)
    meet = np.array([[pos[a & b] for b in masks] for a in masks], dtype=np.int64)
    join = np.array([[pos[a | b] for b in masks] for a in masks], dtype=np.int64)
    lat = FinLattice(
        f"low({P.id})", [_mask_label(P, m) for m in masks], leq, meet, join,
        pos[(1 << n) - 1], pos[0],
    )
    frame = check_frame(lat)
    frame.masks = tuple(masks)
    frame.base_poset = P
    emb = MonotoneMap(P, frame, [pos[d] for d in down])
    return frame, emb


def enumerate_monotone_maps(P: FinPoset, Q: FinPoset) -> Iterator[MonotoneMap]:
    """All monotone maps ``P -> Q`` in lexicographic order of their tables."""
    n, m = P.n, Q.n
    table = [0] * n

    def extend(i: int):
        if i == n:
            yield MonotoneMap(P, Q, table, check=False)
            return
        for v in range(m):
            ok = True
            for j in range(i):
                if P.leq[j, i] and not Q.leq[table[j], v]:
                    ok = False
                    break
                if P.leq[i, j] and not Q.leq[v, table[j]]:
                    ok = False
                    break
            if ok:
                table[i] = v
                yield from extend(i + 1)

    yield from extend(0)


# -- catalogue -------------------------------------------------------------


def chain(n: int, id: str | None = None) -> FinFrame:
    labels = [str(i) for i in range(n)]
    leq = [[i <= j for j in range(n)] for i in range(n)]
    return frame_from_poset(FinPoset(id or f"chain{n}", labels, leq))


def two_chain() -> FinFrame:
    return chain(2, "2")


def antichain(n: int, id: str | None = None) -> FinPoset:
    return FinPoset(id or f"anti{n}", [f"p{i}" for i in range(n)], np.eye(n, dtype=bool))


def boolean(k: int) -> FinFrame:
    frame, _ = lower_sets(antichain(k, f"anti{k}"))
    return frame


def vee_poset() -> FinPoset:
    """The poset {l <= top >= r}."""
    return FinPoset.from_pairs("V", ["l", "top", "r"], [("l", "top"), ("r", "top")])


def _canonical_key(leq: np.ndarray) -> bytes:
    n = leq.shape[0]
    best = None
    for perm in itertools.permutations(range(n)):
        key = leq[np.ix_(perm, perm)].tobytes()
        if best is None or key < best:
            best = key
    return best if best is not None else b""


def _natural_orders(n: int) -> Iterator[np.ndarray]:
    """Partial orders on 0..n-1 contained in the natural order.

    Every poset has a linear extension, so these cover all posets up to isomorphism.
    """
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for bits in itertools.product([False, True], repeat=len(pairs)):
        leq = np.eye(n, dtype=bool)
        for (i, j), b in zip(pairs, bits):
            leq[i, j] = b
        closure = (leq.astype(np.int64) @ leq.astype(np.int64)) > 0
        if not np.any(closure & ~leq):
            yield leq


def _all_orders(n: int) -> Iterator[np.ndarray]:
    for perm_leq in _natural_orders(n):
        seen = set()
        for perm in itertools.permutations(range(n)):
            leq = perm_leq[np.ix_(perm, perm)]
            key = leq.tobytes()
            if key not in seen:
                seen.add(key)
                yield leq


@lru_cache(maxsize=None)
def all_posets(n: int, up_to_iso: bool = True) -> tuple[FinPoset, ...]:
    """All partial orders on ``n`` points (labelled p0..), optionally up to isomorphism."""
    labels = [f"p{i}" for i in range(n)]
    found = []
    seen = set()
    for leq in (_natural_orders(n) if up_to_iso else _all_orders(n)):
        key = _canonical_key(leq) if up_to_iso else leq.tobytes()
        if key in seen:
            continue
        seen.add(key)
        found.append(FinPoset(f"P{n}_{len(found)}", labels, leq))
    return tuple(found)


@lru_cache(maxsize=None)
def distributive_lattices(max_size: int) -> tuple[FinFrame, ...]:
    """Every finite distributive lattice with at most ``max_size`` elements, up to iso.

    Uses Birkhoff duality: each is low(J) for its poset J of join-irreducibles.
    """
    out = []
    n = 0
    while n + 1 <= max_size:
        for P in all_posets(n):
            frame, _ = lower_sets(P)
            if frame.n <= max_size:
                out.append(frame)
        n += 1
    return tuple(sorted(out, key=lambda f: (f.n, f.id)))
