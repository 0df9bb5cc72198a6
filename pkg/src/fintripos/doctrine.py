"""Canonical indexings of finite frames over finite sets.

A predicate on a finite set ``I`` is a function ``I -> A`` into a frame ``A``,
ordered pointwise.  Reindexing is precomposition, ``∃_f`` and ``∀_f`` are
joins and meets over fibres, and the power object of ``I`` is the set of all
functions ``I -> A``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    CarrierMismatch,
    NoDecomposition,
    NotDistributive,
    UnsupportedInMode,
)
from .finset import FinMap, FinSet, LimitCone, compose, product, pullback
from .order import (
    FRAME_MORPHISM,
    FinFrame,
    FinPoset,
    MonotoneMap,
    enumerate_monotone_maps,
    has_enough_join_primes,
    is_join_prime,
    join_primes,
    lower_sets,
    map_class,
)


class Predicate:
    """One fibre element: a frame value for every element of ``carrier``.

    ``frame`` is normally a :class:`FinFrame`; weak-terminal witnesses for
    canonical indexings of plain posets use a :class:`FinPoset` instead.
    """

    __slots__ = ("carrier", "frame", "values", "_codes")

    def __init__(self, carrier: FinSet, frame: FinPoset, values):
        v = np.array(values, dtype=np.int64).reshape(-1)
        if len(v) != len(carrier):
            raise CarrierMismatch(
                f"predicate has {len(v)} values but carrier {carrier.id} has {len(carrier)} elements"
            )
        if len(v) and (v.min() < 0 or v.max() >= frame.n):
            raise ValueError("predicate value outside the frame")
        v.flags.writeable = False
        self.carrier = carrier
        self.frame = frame
        self.values = v
        self._codes = None

    @classmethod
    def from_codes(cls, carrier: FinSet, frame: FinFrame, codes) -> "Predicate":
        return cls(carrier, frame, frame.decode[np.asarray(codes, dtype=np.int64)])

    @classmethod
    def const(cls, carrier: FinSet, frame: FinPoset, value: int) -> "Predicate":
        return cls(carrier, frame, np.full(len(carrier), value, dtype=np.int64))

    @classmethod
    def top(cls, carrier: FinSet, frame: FinFrame) -> "Predicate":
        return cls.const(carrier, frame, frame.top)

    @classmethod
    def bottom(cls, carrier: FinSet, frame: FinFrame) -> "Predicate":
        return cls.const(carrier, frame, frame.bottom)

    @classmethod
    def from_dict(cls, carrier: FinSet, frame: FinPoset, assignment: dict) -> "Predicate":
        return cls(carrier, frame, [frame.index(assignment[e]) for e in carrier.elements])

    @property
    def codes(self) -> np.ndarray:
        if self._codes is None:
            self._codes = self.frame.code[self.values]
        return self._codes

    def __call__(self, label):
        return self.frame.elements[self.values[self.carrier.index(label)]]

    def as_dict(self) -> dict:
        return {e: self.frame.elements[v] for e, v in zip(self.carrier.elements, self.values)}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Predicate):
            return NotImplemented
        return (
            self.carrier == other.carrier
            and self.frame == other.frame
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self) -> int:
        return hash((self.carrier, self.values.tobytes()))

    def __repr__(self) -> str:
        vals = ", ".join(f"{e}: {self.frame.elements[v]}" for e, v in zip(self.carrier.elements[:8], self.values))
        more = ", ..." if len(self.carrier) > 8 else ""
        return f"Predicate({self.carrier.id} -> {self.frame.id}; {vals}{more})"

    def _same_fibre(self, other: "Predicate"):
        if self.carrier != other.carrier:
            raise CarrierMismatch(f"predicates live over {self.carrier.id} and {other.carrier.id}")

    def leq(self, other: "Predicate") -> bool:
        self._same_fibre(other)
        return bool(np.all(self.frame.leq[self.values, other.values]))

    def __le__(self, other: "Predicate") -> bool:
        return self.leq(other)

    def __and__(self, other: "Predicate") -> "Predicate":
        self._same_fibre(other)
        return Predicate(self.carrier, self.frame, self.frame.meet_t[self.values, other.values])

    def __or__(self, other: "Predicate") -> "Predicate":
        self._same_fibre(other)
        return Predicate(self.carrier, self.frame, self.frame.join_t[self.values, other.values])

    def implies(self, other: "Predicate") -> "Predicate":
        self._same_fibre(other)
        return Predicate(self.carrier, self.frame, self.frame.imp_t[self.values, other.values])


REGULAR = "regular"
TRIPOS = "tripos"


@dataclass(frozen=True)
class Doctrine:
    """The canonical indexing ext(A) of a finite frame, in regular or tripos mode."""

    frame: FinFrame
    mode: str = TRIPOS

    def __post_init__(self):
        if self.mode not in (REGULAR, TRIPOS):
            raise ValueError(f"unknown doctrine mode {self.mode!r}")
        if not isinstance(self.frame, FinFrame):
            raise NotDistributive(f"{self.frame.id}: a doctrine needs a frame")

    def fibre(self, I: FinSet):
        """Every predicate on ``I``, in lexicographic order."""
        for vals in itertools.product(range(self.frame.n), repeat=len(I)):
            yield Predicate(I, self.frame, vals)

    def top(self, I: FinSet) -> Predicate:
        return Predicate.top(I, self.frame)

    def bottom(self, I: FinSet) -> Predicate:
        return Predicate.bottom(I, self.frame)

    def require_tripos(self, what: str):
        if self.mode != TRIPOS:
            raise UnsupportedInMode(f"{what} needs tripos mode")

    def power_object(self, I: FinSet) -> "PowerObjectData":
        self.require_tripos("power objects")
        return power_object(I, self.frame)

    def forall_along(self, f: FinMap, phi: Predicate) -> Predicate:
        self.require_tripos("∀")
        return forall_along(f, phi)


def _check_carrier(f: FinMap, phi: Predicate, end: str):
    expected = f.cod if end == "cod" else f.dom
    if phi.carrier != expected:
        raise CarrierMismatch(
            f"predicate over {phi.carrier.id} does not match {end} {expected.id} of the map"
        )


def reindex(f: FinMap, phi: Predicate) -> Predicate:
    """``f*φ = φ ∘ f``."""
    _check_carrier(f, phi, "cod")
    return Predicate(f.dom, phi.frame, phi.values[f.table])


def exists_along(f: FinMap, phi: Predicate) -> Predicate:
    """``∃_f φ (i) = ⋁ { φ(j) : f(j) = i }``."""
    _check_carrier(f, phi, "dom")
    acc = np.zeros(len(f.cod), dtype=np.int64)
    np.bitwise_or.at(acc, f.table, phi.codes)
    return Predicate.from_codes(f.cod, phi.frame, acc)


def forall_along(f: FinMap, phi: Predicate) -> Predicate:
    """``∀_f φ (i) = ⋀ { φ(j) : f(j) = i }``."""
    _check_carrier(f, phi, "dom")
    acc = np.full(len(f.cod), phi.frame.top_code, dtype=np.int64)
    np.bitwise_and.at(acc, f.table, phi.codes)
    return Predicate.from_codes(f.cod, phi.frame, acc)


ExistsImpl = Callable[[FinMap, Predicate], Predicate]


def check_frobenius(f: FinMap, phi: Predicate, psi: Predicate, exists: ExistsImpl = exists_along) -> bool:
    """``(∃_f φ) ∧ ψ = ∃_f(φ ∧ f*ψ)`` for ``φ`` over dom f and ``ψ`` over cod f."""
    _check_carrier(f, phi, "dom")
    _check_carrier(f, psi, "cod")
    return (exists(f, phi) & psi) == exists(f, phi & reindex(f, psi))


def check_beck_chevalley(
    f: FinMap, g: FinMap, phi: Predicate, cone: LimitCone | None = None,
    exists: ExistsImpl = exists_along,
) -> bool:
    """``∃_k ∘ h* = g* ∘ ∃_f`` on ``φ`` over dom f, for the pullback ``h, k`` of ``f, g``."""
    _check_carrier(f, phi, "dom")
    if cone is None:
        cone = pullback(f, g)
    h, k = cone.legs
    return exists(k, reindex(h, phi)) == reindex(g, exists(f, phi))


def check_adjunctions(f: FinMap, phi: Predicate, psi: Predicate) -> bool:
    """``∃_f φ ≤ ψ ⟺ φ ≤ f*ψ ⟺``, and ``f*ψ ≤ φ ⟺ ψ ≤ ∀_f φ``."""
    left = exists_along(f, phi).leq(psi) == phi.leq(reindex(f, psi))
    right = reindex(f, psi).leq(phi) == psi.leq(forall_along(f, phi))
    return left and right


# -- power objects -----------------------------------------------------------


POWER_BUDGET = 10**6


@dataclass(frozen=True)
class PowerObjectData:
    base: FinSet
    powerset: FinSet
    membership: Predicate  # on base x powerset

    @property
    def frame(self) -> FinFrame:
        return self.membership.frame

    def names(self) -> np.ndarray:
        """Row ``m`` holds the frame indices of the m-th function ``base -> frame``."""
        return _name_table(len(self.base), self.frame.n)


@lru_cache(maxsize=32)
def _name_table(k: int, n: int) -> np.ndarray:
    total = n**k
    idx = np.arange(total, dtype=np.int64)
    out = np.empty((total, k), dtype=np.int64)
    for i in range(k):
        out[:, i] = (idx // n ** (k - 1 - i)) % n
    out.flags.writeable = False
    return out


def power_object(I: FinSet, frame: FinFrame, budget: int = POWER_BUDGET) -> PowerObjectData:
    """``𝒫(I)`` = all functions ``I -> frame`` with membership ``ε(i, m) = m(i)``."""
    total = frame.n ** len(I)
    if total > budget:
        raise BudgetExceeded(f"power object of {I.id}", total, budget)
    names = _name_table(len(I), frame.n)
    labels = [tuple(frame.elements[v] for v in row) for row in names.tolist()]
    PI = FinSet(f"P({I.id})", labels)
    carrier = product(I, PI).apex
    # ε on I x P(I): entry (i, m) sits at i*|P| + m
    membership = Predicate(carrier, frame, names.T.reshape(-1))
    return PowerObjectData(I, PI, membership)


def name_index_batch(values: np.ndarray, n_i: int, n_j: int, n_frame: int) -> np.ndarray:
    """Names for a batch of predicates on ``I x J``.

    ``values`` has shape ``(K, n_i*n_j)`` in product order; the result has
    shape ``(K, n_j)`` and holds the index of ``i -> φ(i, j)`` in 𝒫(I).
    """
    values = np.asarray(values, dtype=np.int64)
    v = values.reshape(len(values), n_i, n_j)
    weights = n_frame ** np.arange(n_i - 1, -1, -1, dtype=np.int64)
    return np.einsum("kij,i->kj", v, weights)


def name_of(phi: Predicate, I: FinSet, J: FinSet, po: PowerObjectData | None = None) -> FinMap:
    """``⌜φ⌝ : J -> 𝒫(I)`` with ``⌜φ⌝(j) = (i ↦ φ(i, j))``."""
    if phi.carrier != product(I, J).apex:
        raise CarrierMismatch(f"name_of expects a predicate on {I.id} x {J.id}")
    if po is None:
        po = power_object(I, phi.frame)
    idx = name_index_batch(phi.values[None, :], len(I), len(J), phi.frame.n)[0]
    return FinMap(J, po.powerset, idx)


def power_replay_batch(values: np.ndarray, n_i: int, n_j: int, n_frame: int) -> np.ndarray:
    """``(J x ⌜φ⌝)*(ε)`` for a batch of predicates, as a ``(K, n_i*n_j)`` value array."""
    names = name_index_batch(values, n_i, n_j, n_frame)  # (K, n_j)
    table = _name_table(n_i, n_frame)  # (|P|, n_i): ε(i, m) = table[m, i]
    # entry (i, j) of the reindexed predicate is ε(i, name(j))
    out = table[names]  # (K, n_j, n_i)
    return out.transpose(0, 2, 1).reshape(len(names), n_i * n_j)


def check_power_object(phi: Predicate, I: FinSet, J: FinSet) -> bool:
    po = power_object(I, phi.frame)
    nm = name_of(phi, I, J, po)
    # (I x ⌜φ⌝) : I x J -> I x P(I)
    IJ = product(I, J)
    IP = product(I, po.powerset)
    along = IP.mediator(IJ.legs[0], compose(nm, IJ.legs[1]))
    return reindex(along, po.membership) == phi


# -- weak terminal objects and flatness ----------------------------------------


@dataclass(frozen=True)
class WeakTerminalWitness:
    leg: FinMap
    pred: Predicate


def weak_terminal(I: FinSet, constraints: Sequence[Predicate], P: FinPoset) -> WeakTerminalWitness:
    """Weakly terminal object of the slice of ext(P) over ``I`` below the constraints.

    ``J = {(i, q) : q <= φ_t(i) for all t}``, with first projection and
    ``pred(i, q) = q``.
    """
    for c in constraints:
        if c.carrier != I:
            raise CarrierMismatch("constraints must share the carrier I")
    pairs = []
    for i in range(len(I)):
        for q in range(P.n):
            if all(P.leq[q, c.values[i]] for c in constraints):
                pairs.append((i, q))
    J = FinSet(f"WT({I.id})", [(I.elements[i], P.elements[q]) for i, q in pairs])
    leg = FinMap(J, I, [i for i, _ in pairs])
    return WeakTerminalWitness(leg, Predicate(J, P, [q for _, q in pairs]))


def in_slice(obj: tuple[FinMap, Predicate], I: FinSet, constraints: Sequence[Predicate]) -> bool:
    f, psi = obj
    if f.cod != I or psi.carrier != f.dom:
        return False
    P = psi.frame
    return all(bool(np.all(P.leq[psi.values, c.values[f.table]])) for c in constraints)


def slice_hom_exists(src: tuple[FinMap, Predicate], dst: tuple[FinMap, Predicate]) -> bool:
    """Is there ``h`` with ``g∘h = f`` and ``ψ <= h*θ`` from ``(f, ψ)`` to ``(g, θ)``?

    The conditions are pointwise in the source, so a per-element search is exhaustive.
    """
    (f, psi), (g, theta) = src, dst
    P = psi.frame
    for j in range(len(f.dom)):
        if not any(
            g.table[k] == f.table[j] and P.leq[psi.values[j], theta.values[k]]
            for k in range(len(g.dom))
        ):
            return False
    return True


def verify_weak_terminal(
    witness: WeakTerminalWitness, I: FinSet, constraints: Sequence[Predicate], P: FinPoset, bound: int
) -> bool:
    """Check weak terminality against every competing object with ``|K| <= bound``."""
    target = (witness.leg, witness.pred)
    if not in_slice(target, I, constraints):
        return False
    for size in range(bound + 1):
        K = FinSet("K", [f"k{i}" for i in range(size)])
        for table in itertools.product(range(len(I)), repeat=size):
            g = FinMap(K, I, table)
            for vals in itertools.product(range(P.n), repeat=size):
                theta = Predicate(K, P, vals)
                if in_slice((g, theta), I, constraints) and not slice_hom_exists((g, theta), target):
                    return False
    return True


def is_flat_poset_map(m: MonotoneMap) -> bool:
    """Pointwise flatness of ``m : P -> A``.

    For every ``F ⊆ P`` (including ``∅``): ``⋀ m(F) <= ⋁ { m(q) : q a lower bound of F }``.
    """
    P, A = m.dom, m.cod
    if not isinstance(A, FinFrame):
        raise NotDistributive("flatness needs a frame codomain")
    t = m.table
    for r in range(P.n + 1):
        for F in itertools.combinations(range(P.n), r):
            lhs = A.meet_all(t[list(F)])
            rhs = A.join_all(t[P.lower_bounds(F)])
            if not A.leq[lhs, rhs]:
                return False
    return True


def is_flat_definitional(m: MonotoneMap, max_carrier: int = 1, max_constraints: int | None = None) -> bool:
    """Flatness straight from the weak-terminal form, over small carriers ``I``."""
    P, A = m.dom, m.cod
    if max_constraints is None:
        max_constraints = P.n
    for size in range(max_carrier + 1):
        I = FinSet("I", [f"i{k}" for k in range(size)])
        preds = [Predicate(I, P, v) for v in itertools.product(range(P.n), repeat=size)]
        for n in range(max_constraints + 1):
            for cs in itertools.combinations_with_replacement(preds, n):
                w = weak_terminal(I, cs, P)
                image = Predicate(w.pred.carrier, A, m.table[w.pred.values])
                lhs = Predicate.top(I, A)
                for c in cs:
                    lhs = lhs & Predicate(I, A, m.table[c.values])
                if not lhs.leq(exists_along(w.leg, image)):
                    return False
    return True


# -- ∃-completion -------------------------------------------------------------


def exists_completion(P: FinPoset) -> tuple[Doctrine, MonotoneMap]:
    """ext(P) -> ext(low(P)) via ``p ↦ ↓p``."""
    frame, emb = lower_sets(P)
    return Doctrine(frame, TRIPOS), emb


def frame_morphisms(L: FinFrame, A: FinFrame) -> list[MonotoneMap]:
    return [g for g in enumerate_monotone_maps(L, A) if map_class(g) == FRAME_MORPHISM]


def flat_maps(P: FinPoset, A: FinFrame) -> list[MonotoneMap]:
    return [m for m in enumerate_monotone_maps(P, A) if is_flat_poset_map(m)]


@dataclass
class UniversalPropertyReport:
    poset: str
    frame: str
    frame_morphisms: int
    flat_maps: int
    bijective: bool
    order_isomorphism: bool

    @property
    def ok(self) -> bool:
        return self.bijective and self.order_isomorphism


def check_completion_universal_property(P: FinPoset, A: FinFrame) -> UniversalPropertyReport:
    """Restriction along ``p ↦ ↓p`` from frame morphisms low(P) -> A to flat maps P -> A."""
    _, emb = exists_completion(P)
    L = emb.cod
    regs = frame_morphisms(L, A)
    flats = flat_maps(P, A)
    restricted = [g.compose_after(emb) for g in regs]
    bij = len(set(restricted)) == len(restricted) and set(restricted) == set(flats)
    order_iso = bij and all(
        g1.leq(g2) == r1.leq(r2)
        for g1, r1 in zip(regs, restricted)
        for g2, r2 in zip(regs, restricted)
    )
    return UniversalPropertyReport(P.id, A.id, len(regs), len(flats), bij, order_iso)


# -- ∃-prime predicates ---------------------------------------------------------


class PrimeStatus(str, Enum):
    YES = "yes"
    NO = "no"
    YES_BY_CHARACTERIZATION = "yes_by_characterization"


@dataclass(frozen=True)
class PrimeCounterexample:
    """``u: J -> I``, ``v: K -> J`` and ``ψ`` on K with ``u*φ <= ∃_v ψ`` but no section."""

    u: tuple[int, ...]
    v: tuple[int, ...]
    psi: tuple[int, ...]


@dataclass(frozen=True)
class PrimeVerdict:
    status: PrimeStatus
    bound: int | None = None
    counterexample: PrimeCounterexample | None = None

    def __bool__(self) -> bool:
        return self.status is not PrimeStatus.NO


def prime_by_characterization(phi: Predicate) -> bool:
    return all(is_join_prime(int(v), phi.frame) for v in phi.values)


@lru_cache(maxsize=None)
def _cover_failure(frame: FinFrame, values: tuple[int, ...], bound: int):
    """Search ``v: K -> J`` and ``ψ`` on K, ``|K| <= bound``, refuting primality of the
    J-indexed value tuple ``values``; returns ``(v, ψ)`` or ``None``."""
    nj = len(values)
    code = frame.code
    vals_code = code[np.array(values, dtype=np.int64)] if nj else np.zeros(0, dtype=np.int64)
    for nk in range(bound + 1):
        psis = _name_table(nk, frame.n)  # every ψ on K
        psi_codes = code[psis]
        for v in itertools.product(range(nj), repeat=nk):
            v = np.array(v, dtype=np.int64)
            ex = np.zeros((len(psis), nj), dtype=np.int64)
            covered = np.ones(len(psis), dtype=bool)
            section = np.ones(len(psis), dtype=bool)
            for j in range(nj):
                fib = np.flatnonzero(v == j)
                if len(fib):
                    ex[:, j] = np.bitwise_or.reduce(psi_codes[:, fib], axis=1)
                    # some k in the fibre with φ(u j) <= ψ(k)
                    section &= np.any((vals_code[j] & ~psi_codes[:, fib]) == 0, axis=1)
                else:
                    section &= False
                covered &= (vals_code[j] & ~ex[:, j]) == 0
            bad = np.flatnonzero(covered & ~section)
            if len(bad):
                return tuple(v.tolist()), tuple(psis[bad[0]].tolist())
    return None


def prime_by_oracle(phi: Predicate, bound: int) -> PrimeCounterexample | None:
    """Brute-force search over composable ``I <-u- J <-v- K`` with ``|J|, |K| <= bound``."""
    n_i = len(phi.carrier)
    for nj in range(bound + 1):
        seen = set()
        for u in itertools.product(range(n_i), repeat=nj):
            vals = tuple(int(phi.values[i]) for i in u)
            if vals in seen:
                continue
            seen.add(vals)
            hit = _cover_failure(phi.frame, vals, bound)
            if hit is not None:
                v, psi = hit
                return PrimeCounterexample(tuple(u), v, psi)
    return None


def is_exists_prime(phi: Predicate, bound: int | None = None) -> PrimeVerdict:
    """Decide ∃-primality of a predicate of a canonical frame indexing.

    Pointwise join-primality is the decision; with a ``bound`` the brute-force
    oracle runs as well, and a refutation it finds is reported as ``no``.
    An oracle-only ``yes`` (bounded) is never reported as a characterization.
    """
    characterized = prime_by_characterization(phi)
    if bound is None:
        return PrimeVerdict(PrimeStatus.YES_BY_CHARACTERIZATION if characterized else PrimeStatus.NO)
    cex = prime_by_oracle(phi, bound)
    if cex is not None:
        return PrimeVerdict(PrimeStatus.NO, bound, cex)
    if characterized:
        return PrimeVerdict(PrimeStatus.YES_BY_CHARACTERIZATION, bound)
    return PrimeVerdict(PrimeStatus.YES, bound)


def prime_decomposition(phi: Predicate) -> tuple[FinMap, Predicate]:
    """``φ = ∃_f ϖ`` with ``ϖ`` pointwise join-prime.

    ``J = {(i, a) : a join-prime, a <= φ(i)}``, ``f`` the first projection.
    """
    A = phi.frame
    if not has_enough_join_primes(A):
        raise NoDecomposition(f"{A.id} lacks enough join-prime elements")
    primes = join_primes(A)
    pairs = [(i, a) for i in range(len(phi.carrier)) for a in primes if A.leq[a, phi.values[i]]]
    J = FinSet(
        f"J({phi.carrier.id})",
        [(phi.carrier.elements[i], A.elements[a]) for i, a in pairs],
    )
    f = FinMap(J, phi.carrier, [i for i, _ in pairs])
    return f, Predicate(J, A, [a for _, a in pairs])
