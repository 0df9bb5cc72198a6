"""Replacements and derived functors along meet-preserving frame maps.

A meet-preserving map ``Φ: L -> M`` acts pointwise on predicates, hence on
PERs and compatible maps (``C<Φ>``).  Its derived functors are computed by
replacing objects (cofibrantly on the left, proto-fibrantly on the right),
lifting the conjugated functional relation to an honest map, and pushing that
map through ``C<Φ>``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .doctrine import POWER_BUDGET, REGULAR, TRIPOS, Predicate, power_object, prime_decomposition
from .errors import (
    BudgetExceeded, CarrierMismatch, EndpointMismatch, LiftCheckFailed, NoDecomposition,
    NotMeetPreserving, UnsupportedInMode,
)
from .finset import FinMap, FinSet, compose, enumerate_maps, product
from .order import (
    FinFrame, FinPoset, MonotoneMap, has_enough_join_primes, lower_sets, map_class, preserves_meets,
    two_chain, vee_poset,
)
from .percat import (
    ESURJ, INJ, FunctionalRelation, Judge, PerMorphism, PerObject, E, compose_funrel,
    enumerate_funrels, id_funrel, is_compat, is_trivial_fibration, reciprocal,
)

# ρ̄(m, n), with membership ``in`` and the original relation ``rho``; the
# extensionality conjunct is what makes ⌜ρ⌝ essentially surjective
POWER_REL = (
    "(all x:A. in(x,m) <=> in(x,n))"
    " & (all x:A. all y:A. in(x,m) & in(y,m) => rho(x,y))"
    " & (all x:A. all y:A. in(x,m) & rho(x,y) => in(y,m))"
    " & (ex x:A. in(x,m))"
)
DENSE_PAIRS = 4 * 10**6


# -- C<Φ> -------------------------------------------------------------------------


class CartesianTransform:
    """A meet-preserving (hence cartesian) map between frames, applied pointwise."""

    def __init__(self, fmap: MonotoneMap):
        if not (isinstance(fmap.dom, FinFrame) and isinstance(fmap.cod, FinFrame)):
            raise NotMeetPreserving("both ends must be frames")
        if not preserves_meets(fmap):
            raise NotMeetPreserving(f"{fmap!r} does not preserve finite meets")
        self.map = fmap

    @property
    def source(self) -> FinFrame:
        return self.map.dom

    @property
    def target(self) -> FinFrame:
        return self.map.cod

    @classmethod
    def identity(cls, frame: FinFrame) -> "CartesianTransform":
        return cls(MonotoneMap.identity(frame))

    @cached_property
    def by_code(self) -> np.ndarray:
        """Target element index for every source code."""
        out = np.full(len(self.source.decode), -1, dtype=np.int64)
        out[self.source.code] = self.map.table
        return out

    def __call__(self, phi: Predicate) -> Predicate:
        if phi.frame != self.source:
            raise CarrierMismatch("predicate is not valued in the source frame")
        return Predicate(phi.carrier, self.target, self.map.table[phi.values])

    def __repr__(self) -> str:
        return f"CartesianTransform({self.source.id} -> {self.target.id})"


def c_phi(phi: CartesianTransform, x):
    """``C<Φ>`` on a PerObject, PerMorphism or functional relation (same carriers)."""
    if isinstance(x, PerObject):
        return PerObject(x.carrier, phi(x.rel), x.name, check=False)
    if isinstance(x, PerMorphism):
        return PerMorphism(c_phi(phi, x.src), c_phi(phi, x.dst), x.map, check=False)
    if isinstance(x, FunctionalRelation):
        return FunctionalRelation(c_phi(phi, x.src), c_phi(phi, x.dst), phi(x.pred), check=False)
    raise TypeError(f"cannot apply C<Φ> to {type(x).__name__}")


# -- counting classes -------------------------------------------------------------


def global_section_count(X: PerObject) -> int:
    """Classes of ``{x : ρ(x,x) = ⊤}`` under ``ρ(x,y) = ⊤``; the cardinality for 2-valued PERs."""
    top = X.frame.top
    m = X.matrix() == top
    sup = np.flatnonzero(np.diag(m))
    if sup.size == 0:
        return 0
    src, dst = np.nonzero(m[np.ix_(sup, sup)])
    roots = kernels.classify_names(sup.size, src, dst)
    return int(np.unique(roots).size)


def section_count(X: PerObject, level: int) -> int:
    """Classes of ``{x : level <= ρ0(x)}`` under ``level <= ρ(x,y)``."""
    fr = X.frame
    m = fr.leq[level][X.matrix()]
    sup = np.flatnonzero(np.diag(m))
    if sup.size == 0:
        return 0
    src, dst = np.nonzero(m[np.ix_(sup, sup)])
    return int(np.unique(kernels.classify_names(sup.size, src, dst)).size)


# -- replacements ------------------------------------------------------------------

COFIBRANT = "cofibrant"
PROTOFIBRANT = "protofibrant"


@dataclass
class Replacement:
    """``direction`` is ``cofibrant`` (arrow: replaced -> original, a trivial
    fibration) or ``protofibrant`` (arrow: original -> replaced, a weak equivalence)."""

    original: PerObject
    direction: str
    arrow_map: FinMap
    _replaced: PerObject | None = field(default=None, repr=False)
    power: "PowerPer | None" = field(default=None, repr=False)

    @property
    def replaced(self) -> PerObject:
        if self._replaced is None:
            self._replaced = self.power.dense()
        return self._replaced

    @property
    def arrow(self) -> PerMorphism:
        if self.direction == COFIBRANT:
            return PerMorphism(self.replaced, self.original, self.arrow_map, check=False)
        return PerMorphism(self.original, self.replaced, self.arrow_map, check=False)

    def arrow_ok(self) -> bool:
        """Trivial fibration (cofibrant side) or weak equivalence (protofibrant side)."""
        if self.direction == COFIBRANT:
            return is_compat(self.replaced, self.original, self.arrow_map).ok and is_trivial_fibration(self.arrow).ok
        return self.power.arrow_is_weq()


def cofibrant_replacement(X: PerObject) -> Replacement:
    """Carrier ``{(x, p) : p join-prime, p <= ρ0(x)}`` over ``X`` by first projection,
    with ``τ(c, c') = ϖ(c) ∧ ϖ(c') ∧ ρ(ec, ec')``."""
    if not has_enough_join_primes(X.frame):
        raise NoDecomposition(f"{X.frame.id} lacks enough join-prime elements")
    e, w = prime_decomposition(X.support)
    C = e.dom
    j = Judge(
        X.frame, {"C": C, "A": X.carrier},
        {"w": (("C",), w), "rho": (("A", "A"), X.rel)}, {"e": (("C",), "A", e)},
    )
    tau = j.predicate((("c", "C"), ("d", "C")), "w(c) & w(d) & rho(e(c),e(d))")
    Xt = PerObject(C, tau, f"cof({X.name})", check=False)
    return Replacement(X, COFIBRANT, e, Xt)


class PowerPer:
    """``(𝒫(A), ρ̄)`` evaluated on demand from name tables in Birkhoff codes."""

    def __init__(self, X: PerObject, budget: int | None = POWER_BUDGET):
        self.X = X
        self.frame = X.frame
        self.po = power_object(X.carrier, X.frame, budget if budget is not None else float("inf"))
        names = self.po.names()
        self.codes = self.frame.code[names]  # (M, k)
        self.rho = X.code_matrix()

    @property
    def size(self) -> int:
        return len(self.codes)

    @cached_property
    def support_codes(self) -> np.ndarray:
        """``ρ̄(m, m)``: single-valued ∧ extensional ∧ inhabited."""
        c, imp, k = self.codes, self.frame.imp_code, self.codes.shape[1]
        strict = np.full(len(c), self.frame.top_code, dtype=np.int64)
        for x in range(k):
            for y in range(k):
                strict &= imp[c[:, x] & c[:, y], self.rho[x, y]]
                strict &= imp[c[:, x] & self.rho[x, y], c[:, y]]
        ex = np.bitwise_or.reduce(c, axis=1) if k else np.zeros(len(c), dtype=np.int64)
        return strict & ex

    def block(self, rows, cols) -> np.ndarray:
        """``ρ̄(m, n)`` codes for ``m`` in rows and ``n`` in cols."""
        imp = self.frame.imp_code
        a = self.codes[rows][:, None, :]
        b = self.codes[cols][None, :, :]
        eq = np.bitwise_and.reduce(imp[a, b] & imp[b, a], axis=2, initial=self.frame.top_code)
        return eq & self.support_codes[rows][:, None]

    def dense(self) -> PerObject:
        """The relation as a PerObject, by interpreting the defining formula."""
        m = self.size
        if m * m > DENSE_PAIRS:
            raise BudgetExceeded(f"dense relation on 𝒫({self.X.name})", m * m, DENSE_PAIRS)
        rel = self.judge.predicate((("m", "B"), ("n", "B")), "sig(m,n)")
        return PerObject(self.po.powerset, rel, f"pow({self.X.name})", check=False)

    def dense_by_codes(self) -> Predicate:
        m = self.size
        idx = np.arange(m)
        codes = self.block(idx, idx).reshape(-1)
        return Predicate.from_codes(product(self.po.powerset, self.po.powerset).apex, self.frame, codes)

    @cached_property
    def name_map(self) -> FinMap:
        """``⌜ρ⌝ : A -> 𝒫(A)``."""
        n, k = self.frame.n, len(self.X.carrier)
        weights = n ** np.arange(k - 1, -1, -1, dtype=np.int64)
        return FinMap(self.X.carrier, self.po.powerset, self.X.matrix().T @ weights if k else [])

    @cached_property
    def judge(self) -> Judge:
        A, P = self.X.carrier, self.po.powerset
        memb = self.po.membership  # on A x P
        return Judge(
            self.frame, {"A": A, "B": P},
            {"rho": (("A", "A"), self.X.rel), "in": (("A", "B"), memb)},
            {"f": (("A",), "B", self.name_map)},
            defs=[("sig", (("m", "B"), ("n", "B")), POWER_REL)],
        )

    def arrow_is_weq(self) -> bool:
        return self.judge.all((("inj", INJ), ("esurj", ESURJ))).ok


def protofibrant_replacement(X: PerObject, mode: str = TRIPOS, force: bool = False) -> Replacement:
    """``⌜ρ⌝ : X -> (𝒫(A), ρ̄)``; refuses above ``10**6`` names unless ``force``."""
    if mode != TRIPOS:
        raise UnsupportedInMode("proto-fibrant replacement needs power objects (tripos mode)")
    pp = PowerPer(X, None if force else POWER_BUDGET)
    return Replacement(X, PROTOFIBRANT, pp.name_map, None, pp)


# -- lifts -------------------------------------------------------------------------


def constructive_lift_into_power(psi: FunctionalRelation, rep: Replacement) -> PerMorphism:
    """``h(t) = (y ↦ ⋁_m ψ(t, m) ∧ m(y))``, checked against ``E(h) = ψ``."""
    target = rep.replaced
    if psi.dst != target:
        raise EndpointMismatch("lift target must be the proto-fibrant replacement")
    pp, fr = rep.power, target.frame
    nt = len(psi.src.carrier)
    k = pp.codes.shape[1]
    pc = psi.pred.codes.reshape(nt, pp.size)
    hc = np.bitwise_or.reduce(pc[:, :, None] & pp.codes[None, :, :], axis=1) if nt else np.zeros((0, k), np.int64)
    weights = fr.n ** np.arange(k - 1, -1, -1, dtype=np.int64)
    idx = fr.decode[hc] @ weights if nt else np.zeros(0, np.int64)
    h = PerMorphism(psi.src, target, FinMap(psi.src.carrier, target.carrier, idx), check=False)
    _check_lift(h, psi)
    return h


def constructive_lift_from_cofibrant(psi: FunctionalRelation) -> PerMorphism:
    """Send ``c`` to the first ``b`` with ``τ0(c) <= ψ(c, b)``; the source needs
    pointwise join-prime support (as cofibrant replacements have)."""
    src, dst = psi.src, psi.dst
    fr = src.frame
    m = psi.matrix()
    out = []
    for c, p in enumerate(src.support.values):
        hits = np.flatnonzero(fr.leq[p][m[c]])
        if hits.size == 0:
            raise LiftCheckFailed(f"no target element covers the prime extent of {src.carrier.elements[c]!r}")
        out.append(int(hits[0]))
    h = PerMorphism(src, dst, FinMap(src.carrier, dst.carrier, out), check=False)
    _check_lift(h, psi)
    return h


def _check_lift(h: PerMorphism, psi: FunctionalRelation):
    v = is_compat(h.src, h.dst, h.map)
    if not v:
        raise LiftCheckFailed(f"lift is not compatible: {v.witness!r}")
    if E(h) != psi:
        raise LiftCheckFailed("E(lift) differs from the functional relation being lifted")


# -- bounded verification of the replacement properties ---------------------------


@dataclass(frozen=True)
class BoundedCheck:
    ok: bool
    bound: int
    instances: int


def verify_cofibrant(rep: Replacement, test_objects) -> BoundedCheck:
    """Every trivial fibration from a test object onto the replacement has a section."""
    Y = rep.replaced
    n = 0
    bound = 0
    for B in test_objects:
        if B.frame != Y.frame:
            continue
        bound = max(bound, len(B.carrier))
        for t in enumerate_maps(B.carrier, Y.carrier):
            pt = PerMorphism(B, Y, t, check=False)
            if not (is_compat(B, Y, t).ok and is_trivial_fibration(pt).ok):
                continue
            n += 1
            if not _has_section(pt):
                return BoundedCheck(False, bound, n)
    return BoundedCheck(True, bound, n)


def _has_section(t: PerMorphism) -> bool:
    B, Y = t.src, t.dst
    fibres = [np.flatnonzero(t.map.table == y).tolist() for y in range(len(Y.carrier))]
    for choice in itertools.product(*fibres):
        s = FinMap(Y.carrier, B.carrier, list(choice))
        if is_compat(Y, B, s).ok:
            return True
    return False


def verify_protofibrant(rep: Replacement, test_objects) -> BoundedCheck:
    """Every functional relation from a test object into the replacement lifts.

    Functional relations ``T -> X̄`` are exactly ``E(⌜ρ⌝) ∘ ψ`` for ``ψ : T -> X``.
    """
    X = rep.original
    iota = E(rep.arrow)
    n = 0
    bound = 0
    for T in test_objects:
        if T.frame != X.frame:
            continue
        bound = max(bound, len(T.carrier))
        for psi in enumerate_funrels(T, X):
            constructive_lift_into_power(compose_funrel(iota, psi), rep)
            n += 1
    return BoundedCheck(True, bound, n)


# -- derived functors ---------------------------------------------------------------

LEFT, RIGHT = "left", "right"


class DerivedFunctor:
    """``LΦ`` or ``RΦ`` on objects (as PERs over the target frame) and on
    functional relations (through constructive lifts)."""

    def __init__(self, side: str, transform: CartesianTransform, force: bool = False):
        self.side = side
        self.transform = transform
        self.force = force
        self._reps: dict = {}

    def replacement(self, X: PerObject) -> Replacement:
        rep = self._reps.get(X)
        if rep is None:
            if self.side == LEFT:
                rep = cofibrant_replacement(X)
            else:
                rep = protofibrant_replacement(X, force=self.force)
            self._reps[X] = rep
        return rep

    def obj(self, X: PerObject) -> PerObject:
        return c_phi(self.transform, self.replacement(X).replaced)

    def class_count(self, X: PerObject) -> int:
        """Global sections of the image object; never materializes power objects densely."""
        if self.side == LEFT:
            return global_section_count(self.obj(X))
        return power_class_count(self.replacement(X).power, self.transform)

    def comparison(self, X: PerObject) -> FunctionalRelation:
        """The image of the replacement arrow under ``E_Q ∘ C<Φ>``."""
        return E(c_phi(self.transform, self.replacement(X).arrow))

    def conjugate(self, f: FunctionalRelation) -> FunctionalRelation:
        rx, ry = self.replacement(f.src), self.replacement(f.dst)
        if self.side == LEFT:
            return compose_funrel(reciprocal(E(ry.arrow)), compose_funrel(f, E(rx.arrow)))
        return compose_funrel(E(ry.arrow), compose_funrel(f, reciprocal(E(rx.arrow))))

    def lift(self, f: FunctionalRelation) -> PerMorphism:
        psi = self.conjugate(f)
        if self.side == LEFT:
            return constructive_lift_from_cofibrant(psi)
        return constructive_lift_into_power(psi, self.replacement(f.dst))

    def hom(self, f: FunctionalRelation) -> FunctionalRelation:
        return E(c_phi(self.transform, self.lift(f)))

    def preserves_identity(self, X: PerObject) -> bool:
        return self.hom(id_funrel(X)) == id_funrel(self.obj(X))

    def preserves_composite(self, f: FunctionalRelation, g: FunctionalRelation) -> bool:
        return self.hom(compose_funrel(g, f)) == compose_funrel(self.hom(g), self.hom(f))


def right_derived(phi: CartesianTransform, mode: str = TRIPOS, force: bool = False) -> DerivedFunctor:
    if mode != TRIPOS:
        raise UnsupportedInMode("the right derived functor needs a tripos source")
    return DerivedFunctor(RIGHT, phi, force)


def left_derived(phi: CartesianTransform) -> DerivedFunctor:
    if not has_enough_join_primes(phi.source):
        raise NoDecomposition(f"{phi.source.id} lacks enough join-prime elements")
    return DerivedFunctor(LEFT, phi)


def power_class_count(pp: PowerPer, phi: CartesianTransform, block: int = 256) -> int:
    """Global sections of ``C<Φ>(𝒫(A), ρ̄)``: support first, then union-find over
    supported names, joining each name to the first name it is related to."""
    top = phi.target.top
    supported = np.flatnonzero(phi.by_code[pp.support_codes] == top)
    s = supported.size
    if s == 0:
        return 0
    src, dst = [], []
    for lo in range(0, s, block):
        rows = supported[lo:lo + block]
        hit = phi.by_code[pp.block(rows, supported)] == top
        first = hit.argmax(axis=1)
        src.append(np.arange(lo, lo + len(rows)))
        dst.append(first)
    roots = kernels.classify_names(s, np.concatenate(src), np.concatenate(dst))
    return int(np.unique(roots).size)


def power_class_count_keyed(pp: PowerPer, phi: CartesianTransform) -> int:
    """The same count for a two-element target, keyed by ``m ∧ a`` with ``a`` the
    least element sent to ``⊤``; used as an independent cross-check."""
    fr = phi.source
    tops = np.flatnonzero(phi.map.table == phi.target.top)
    a = fr.code[fr.meet_all(tops.tolist())]
    supported = np.flatnonzero(phi.by_code[pp.support_codes] == phi.target.top)
    keys = pp.codes[supported] & a
    return int(np.unique(keys, axis=0).shape[0]) if supported.size else 0


# -- the span example ---------------------------------------------------------------


@dataclass(frozen=True)
class Presheaf:
    """A presheaf on a finite poset: stalk labels per point and restriction tables
    ``maps[(q, p)][i]`` = index in ``stalks[q]`` of the restriction of ``stalks[p][i]``,
    for every ``q < p``."""

    poset: FinPoset
    stalks: dict
    maps: dict

    def sections(self, mask: int) -> list[tuple]:
        """Compatible families over the lower set ``mask``; entries are stalk indices (or None)."""
        P = self.poset
        pts = [i for i in range(P.n) if mask >> i & 1]
        out = []
        for vals in itertools.product(*(range(len(self.stalks[P.elements[i]])) for i in pts)):
            fam = dict(zip(pts, vals))
            ok = all(
                self.maps[(P.elements[q], P.elements[p])][fam[p]] == fam[q]
                for p in pts for q in pts if q != p and P.leq[q, p]
            )
            if ok:
                out.append(tuple(fam.get(i) for i in range(P.n)))
        return out


def presheaf_per(F: Presheaf) -> tuple[PerObject, FinFrame]:
    """Sections over nonempty lower sets, related on the lower set where they agree."""
    frame, _ = lower_sets(F.poset)
    P = F.poset
    elems, masks, labels = [], [], []
    for idx, mask in enumerate(frame.masks):
        if mask == 0:
            continue
        for s in F.sections(mask):
            elems.append(s)
            masks.append(mask)
            labels.append(
                "{" + ",".join(f"{P.elements[i]}:{F.stalks[P.elements[i]][v]}" for i, v in enumerate(s) if v is not None) + "}"
            )
    pos = {m: i for i, m in enumerate(frame.masks)}
    n = len(elems)
    vals = np.zeros((n, n), dtype=np.int64)
    for x in range(n):
        for y in range(n):
            agree = sum(1 << i for i in range(P.n) if elems[x][i] is not None and elems[x][i] == elems[y][i])
            vals[x, y] = pos[agree & masks[x] & masks[y]]
    A = FinSet("S", labels)
    return PerObject.from_matrix(A, frame, vals, "span"), frame


def span_presheaf(a: int, b: int, c: int, alpha, beta) -> Presheaf:
    P = vee_poset()
    stalks = {
        "l": [f"a{i + 1}" for i in range(a)],
        "r": [f"b{i + 1}" for i in range(b)],
        "top": [f"c{i + 1}" for i in range(c)],
    }
    return Presheaf(P, stalks, {("l", "top"): tuple(alpha), ("r", "top"): tuple(beta)})


def example_transform(frame: FinFrame) -> CartesianTransform:
    """``low(V) -> 2`` sending exactly the lower sets containing both ``l`` and ``r`` to ``1``."""
    Q = two_chain()
    P = vee_poset()
    both = (1 << P.index("l")) | (1 << P.index("r"))
    table = [Q.top if m & both == both else Q.bottom for m in frame.masks]
    return CartesianTransform(MonotoneMap(frame, Q, table))


@dataclass
class WorkedExample:
    sizes: tuple
    alpha: tuple
    beta: tuple
    injective: bool
    carrier_size: int
    names: int
    supported_names: int
    left_count: int
    right_count: int
    right_count_keyed: int
    oracle: dict
    encoding_ok: bool
    transform_class: str

    @property
    def left_verified(self) -> bool:
        return self.injective

    @property
    def ok(self) -> bool:
        left_ok = (self.left_count == self.oracle["full"]) if self.injective else True
        return (
            self.encoding_ok and left_ok and self.right_count == self.oracle["lr"]
            and self.right_count == self.right_count_keyed
        )


def worked_example(a: int, b: int, c: int, alpha, beta, force: bool = False) -> WorkedExample:
    """Derived functors of ``low(V) -> 2`` on the span ``A <-α- C -β-> B``."""
    alpha, beta = tuple(int(i) for i in alpha), tuple(int(i) for i in beta)
    if len(alpha) != c or len(beta) != c:
        raise ValueError("alpha and beta must give one value per element of C")
    if any(not 0 <= i < a for i in alpha) or any(not 0 <= i < b for i in beta):
        raise ValueError("alpha or beta leaves its codomain")
    F = span_presheaf(a, b, c, alpha, beta)
    X, frame = presheaf_per(F)
    phi = example_transform(frame)

    P = F.poset
    lr_mask = (1 << P.index("l")) | (1 << P.index("r"))
    full = frame.top
    lr = frame.masks.index(lr_mask)
    # independent oracle: count compatible families straight from the presheaf
    oracle = {"full": len(F.sections(frame.masks[full])), "lr": len(F.sections(lr_mask))}
    encoding_ok = section_count(X, full) == c and section_count(X, lr) == a * b
    encoding_ok = encoding_ok and oracle == {"full": c, "lr": a * b}

    L = left_derived(phi)
    R = right_derived(phi, force=force)
    pp = R.replacement(X).power
    return WorkedExample(
        sizes=(a, b, c),
        alpha=alpha,
        beta=beta,
        injective=len(set(zip(alpha, beta))) == c,
        carrier_size=len(X.carrier),
        names=pp.size,
        supported_names=int(np.count_nonzero(phi.by_code[pp.support_codes] == phi.target.top)),
        left_count=L.class_count(X),
        right_count=R.class_count(X),
        right_count_keyed=power_class_count_keyed(pp, phi),
        oracle=oracle,
        encoding_ok=encoding_ok,
        transform_class=map_class(phi.map),
    )
