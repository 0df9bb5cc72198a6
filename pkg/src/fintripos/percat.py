"""Partial equivalence relations, compatible maps and functional relations.

Objects are pairs ``(A, ρ)`` with ``ρ`` a symmetric, transitive predicate on
``A x A``.  Every axiom below is decided by evaluating an internal-language
judgment, so the definitions read exactly as they are stated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .doctrine import TRIPOS, Predicate, exists_along
from .errors import (
    BudgetExceeded, CarrierMismatch, EndpointMismatch, IncompatiblePredicate, NotAFunctionalRelation,
    NotAPer, NotCompatible,
)
from .finset import (
    FinMap, FinSet, compose, diagonal, enumerate_maps, pairing, product, pullback, terminal,
    to_terminal,
)
from .lang.interp import Evaluator, HoldsResult, Model, check_judgment
from .lang.parser import parse_formula, parse_judgment
from .lang.signature import Signature
from .order import FinFrame

HOM_BUDGET = 10**7

# -- judgments, as written in the internal language ----------------------------

SYM = "[x:A, y:A] rho(x,y) |- rho(y,x)"
TRANS = "[x:A, y:A, z:A] rho(x,y), rho(y,z) |- rho(x,z)"
COMPAT = "[x:A, y:A] rho(x,y) |- sig(f(x),f(y))"
FIB = "[x:A, u:B] rho(x,x), sig(f(x),u) |- ex y:A. rho(x,y) & f(y) = u"
INJ = "[x:A, y:A] rho(x,x), sig(f(x),f(y)), rho(y,y) |- rho(x,y)"
ESURJ = "[u:B] sig(u,u) |- ex x:A. rho(x,x) & sig(f(x),u)"
SURJ = "[u:B] sig(u,u) |- ex x:A. rho(x,x) & f(x) = u"
STRICT = "[x:A, u:B] phi(x,u) |- rho(x,x) & sig(u,u)"
CONG = "[x:A, y:A, u:B, v:B] rho(y,x), phi(x,u), sig(u,v) |- phi(y,v)"
SINGVAL = "[x:A, u:B, v:B] phi(x,u), phi(x,v) |- sig(u,v)"
TOT = "[x:A] rho(x,x) |- ex u:B. phi(x,u)"
INJ_STAR = "[x:A, y:A, u:B] phi(x,u), phi(y,u) |- rho(x,y)"
ESURJ_STAR = "[u:B] sig(u,u) |- ex x:A. phi(x,u)"
HOMOTOPY = "[x:A] rho(x,x) |- sig(f(x),g(x))"
RESTRICT_SUPPORT = "[x:A] phi(x) |- rho(x,x)"
RESTRICT_CLOSED = "[x:A, y:A] phi(x), rho(x,y) |- phi(y)"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a conjunction of named judgments; ``failed`` names the first that fails."""

    ok: bool
    failed: str | None = None
    witness: object = None
    judgment: str | None = None

    def __bool__(self) -> bool:
        return self.ok


class Judge:
    """A signature over the given sorts and symbols, with one shared evaluator."""

    def __init__(self, frame: FinFrame, sorts: dict, rels: dict = (), funs: dict = (), defs=()):
        sig = Signature(frame, TRIPOS)
        for name, s in sorts.items():
            sig.add_sort(name, s)
        for name, (args, pred) in dict(rels).items():
            sig.add_relation(name, args, pred)
        for name, (args, res, fmap) in dict(funs).items():
            sig.add_function(name, args, res, fmap)
        # defs: (name, ((param, sort), ...), body text), each may use the earlier ones
        for name, params, body in defs:
            sig.add_definition(name, params, parse_formula(body, sig, tuple(params)))
        self.sig = sig
        self.ev = Evaluator(Model.from_signature(sig))

    def check(self, text: str) -> HoldsResult:
        return check_judgment(self.sig, parse_judgment(text, self.sig), self.ev)

    def all(self, named: Iterable[tuple[str, str]]) -> Verdict:
        for name, text in named:
            r = self.check(text)
            if not r.holds:
                return Verdict(False, name, r.witness, text)
        return Verdict(True)

    def predicate(self, ctx, text: str) -> Predicate:
        ctx = tuple(ctx)
        p = parse_formula(text, self.sig, ctx)
        codes = np.broadcast_to(self.ev.formula(ctx, p), (1, self.ev.size(ctx)))[0]
        return Predicate.from_codes(self.sig.context_set(ctx), self.sig.frame, codes)


# -- objects and morphisms -----------------------------------------------------


def _square(A: FinSet) -> FinSet:
    return product(A, A).apex


def is_per(A: FinSet, rho: Predicate) -> Verdict:
    if rho.carrier != _square(A):
        raise CarrierMismatch(f"relation does not live on {A.id} x {A.id}")
    j = Judge(rho.frame, {"A": A}, {"rho": (("A", "A"), rho)})
    return j.all((("sym", SYM), ("trans", TRANS)))


class PerObject:
    """``(A, ρ)``; ``support`` is ``ρ0 = δ*ρ``."""

    __slots__ = ("carrier", "rel", "name", "_support")

    def __init__(self, carrier: FinSet, rel: Predicate, name: str | None = None, check: bool = True):
        if rel.carrier != _square(carrier):
            raise CarrierMismatch(f"relation does not live on {carrier.id} x {carrier.id}")
        if check:
            v = is_per(carrier, rel)
            if not v:
                raise NotAPer(f"({v.failed}) fails at {v.witness!r}")
        self.carrier = carrier
        self.rel = rel
        self.name = name or carrier.id
        self._support = None

    @property
    def frame(self) -> FinFrame:
        return self.rel.frame

    @property
    def support(self) -> Predicate:
        if self._support is None:
            n = len(self.carrier)
            self._support = Predicate(self.carrier, self.frame, self.rel.values[np.arange(n) * (n + 1)])
        return self._support

    def matrix(self) -> np.ndarray:
        """``ρ`` as an ``n x n`` array of element indices."""
        n = len(self.carrier)
        return self.rel.values.reshape(n, n)

    def code_matrix(self) -> np.ndarray:
        n = len(self.carrier)
        return self.rel.codes.reshape(n, n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PerObject):
            return NotImplemented
        return self.carrier == other.carrier and self.rel == other.rel

    def __hash__(self) -> int:
        return hash((self.carrier, self.rel))

    def __repr__(self) -> str:
        return f"PerObject({self.name}, |A|={len(self.carrier)}, frame={self.frame.id})"

    @classmethod
    def from_matrix(cls, carrier: FinSet, frame: FinFrame, values, name=None, check=True) -> "PerObject":
        return cls(carrier, Predicate(_square(carrier), frame, np.asarray(values).reshape(-1)), name, check)


def morphism_judge(src: PerObject, dst: PerObject, fmap: FinMap, extra_funs: dict | None = None) -> Judge:
    funs = {"f": (("A",), "B", fmap)}
    funs.update(extra_funs or {})
    return Judge(
        src.frame, {"A": src.carrier, "B": dst.carrier},
        {"rho": (("A", "A"), src.rel), "sig": (("B", "B"), dst.rel)}, funs,
    )


def is_compat(src: PerObject, dst: PerObject, fmap: FinMap) -> Verdict:
    if fmap.dom != src.carrier or fmap.cod != dst.carrier:
        raise CarrierMismatch("map endpoints do not match the objects' carriers")
    return morphism_judge(src, dst, fmap).all((("compat", COMPAT),))


class PerMorphism:
    __slots__ = ("src", "dst", "map", "_judge")

    def __init__(self, src: PerObject, dst: PerObject, fmap: FinMap, check: bool = True):
        if fmap.dom != src.carrier or fmap.cod != dst.carrier:
            raise CarrierMismatch("map endpoints do not match the objects' carriers")
        self.src, self.dst, self.map = src, dst, fmap
        self._judge = None
        if check:
            v = self.judge.all((("compat", COMPAT),))
            if not v:
                raise NotCompatible(f"(compat) fails at {v.witness!r}")

    @property
    def judge(self) -> Judge:
        if self._judge is None:
            self._judge = morphism_judge(self.src, self.dst, self.map)
        return self._judge

    def __eq__(self, other) -> bool:
        if not isinstance(other, PerMorphism):
            return NotImplemented
        return self.src == other.src and self.dst == other.dst and self.map == other.map

    def __hash__(self) -> int:
        return hash((self.src, self.dst, self.map))

    def __repr__(self) -> str:
        return f"PerMorphism({self.src.name} -> {self.dst.name}, {self.map.table.tolist()})"

    @classmethod
    def identity(cls, X: PerObject) -> "PerMorphism":
        return cls(X, X, FinMap.identity(X.carrier), check=False)


def compose_per(g: PerMorphism, f: PerMorphism) -> PerMorphism:
    if f.dst != g.src:
        raise EndpointMismatch("cannot compose: middle objects differ")
    return PerMorphism(f.src, g.dst, compose(g.map, f.map), check=False)


def nabla(A: FinSet, frame: FinFrame) -> PerObject:
    """``∇A = (A, ⊤)``, right adjoint to the forgetful functor."""
    return PerObject(A, Predicate.top(_square(A), frame), f"nabla({A.id})", check=False)


def per_terminal(frame: FinFrame) -> PerObject:
    return nabla(terminal(), frame)


def terminal_projection(X: PerObject) -> PerMorphism:
    return PerMorphism(X, per_terminal(X.frame), to_terminal(X.carrier), check=False)


def enumerate_morphisms(X: PerObject, Y: PerObject) -> list[PerMorphism]:
    """Every compatible map, in the order of :func:`enumerate_maps`."""
    rx, ry = X.code_matrix(), Y.code_matrix()
    out = []
    for m in enumerate_maps(X.carrier, Y.carrier):
        t = m.table
        if not np.any(rx & ~ry[np.ix_(t, t)]):
            out.append(PerMorphism(X, Y, m, check=False))
    return out


# -- limits --------------------------------------------------------------------


@dataclass(frozen=True)
class PerCone:
    apex: PerObject
    legs: tuple[PerMorphism, PerMorphism]
    mediator: Callable[[PerMorphism, PerMorphism], PerMorphism] = field(compare=False)


def per_pullback(f: PerMorphism, g: PerMorphism) -> PerCone:
    """``(D, ρ ⋈_C σ)`` with ``(ρ ⋈_C σ)(p, q) ≡ ρ(hp, hq) ∧ σ(kp, kq)``."""
    if f.dst != g.dst:
        raise EndpointMismatch("pullback needs a common codomain object")
    cone = pullback(f.map, g.map)
    h, k = cone.legs
    D = cone.apex
    X, Y = f.src, g.src
    j = Judge(
        X.frame, {"D": D, "A": X.carrier, "B": Y.carrier},
        {"rho": (("A", "A"), X.rel), "sig": (("B", "B"), Y.rel)},
        {"h": (("D",), "A", h), "k": (("D",), "B", k)},
    )
    rel = j.predicate((("p", "D"), ("q", "D")), "rho(h(p),h(q)) & sig(k(p),k(q))")
    apex = PerObject(D, rel, f"{X.name}x{Y.name}", check=False)
    hl = PerMorphism(apex, X, h, check=False)
    kl = PerMorphism(apex, Y, k, check=False)

    def mediator(h2: PerMorphism, k2: PerMorphism) -> PerMorphism:
        if h2.src != k2.src:
            raise EndpointMismatch("competing cone legs have different sources")
        m = cone.mediator(h2.map, k2.map)
        return PerMorphism(h2.src, apex, m, check=True)

    return PerCone(apex, (hl, kl), mediator)


def per_product(X: PerObject, Y: PerObject) -> PerCone:
    return per_pullback(terminal_projection(X), terminal_projection(Y))


# -- fibrations and weak equivalences -------------------------------------------


def is_fibration(f: PerMorphism) -> Verdict:
    return f.judge.all((("fib", FIB),))


def is_weak_equivalence(f: PerMorphism) -> Verdict:
    return f.judge.all((("inj", INJ), ("esurj", ESURJ)))


def is_trivial_fibration(f: PerMorphism) -> Verdict:
    """Decided as (inj) ∧ (surj)."""
    return f.judge.all((("inj", INJ), ("surj", SURJ)))


def surj_variable_free(f: PerMorphism) -> bool:
    """``σ0 = ∃_f ρ0``."""
    return exists_along(f.map, f.src.support) == f.dst.support


@dataclass(frozen=True)
class TrivialFibrationCrosscheck:
    inj_surj: bool
    fib_inj_esurj: bool
    surj_judgment: bool
    surj_equation: bool

    @property
    def consistent(self) -> bool:
        return self.inj_surj == self.fib_inj_esurj and self.surj_judgment == self.surj_equation


def crosscheck_trivial_fibration(f: PerMorphism) -> TrivialFibrationCrosscheck:
    j = f.judge
    inj = j.check(INJ).holds
    surj = j.check(SURJ).holds
    fib = j.check(FIB).holds
    esurj = j.check(ESURJ).holds
    return TrivialFibrationCrosscheck(inj and surj, fib and inj and esurj, surj, surj_variable_free(f))


# -- restriction and path objects ------------------------------------------------


def is_compatible_predicate(X: PerObject, phi: Predicate) -> Verdict:
    if phi.carrier != X.carrier:
        raise CarrierMismatch("predicate must live on the object's carrier")
    j = Judge(X.frame, {"A": X.carrier}, {"rho": (("A", "A"), X.rel), "phi": (("A",), phi)})
    return j.all((("support", RESTRICT_SUPPORT), ("closed", RESTRICT_CLOSED)))


def restrict(X: PerObject, phi: Predicate, check: bool = True) -> PerObject:
    """``(A, ρ|φ)`` with ``ρ|φ(x, y) ≡ ρ(x, y) ∧ φ(x)``."""
    if check:
        v = is_compatible_predicate(X, phi)
        if not v:
            raise IncompatiblePredicate(f"({v.failed}) fails at {v.witness!r}")
    j = Judge(X.frame, {"A": X.carrier}, {"rho": (("A", "A"), X.rel), "phi": (("A",), phi)})
    rel = j.predicate((("x", "A"), ("y", "A")), "rho(x,y) & phi(x)")
    return PerObject(X.carrier, rel, f"{X.name}|", check=False)


def restriction_inclusion(X: PerObject, phi: Predicate) -> PerMorphism:
    return PerMorphism(restrict(X, phi), X, FinMap.identity(X.carrier), check=True)


@dataclass(frozen=True)
class PathObject:
    total: PerObject
    section: PerMorphism
    fibration: PerMorphism
    square: PerObject  # X x X


def path_object(X: PerObject) -> PathObject:
    """``X --s--> (A x A, ρ~) --d--> X x X`` with maps ``δ`` and ``id``;
    ``ρ~((x,y),(x',y')) ≡ ρ(x,x') ∧ ρ(y,y') ∧ ρ(x,y)``."""
    A = X.carrier
    sq = product(A, A)
    p1, p2 = sq.legs
    j = Judge(
        X.frame, {"A": A, "P": sq.apex}, {"rho": (("A", "A"), X.rel)},
        {"fst": (("P",), "A", p1), "snd": (("P",), "A", p2)},
    )
    rel = j.predicate(
        (("p", "P"), ("q", "P")), "rho(fst(p),fst(q)) & rho(snd(p),snd(q)) & rho(fst(p),snd(p))"
    )
    total = PerObject(sq.apex, rel, f"P({X.name})", check=False)
    XX = per_product(X, X).apex
    s = PerMorphism(X, total, diagonal(A), check=False)
    d = PerMorphism(total, XX, FinMap.identity(sq.apex), check=False)
    return PathObject(total, s, d, XX)


# -- functional relations ------------------------------------------------------------


def funrel_judge(src: PerObject, dst: PerObject, pred: Predicate) -> Judge:
    return Judge(
        src.frame, {"A": src.carrier, "B": dst.carrier},
        {"rho": (("A", "A"), src.rel), "sig": (("B", "B"), dst.rel), "phi": (("A", "B"), pred)},
    )


FUNREL_AXIOMS = (("strict", STRICT), ("cong", CONG), ("singval", SINGVAL), ("tot", TOT))


def is_funrel(src: PerObject, dst: PerObject, pred: Predicate) -> Verdict:
    if pred.carrier != product(src.carrier, dst.carrier).apex:
        raise CarrierMismatch("functional relation must live on A x B")
    return funrel_judge(src, dst, pred).all(FUNREL_AXIOMS)


class FunctionalRelation:
    __slots__ = ("src", "dst", "pred")

    def __init__(self, src: PerObject, dst: PerObject, pred: Predicate, check: bool = True):
        if pred.carrier != product(src.carrier, dst.carrier).apex:
            raise CarrierMismatch("functional relation must live on A x B")
        if check:
            v = is_funrel(src, dst, pred)
            if not v:
                raise NotAFunctionalRelation(f"({v.failed}) fails at {v.witness!r}")
        self.src, self.dst, self.pred = src, dst, pred

    def __eq__(self, other) -> bool:
        if not isinstance(other, FunctionalRelation):
            return NotImplemented
        return self.src == other.src and self.dst == other.dst and self.pred == other.pred

    def __hash__(self) -> int:
        return hash((self.src, self.dst, self.pred))

    def __repr__(self) -> str:
        return f"FunctionalRelation({self.src.name} -> {self.dst.name})"

    def matrix(self) -> np.ndarray:
        return self.pred.values.reshape(len(self.src.carrier), len(self.dst.carrier))

    def is_valid(self) -> Verdict:
        return is_funrel(self.src, self.dst, self.pred)


def id_funrel(X: PerObject) -> FunctionalRelation:
    return FunctionalRelation(X, X, X.rel, check=False)


def compose_funrel(gamma: FunctionalRelation, phi: FunctionalRelation) -> FunctionalRelation:
    """``(γ∘φ)(x, r) ≡ ∃u. φ(x, u) ∧ γ(u, r)``."""
    if phi.dst != gamma.src:
        raise EndpointMismatch("cannot compose functional relations: middle objects differ")
    X, Y, Z = phi.src, phi.dst, gamma.dst
    j = Judge(
        X.frame, {"A": X.carrier, "B": Y.carrier, "C": Z.carrier},
        {"phi": (("A", "B"), phi.pred), "gam": (("B", "C"), gamma.pred)},
    )
    pred = j.predicate((("x", "A"), ("r", "C")), "ex u:B. phi(x,u) & gam(u,r)")
    return FunctionalRelation(X, Z, pred, check=False)


def reciprocal(phi: FunctionalRelation) -> FunctionalRelation:
    """``φ°(u, x) ≡ φ(x, u)``; a functional relation exactly when ``φ`` is iso."""
    na, nb = len(phi.src.carrier), len(phi.dst.carrier)
    vals = phi.pred.values.reshape(na, nb).T.reshape(-1)
    carrier = product(phi.dst.carrier, phi.src.carrier).apex
    return FunctionalRelation(phi.dst, phi.src, Predicate(carrier, phi.pred.frame, vals), check=False)


def is_iso_funrel(phi: FunctionalRelation) -> Verdict:
    j = funrel_judge(phi.src, phi.dst, phi.pred)
    return j.all((("inj*", INJ_STAR), ("esurj*", ESURJ_STAR)))


def inverse_check(phi: FunctionalRelation) -> bool:
    """Is ``φ°`` a two-sided inverse of ``φ`` (on the nose)?"""
    r = reciprocal(phi)
    return (
        compose_funrel(r, phi) == id_funrel(phi.src)
        and compose_funrel(phi, r) == id_funrel(phi.dst)
    )


def E(f: PerMorphism) -> FunctionalRelation:
    """``E(f)(x, u) ≡ ρx ∧ σ(fx, u)``."""
    pred = f.judge.predicate((("x", "A"), ("u", "B")), "rho(x,x) & sig(f(x),u)")
    return FunctionalRelation(f.src, f.dst, pred, check=False)


# -- localization ----------------------------------------------------------------------


@dataclass(frozen=True)
class Span:
    apex: PerObject
    left: PerMorphism
    right: PerMorphism


def span_factorization(phi: FunctionalRelation) -> Span:
    """``X <- (A x B, (ρ ⋈ σ)|φ) -> Y`` with projection maps."""
    prod = per_product(phi.src, phi.dst)
    apex = restrict(prod.apex, Predicate(prod.apex.carrier, phi.pred.frame, phi.pred.values), check=False)
    l, r = prod.legs
    return Span(
        apex,
        PerMorphism(apex, phi.src, l.map, check=False),
        PerMorphism(apex, phi.dst, r.map, check=False),
    )


def span_equation_holds(phi: FunctionalRelation, span: Span | None = None) -> bool:
    """``φ ∘ E(φ_l) = E(φ_r)``."""
    span = span or span_factorization(phi)
    return compose_funrel(phi, E(span.left)) == E(span.right)


def via_span(phi: FunctionalRelation, span: Span | None = None) -> FunctionalRelation:
    """``E(φ_r) ∘ E(φ_l)^{-1}``, the inverse taken as the reciprocal."""
    span = span or span_factorization(phi)
    return compose_funrel(E(span.right), reciprocal(E(span.left)))


@dataclass(frozen=True)
class CompositionReplay:
    direct_equals_factored: bool
    legs_trivial: bool
    partials_trivial: bool
    squares_commute: bool

    @property
    def ok(self) -> bool:
        return self.direct_equals_factored and self.legs_trivial and self.partials_trivial and self.squares_commute


def composition_replay(phi: FunctionalRelation, gamma: FunctionalRelation) -> CompositionReplay:
    """Replays the three-span diagram for ``γ ∘ φ``.

    ``ξ(x,u,r) ≡ φ(x,u) ∧ γ(u,r)`` on ``A x (B x C)`` restricts ``ρ ⋈ σ ⋈ τ``;
    ``∂1, ∂2, ∂0`` are the projections onto ``A x C``, ``A x B`` and ``B x C``.
    """
    X, Y, Z = phi.src, phi.dst, gamma.dst
    theta = compose_funrel(gamma, phi)
    sp_phi, sp_gam, sp_theta = span_factorization(phi), span_factorization(gamma), span_factorization(theta)

    yz = per_product(Y, Z)
    xyz = per_product(X, yz.apex)
    j = Judge(
        X.frame, {"A": X.carrier, "B": Y.carrier, "C": Z.carrier},
        {"phi": (("A", "B"), phi.pred), "gam": (("B", "C"), gamma.pred)},
    )
    xi = j.predicate((("x", "A"), ("u", "B"), ("r", "C")), "phi(x,u) & gam(u,r)")
    big = restrict(xyz.apex, Predicate(xyz.apex.carrier, X.frame, xi.values), check=False)

    n_a, n_b, n_c = len(X.carrier), len(Y.carrier), len(Z.carrier)
    idx = np.arange(n_a * n_b * n_c)
    a, b, c = idx // (n_b * n_c), (idx // n_c) % n_b, idx % n_c
    d1 = PerMorphism(big, sp_theta.apex, FinMap(big.carrier, sp_theta.apex.carrier, a * n_c + c), check=False)
    d2 = PerMorphism(big, sp_phi.apex, FinMap(big.carrier, sp_phi.apex.carrier, a * n_b + b), check=False)
    d0 = PerMorphism(big, sp_gam.apex, FinMap(big.carrier, sp_gam.apex.carrier, b * n_c + c), check=False)

    legs = all(
        is_trivial_fibration(m).ok and is_compat(m.src, m.dst, m.map).ok
        for m in (sp_phi.left, sp_gam.left, sp_theta.left)
    )
    partials = all(
        is_compat(m.src, m.dst, m.map).ok and is_trivial_fibration(m).ok for m in (d1, d2)
    ) and is_compat(d0.src, d0.dst, d0.map).ok
    squares = (
        compose(sp_phi.left.map, d2.map) == compose(sp_theta.left.map, d1.map)
        and compose(sp_phi.right.map, d2.map) == compose(sp_gam.left.map, d0.map)
        and compose(sp_gam.right.map, d0.map) == compose(sp_theta.right.map, d1.map)
    )
    # F(γ_r) F(γ_l)^-1 F(φ_r) F(φ_l)^-1 with F = E
    factored = compose_funrel(via_span(gamma, sp_gam), via_span(phi, sp_phi))
    return CompositionReplay(factored == theta, legs, partials, squares)


# -- homotopy ---------------------------------------------------------------------------


def _parallel(f: PerMorphism, g: PerMorphism):
    if f.src != g.src or f.dst != g.dst:
        raise EndpointMismatch("homotopy needs parallel morphisms")


def homotopic(f: PerMorphism, g: PerMorphism) -> bool:
    """Decided by the judgment ``ρx ⊢ σ(fx, gx)``."""
    _parallel(f, g)
    j = morphism_judge(f.src, f.dst, f.map, {"g": (("A",), "B", g.map)})
    return j.check(HOMOTOPY).holds


@dataclass(frozen=True)
class HomotopyCriteria:
    same_image: bool
    judgment: bool
    path_factorization: bool

    @property
    def agree(self) -> bool:
        return self.same_image == self.judgment == self.path_factorization


def homotopy_criteria(f: PerMorphism, g: PerMorphism) -> HomotopyCriteria:
    _parallel(f, g)
    po = path_object(f.dst)
    fg = pairing(f.map, g.map)
    # d has identity as underlying map, so a factorization exists iff <f,g> is compatible into ρ~
    factors = any(
        compose(po.fibration.map, h) == fg and is_compat(f.src, po.total, h).ok
        for h in (FinMap(f.src.carrier, po.total.carrier, fg.table),)
    )
    return HomotopyCriteria(E(f) == E(g), homotopic(f, g), factors)


# -- hom-set enumeration --------------------------------------------------------------


def funrel_search_size(X: PerObject, Y: PerObject) -> int:
    return X.frame.n ** (len(X.carrier) * len(Y.carrier))


def enumerate_funrels(X: PerObject, Y: PerObject, budget: int = HOM_BUDGET) -> list[FunctionalRelation]:
    """The hom-set ``C[P](X, Y)``; refuses when ``|frame|^(|A||B|)`` exceeds ``budget``."""
    est = funrel_search_size(X, Y)
    if est > budget:
        raise BudgetExceeded(f"functional relations {X.name} -> {Y.name}", est, budget)
    fr = X.frame
    rows = kernels.enumerate_funrels(X.code_matrix(), Y.code_matrix(), fr.code)
    carrier = product(X.carrier, Y.carrier).apex
    return [
        FunctionalRelation(X, Y, Predicate.from_codes(carrier, fr, r), check=False) for r in rows
    ]


@lru_cache(maxsize=256)
def _per_codes(n: int, frame: FinFrame) -> np.ndarray:
    return kernels.enumerate_pers(n, frame.code)


def enumerate_pers(A: FinSet, frame: FinFrame) -> list[PerObject]:
    """Every PER on ``A`` over ``frame``."""
    rows = _per_codes(len(A), frame)
    sq = _square(A)
    return [PerObject(A, Predicate.from_codes(sq, frame, r), check=False) for r in rows]


@dataclass
class HomTable:
    src: PerObject
    dst: PerObject
    maps: list
    classes: list  # lists of indices into maps, one per homotopy class
    funrels: int
    images: int  # distinct E-images

    @property
    def faithful(self) -> bool:
        """Distinct homotopy classes have distinct images."""
        return self.images == len(self.classes)


@dataclass
class QuotientCategory:
    objects: list
    homs: dict

    @property
    def full_then_faithful(self) -> bool:
        return all(h.faithful for h in self.homs.values())


def quotient_category(objects: Sequence[PerObject], budget: int = HOM_BUDGET) -> QuotientCategory:
    """Homs of ``C<P>`` modulo homotopy, with their images in ``C[P]``."""
    homs = {}
    for i, X in enumerate(objects):
        for k, Y in enumerate(objects):
            maps = enumerate_morphisms(X, Y)
            classes: list[list[int]] = []
            for n, m in enumerate(maps):
                for cl in classes:
                    if homotopic(maps[cl[0]], m):
                        cl.append(n)
                        break
                else:
                    classes.append([n])
            images = {E(m).pred for m in maps}
            funrels = len(enumerate_funrels(X, Y, budget))
            homs[(i, k)] = HomTable(X, Y, maps, classes, funrels, len(images))
    return QuotientCategory(list(objects), homs)


def nabla_adjunction_holds(X: PerObject, B: FinSet) -> bool:
    """``C<P>(X, ∇B) ≅ C(UX, B)``: every map is compatible into ``∇B``."""
    return len(enumerate_morphisms(X, nabla(B, X.frame))) == len(B) ** len(X.carrier)
