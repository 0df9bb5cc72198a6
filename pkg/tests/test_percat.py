import itertools

import numpy as np
import pytest

from fintripos.doctrine import Predicate
from fintripos.errors import (
    BudgetExceeded, CarrierMismatch, EndpointMismatch, IncompatiblePredicate, NotAFunctionalRelation,
    NotAPer, NotCompatible,
)
from fintripos.finset import FinMap, FinSet, compose, diagonal, enumerate_maps, finset, product
from fintripos.order import antichain, boolean, chain, lower_sets, vee_poset
from fintripos.percat import (
    E, FunctionalRelation, PerMorphism, PerObject, compose_funrel, compose_per,
    composition_replay, crosscheck_trivial_fibration, enumerate_funrels, enumerate_morphisms,
    enumerate_pers, funrel_search_size, homotopic, homotopy_criteria, id_funrel, inverse_check,
    is_compat, is_compatible_predicate, is_fibration, is_funrel, is_iso_funrel, is_per,
    is_trivial_fibration, is_weak_equivalence, nabla, nabla_adjunction_holds, path_object,
    per_product, per_pullback, quotient_category, reciprocal, restrict, restriction_inclusion,
    span_equation_holds, span_factorization, via_span,
)

LOW_V, _ = lower_sets(vee_poset())
LOW_2, _ = lower_sets(chain(2))
LOW_ANTI2, _ = lower_sets(antichain(2))


def brute_pers(n, F):
    """All symmetric, transitive code matrices, by exhaustion."""
    codes = F.code
    if n == 0:
        return np.zeros((1, 0, 0), dtype=np.int64)
    grid = np.array(list(itertools.product(codes, repeat=n * n)), dtype=np.int64).reshape(-1, n, n)
    sym = np.all(grid == grid.transpose(0, 2, 1), axis=(1, 2))
    g = grid[sym]
    xy = g[:, :, :, None]  # rho(x,y) at [x,y,·]
    yz = g[:, None, :, :]  # rho(y,z) at [·,y,z]
    xz = g[:, :, None, :]
    trans = ~np.any((xy & yz) & ~xz, axis=(1, 2, 3))
    return g[trans]


@pytest.mark.parametrize(
    "F,counts",
    [(LOW_2, [3, 14, 87]), (LOW_ANTI2, [4, 25, 225])],
)
def test_per_counts(F, counts):
    for n, want in zip((1, 2, 3), counts):
        pers = enumerate_pers(finset("A", n), F)
        assert len(pers) == want
        assert len(brute_pers(n, F)) == want
        assert len(set(pers)) == want


def test_enumerated_pers_match_brute_force_exactly():
    for F in (chain(2), boolean(2), LOW_V):
        for n in (0, 1, 2):
            got = {tuple(X.code_matrix().reshape(-1)) for X in enumerate_pers(finset("A", n), F)}
            want = {tuple(m.reshape(-1)) for m in brute_pers(n, F)}
            assert got == want


def vee_objects():
    F = LOW_V
    A, B = FinSet("A", ["a0", "a1"]), FinSet("B", ["b0"])
    ix = F.index
    X = PerObject.from_matrix(A, F, [[ix("{l,top,r}"), ix("{l}")], [ix("{l}"), ix("{l,r}")]], "X")
    Y = nabla(B, F)
    return X, Y


def test_is_per_reports_the_failing_axiom():
    F = LOW_V
    A = finset("A", 2)
    sq = product(A, A).apex
    asym = Predicate(sq, F, [F.top, F.index("{l}"), F.bottom, F.top])
    v = is_per(A, asym)
    assert not v and v.failed == "sym"
    # symmetric but rho(0,1) ∧ rho(1,0) exceeds rho(0,0)
    nontrans = Predicate(sq, F, [F.index("{l}"), F.top, F.top, F.top])
    v = is_per(A, nontrans)
    assert not v and v.failed == "trans"
    with pytest.raises(NotAPer):
        PerObject(A, nontrans)
    with pytest.raises(CarrierMismatch):
        is_per(finset("B", 3), asym)


def test_compatibility_examples():
    X, Y = vee_objects()
    f = FinMap(X.carrier, Y.carrier, [0, 0])
    assert is_compat(X, Y, f)
    swap = FinMap(X.carrier, X.carrier, [1, 0])
    v = is_compat(X, X, swap)
    assert not v and v.failed == "compat"
    with pytest.raises(NotCompatible):
        PerMorphism(X, X, swap)


def test_enumerate_morphisms_matches_definition():
    for F in (chain(2), LOW_V):
        pers = enumerate_pers(finset("A", 2), F)[:8]
        for X, Y in itertools.product(pers, repeat=2):
            want = [m for m in enumerate_maps(X.carrier, Y.carrier) if is_compat(X, Y, m)]
            assert [m.map for m in enumerate_morphisms(X, Y)] == want


def test_composition_and_identity():
    F = boolean(2)
    pers = enumerate_pers(finset("A", 2), F)
    for X, Y in itertools.product(pers[::4], repeat=2):
        for f in enumerate_morphisms(X, Y):
            assert compose_per(f, PerMorphism.identity(X)) == f
            assert compose_per(PerMorphism.identity(Y), f) == f
            for g in enumerate_morphisms(Y, X):
                assert is_compat(X, X, compose_per(g, f).map)


def test_compose_rejects_mismatched_objects():
    X, Y = vee_objects()
    f = PerMorphism(X, Y, FinMap(X.carrier, Y.carrier, [0, 0]))
    with pytest.raises(EndpointMismatch):
        compose_per(f, f)


def test_pullback_universal_property():
    F = LOW_2
    objs = enumerate_pers(finset("A", 2), F)[::3] + [nabla(finset("C", 1), F)]
    C = nabla(finset("C", 2), F)
    T = enumerate_pers(finset("T", 1), F)
    for X, Y in itertools.product(objs[:4], repeat=2):
        for f in enumerate_morphisms(X, C):
            for g in enumerate_morphisms(Y, C):
                cone = per_pullback(f, g)
                h, k = cone.legs
                assert compose(f.map, h.map) == compose(g.map, k.map)
                for W in T:
                    for h2 in enumerate_morphisms(W, X):
                        for k2 in enumerate_morphisms(W, Y):
                            if compose(f.map, h2.map) != compose(g.map, k2.map):
                                continue
                            m = cone.mediator(h2, k2)  # compatibility checked on construction
                            assert compose(h.map, m.map) == h2.map


def test_product_carrier_and_relation():
    X, Y = vee_objects()
    P = per_product(X, Y).apex
    assert len(P.carrier) == 2
    assert np.array_equal(P.matrix(), X.matrix())  # Y is nabla of a point


# -- fibrations and equivalences ---------------------------------------------------


def _injective(f):
    rx, ry = f.src.code_matrix(), f.dst.code_matrix()
    t = f.map.table
    n = len(t)
    for x, y in itertools.product(range(n), repeat=2):
        if (rx[x, x] & ry[t[x], t[y]] & rx[y, y]) & ~rx[x, y]:
            return False
    return True


def _surjective(f):
    rx, ry = f.src.code_matrix(), f.dst.code_matrix()
    t = f.map.table
    for u in range(len(f.dst.carrier)):
        j = 0
        for x in range(len(t)):
            if t[x] == u:
                j |= rx[x, x]
        if ry[u, u] & ~j:
            return False
    return True


def test_trivial_fibration_pointwise_and_crosschecked():
    F = LOW_V
    pers1 = enumerate_pers(finset("A", 1), F)
    pers2 = enumerate_pers(finset("A", 2), F)[::5]
    for X, Y in itertools.product(pers1 + pers2, repeat=2):
        for f in enumerate_morphisms(X, Y):
            assert bool(is_trivial_fibration(f)) == (_injective(f) and _surjective(f))
            cc = crosscheck_trivial_fibration(f)
            assert cc.consistent


def test_fibration_counterexample_reports_witness():
    F = chain(2)
    A, B = finset("A", 1), finset("B", 2)
    X = PerObject.from_matrix(A, F, [[F.top]])
    Y = nabla(B, F)
    f = PerMorphism(X, Y, FinMap(A, B, [0]))
    v = is_fibration(f)
    assert not v and v.failed == "fib"
    assert is_weak_equivalence(f)  # ∇B is a point up to iso
    assert not is_trivial_fibration(f)


def test_path_object():
    for F in (chain(2), LOW_V):
        for X in enumerate_pers(finset("A", 2), F)[::3]:
            po = path_object(X)
            assert is_compat(X, po.total, po.section.map)
            assert is_compat(po.total, po.square, po.fibration.map)
            assert compose(po.fibration.map, po.section.map) == diagonal(X.carrier)
            assert is_weak_equivalence(po.section)
            assert is_fibration(po.fibration)


# -- restriction -------------------------------------------------------------------


def test_restriction():
    X, _ = vee_objects()
    F = X.frame
    phi = Predicate(X.carrier, F, [F.index("{l}"), F.index("{l}")])
    assert is_compatible_predicate(X, phi)
    R = restrict(X, phi)
    assert list(R.support.values) == [F.index("{l}"), F.index("{l}")]
    assert restriction_inclusion(X, phi).dst == X
    v = is_compatible_predicate(X, Predicate(X.carrier, F, [F.bottom, F.top]))
    assert not v and v.failed == "support"
    bad = Predicate(X.carrier, F, [F.index("{l}"), F.bottom])
    v = is_compatible_predicate(X, bad)
    assert not v and v.failed == "closed"
    with pytest.raises(IncompatiblePredicate):
        restrict(X, bad)


# -- functional relations ------------------------------------------------------------


def brute_funrels(X, Y):
    F = X.frame
    rx, ry = X.code_matrix(), Y.code_matrix()
    na, nb = len(X.carrier), len(Y.carrier)
    out = []
    for vals in itertools.product(F.code, repeat=na * nb):
        phi = np.array(vals, dtype=np.int64).reshape(na, nb)
        ok = True
        for x, u in itertools.product(range(na), range(nb)):
            ok &= not (phi[x, u] & ~(rx[x, x] & ry[u, u]))
            for y, v in itertools.product(range(na), range(nb)):
                ok &= not ((rx[y, x] & phi[x, u] & ry[u, v]) & ~phi[y, v])
            for v in range(nb):
                ok &= not ((phi[x, u] & phi[x, v]) & ~ry[u, v])
        for x in range(na):
            j = 0
            for u in range(nb):
                j |= phi[x, u]
            ok &= not (rx[x, x] & ~j)
        if ok:
            out.append(tuple(vals))
    return out


def test_enumerate_funrels_matches_brute_force():
    for F in (chain(2), boolean(2)):
        objs = enumerate_pers(finset("A", 1), F) + enumerate_pers(finset("A", 2), F)[::3]
        for X, Y in itertools.product(objs, repeat=2):
            got = sorted(tuple(r.pred.codes) for r in enumerate_funrels(X, Y))
            assert got == sorted(brute_funrels(X, Y))


def test_funrel_budget():
    X = nabla(finset("A", 3), LOW_V)
    assert funrel_search_size(X, X) == 5 ** 9
    with pytest.raises(BudgetExceeded):
        enumerate_funrels(X, X, budget=1000)


def test_funrel_validation():
    X, Y = vee_objects()
    F = X.frame
    carrier = product(X.carrier, Y.carrier).apex
    with pytest.raises(NotAFunctionalRelation):
        FunctionalRelation(X, Y, Predicate.bottom(carrier, F))
    assert not is_funrel(X, Y, Predicate.bottom(carrier, F))
    assert is_funrel(X, Y, E(PerMorphism(X, Y, FinMap(X.carrier, Y.carrier, [0, 0]))).pred)


def _sample_objects(F, k=3):
    return enumerate_pers(finset("A", 1), F)[:k] + enumerate_pers(finset("A", 2), F)[::7][:k]


def test_funrel_category_laws():
    F = boolean(2)
    objs = _sample_objects(F)
    for X, Y, Z in itertools.product(objs, repeat=3):
        fs, gs = enumerate_funrels(X, Y), enumerate_funrels(Y, Z)
        for phi in fs[:3]:
            assert compose_funrel(phi, id_funrel(X)) == phi
            assert compose_funrel(id_funrel(Y), phi) == phi
            for gam in gs[:3]:
                c = compose_funrel(gam, phi)
                assert c.is_valid()
                for eta in enumerate_funrels(Z, X)[:2]:
                    assert compose_funrel(eta, c) == compose_funrel(compose_funrel(eta, gam), phi)


def test_E_is_a_functor():
    F = LOW_V
    objs = _sample_objects(F)
    for X, Y, Z in itertools.product(objs, repeat=3):
        for f in enumerate_morphisms(X, Y)[:3]:
            assert E(f).is_valid()
            for g in enumerate_morphisms(Y, Z)[:3]:
                assert E(compose_per(g, f)) == compose_funrel(E(g), E(f))
        assert E(PerMorphism.identity(X)) == id_funrel(X)


def test_iso_funrels_are_the_invertible_ones():
    F = LOW_2
    objs = _sample_objects(F, 4)
    for X, Y in itertools.product(objs, repeat=2):
        for phi in enumerate_funrels(X, Y):
            iso = bool(is_iso_funrel(phi))
            assert iso == inverse_check(phi)
            if iso:
                assert reciprocal(phi).is_valid()


def test_span_factorization_recovers_every_funrel():
    F = boolean(2)
    objs = _sample_objects(F)
    for X, Y in itertools.product(objs, repeat=2):
        for phi in enumerate_funrels(X, Y):
            sp = span_factorization(phi)
            assert is_trivial_fibration(sp.left)
            assert span_equation_holds(phi, sp)
            assert via_span(phi, sp) == phi


def test_composition_replay():
    F = LOW_2
    objs = _sample_objects(F, 2)
    for X, Y, Z in itertools.product(objs, repeat=3):
        for phi in enumerate_funrels(X, Y)[:2]:
            for gam in enumerate_funrels(Y, Z)[:2]:
                assert composition_replay(phi, gam).ok


# -- homotopy -------------------------------------------------------------------------


def test_homotopy_criteria_agree_with_pointwise_definition():
    for F in (chain(2), LOW_V):
        objs = _sample_objects(F, 4)
        for X, Y in itertools.product(objs, repeat=2):
            ms = enumerate_morphisms(X, Y)
            rx, ry = X.code_matrix(), Y.code_matrix()
            for f, g in itertools.product(ms, repeat=2):
                want = all(
                    not (rx[x, x] & ~ry[f.map.table[x], g.map.table[x]]) for x in range(len(X.carrier))
                )
                crit = homotopy_criteria(f, g)
                assert crit.agree and crit.judgment == want == homotopic(f, g)


def test_homotopy_needs_parallel_maps():
    X, Y = vee_objects()
    f = PerMorphism(X, Y, FinMap(X.carrier, Y.carrier, [0, 0]))
    with pytest.raises(EndpointMismatch):
        homotopic(f, PerMorphism.identity(X))


def test_quotient_is_faithful():
    F = chain(2)
    q = quotient_category(_sample_objects(F, 3))
    assert q.full_then_faithful
    for h in q.homs.values():
        assert len(h.classes) <= h.funrels


def test_nabla_adjunction():
    for F in (chain(2), LOW_V):
        for X in _sample_objects(F):
            for n in range(3):
                assert nabla_adjunction_holds(X, finset("B", n))
