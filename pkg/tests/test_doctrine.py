import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fintripos.doctrine import (
    REGULAR,
    TRIPOS,
    Doctrine,
    PrimeStatus,
    Predicate,
    check_adjunctions,
    check_beck_chevalley,
    check_completion_universal_property,
    check_frobenius,
    check_power_object,
    exists_along,
    exists_completion,
    forall_along,
    is_exists_prime,
    is_flat_definitional,
    is_flat_poset_map,
    name_of,
    power_object,
    power_replay_batch,
    prime_by_characterization,
    prime_decomposition,
    reindex,
    slice_hom_exists,
    verify_weak_terminal,
    weak_terminal,
)
from fintripos.errors import CarrierMismatch, NoDecomposition, UnsupportedInMode
from fintripos.finset import FinMap, FinSet, compose, enumerate_maps, finset, product
from fintripos.order import (
    FinPoset,
    MonotoneMap,
    antichain,
    boolean,
    chain,
    complete_to_lattice,
    distributive_lattices,
    enumerate_monotone_maps,
    lower_sets,
    two_chain,
    vee_poset,
)

FRAMES = distributive_lattices(5)


def all_preds(A, frame):
    return [Predicate(A, frame, v) for v in itertools.product(range(frame.n), repeat=len(A))]


@st.composite
def instances(draw):
    frame = draw(st.sampled_from(FRAMES))
    A = finset("A", draw(st.integers(0, 4)))
    B = finset("B", draw(st.integers(1, 4)))
    f = FinMap(A, B, draw(st.lists(st.integers(0, len(B) - 1), min_size=len(A), max_size=len(A))))
    vals = st.integers(0, frame.n - 1)
    phi = Predicate(A, frame, draw(st.lists(vals, min_size=len(A), max_size=len(A))))
    psi = Predicate(B, frame, draw(st.lists(vals, min_size=len(B), max_size=len(B))))
    return f, phi, psi


# -- reindexing and quantifiers ------------------------------------------------


def test_reindex_examples():
    F = boolean(2)
    X = FinSet("X", ["x"])
    phi = Predicate(X, F, [2])
    f = FinMap(FinSet("A", ["a", "b"]), X, [0, 0])
    assert reindex(f, phi).values.tolist() == [2, 2]
    assert reindex(FinMap.identity(X), phi) == phi
    c = Predicate.const(finset("Y", 3), F, 1)
    g = FinMap(finset("Z", 2), c.carrier, [2, 0])
    assert reindex(g, c) == Predicate.const(g.dom, F, 1)


def test_reindex_carrier_mismatch():
    phi = Predicate.top(finset("X", 2), two_chain())
    with pytest.raises(CarrierMismatch):
        reindex(FinMap.identity(finset("Y", 2)), phi)
    with pytest.raises(CarrierMismatch):
        exists_along(FinMap.identity(finset("Y", 2)), phi)


@given(instances(), st.data())
def test_reindex_functorial(inst, data):
    f, phi, psi = inst
    C = finset("C", data.draw(st.integers(0, 3)) if len(f.dom) else 0)
    hi = max(len(f.dom) - 1, 0)
    g = FinMap(C, f.dom, data.draw(st.lists(st.integers(0, hi), min_size=len(C), max_size=len(C))))
    assert reindex(compose(f, g), psi) == reindex(g, reindex(f, psi))


def test_quantifiers_on_a_two_point_fibre():
    F = boolean(2)
    u, v = F.index("{p0}"), F.index("{p1}")
    f = FinMap(FinSet("A", ["a", "b"]), FinSet("X", ["x"]), [0, 0])
    phi = Predicate(f.dom, F, [u, v])
    assert exists_along(f, phi).values.tolist() == [F.join_t[u, v]]
    assert forall_along(f, phi).values.tolist() == [F.meet_t[u, v]]


def test_quantifiers_on_empty_fibres():
    F = chain(3)
    f = FinMap(finset("A", 0), finset("X", 2), [])
    phi = Predicate(f.dom, F, [])
    assert exists_along(f, phi) == Predicate.bottom(f.cod, F)
    assert forall_along(f, phi) == Predicate.top(f.cod, F)


def test_quantifiers_along_identity():
    F = boolean(2)
    A = finset("A", 3)
    for phi in all_preds(A, F)[:20]:
        assert exists_along(FinMap.identity(A), phi) == phi
        assert forall_along(FinMap.identity(A), phi) == phi


def test_adjunctions_exhaustive():
    """∃_f ⊣ f* ⊣ ∀_f for every f with |dom|, |cod| <= 3 over every frame with <= 5 elements."""
    for F in FRAMES:
        for na, nb in itertools.product(range(4), range(4)):
            A, B = finset("A", na), finset("B", nb)
            phis, psis = all_preds(A, F), all_preds(B, F)
            pa = np.array([p.codes for p in phis]).reshape(len(phis), na)
            pb = np.array([p.codes for p in psis]).reshape(len(psis), nb)
            for f in enumerate_maps(A, B):
                ex = np.array([exists_along(f, p).codes for p in phis]).reshape(len(phis), nb)
                al = np.array([forall_along(f, p).codes for p in phis]).reshape(len(phis), nb)
                re = np.array([reindex(f, q).codes for q in psis]).reshape(len(psis), na)
                # le[x, y]: x <= y pointwise, for code arrays
                ex_le_psi = np.all((ex[:, None, :] & ~pb[None, :, :]) == 0, axis=2)
                phi_le_re = np.all((pa[:, None, :] & ~re[None, :, :]) == 0, axis=2)
                assert np.array_equal(ex_le_psi, phi_le_re)
                re_le_phi = np.all((re[None, :, :] & ~pa[:, None, :]) == 0, axis=2)
                psi_le_al = np.all((pb[None, :, :] & ~al[:, None, :]) == 0, axis=2)
                assert np.array_equal(re_le_phi, psi_le_al)


@given(instances())
def test_adjunction_helper(inst):
    f, phi, psi = inst
    assert check_adjunctions(f, phi, psi)


@given(instances())
def test_frobenius(inst):
    f, phi, psi = inst
    assert check_frobenius(f, phi, psi)


@given(instances(), st.data())
def test_beck_chevalley(inst, data):
    f, phi, _ = inst
    C = finset("C", data.draw(st.integers(0, 3)))
    g = FinMap(C, f.cod, data.draw(st.lists(st.integers(0, len(f.cod) - 1), min_size=len(C), max_size=len(C))))
    assert check_beck_chevalley(f, g, phi)


def broken_exists(f, phi):
    """Largest element index in each fibre instead of the join."""
    out = np.zeros(len(f.cod), dtype=np.int64)
    for j, i in enumerate(f.table):
        out[i] = max(out[i], phi.values[j])
    return Predicate(f.cod, phi.frame, out)


def test_mutated_exists_is_caught():
    F = boolean(2)
    A, X = finset("A", 2), finset("X", 1)
    f = FinMap(A, X, [0, 0])
    frob = [
        check_frobenius(f, phi, psi, exists=broken_exists)
        for phi in all_preds(A, F) for psi in all_preds(X, F)
    ]
    assert not all(frob)
    # Beck-Chevalley compares the same maximum over matching fibres, so it stays blind
    assert all(
        check_beck_chevalley(f, g, phi, exists=broken_exists)
        for phi in all_preds(A, F) for g in enumerate_maps(finset("C", 2), X)
    )
    # on a chain the maximum is the join, so the mutation is invisible
    assert all(
        check_frobenius(f, phi, psi, exists=broken_exists)
        for phi in all_preds(A, chain(3)) for psi in all_preds(X, chain(3))
    )


# -- power objects ------------------------------------------------------------------


def test_power_object_counts():
    po = power_object(finset("I", 1), two_chain())
    assert len(po.powerset) == 2
    po = power_object(finset("I", 2), chain(3))
    assert len(po.powerset) == 9
    i, m = po.base.elements[1], po.powerset.elements[5]
    assert po.membership((i, m)) == m[1]


def test_power_object_needs_tripos():
    with pytest.raises(UnsupportedInMode):
        Doctrine(two_chain(), REGULAR).power_object(finset("I", 1))
    assert len(Doctrine(two_chain(), TRIPOS).power_object(finset("I", 2)).powerset) == 4


def test_name_of_top_is_constant():
    F = boolean(2)
    I, J = finset("I", 2), finset("J", 3)
    nm = name_of(Predicate.top(product(I, J).apex, F), I, J)
    assert len(set(nm.table.tolist())) == 1
    assert nm(J.elements[0]) == (F.elements[F.top],) * 2


@pytest.mark.parametrize("ni,nj", [(0, 2), (2, 0), (1, 1), (2, 3), (3, 2)])
def test_power_object_equation(ni, nj):
    F = boolean(2)
    I, J = finset("I", ni), finset("J", nj)
    carrier = product(I, J).apex
    rng = np.random.default_rng(ni * 7 + nj)
    for _ in range(20):
        phi = Predicate(carrier, F, rng.integers(0, F.n, size=len(carrier)))
        assert check_power_object(phi, I, J)
        assert np.array_equal(power_replay_batch(phi.values[None, :], ni, nj, F.n)[0], phi.values)


# -- weak terminals and flatness -------------------------------------------------------


def test_weak_terminal_no_constraints():
    P = vee_poset()
    I = finset("I", 2)
    w = weak_terminal(I, [], P)
    assert len(w.leg.dom) == len(I) * P.n


def test_weak_terminal_without_common_lower_bound():
    P = vee_poset()
    I = finset("I", 1)
    c1, c2 = Predicate(I, P, [P.index("l")]), Predicate(I, P, [P.index("r")])
    w = weak_terminal(I, [c1, c2], P)
    assert len(w.leg.dom) == 0
    assert verify_weak_terminal(w, I, [c1, c2], P, bound=2)


def test_weak_terminal_in_meet_semilattice_matches_meet():
    F = boolean(2)
    I = finset("I", 2)
    preds = all_preds(I, F)
    for c1, c2 in itertools.combinations(preds[:8], 2):
        w = weak_terminal(I, [c1, c2], F)
        assert verify_weak_terminal(w, I, [c1, c2], F, bound=1)
        meet = (FinMap.identity(I), c1 & c2)
        assert slice_hom_exists(meet, (w.leg, w.pred))
        assert slice_hom_exists((w.leg, w.pred), meet)


def test_flat_examples():
    F = boolean(2)
    assert is_flat_poset_map(MonotoneMap.identity(F))
    _, emb = lower_sets(vee_poset())
    assert is_flat_poset_map(emb)
    P = antichain(2)
    two = two_chain()
    assert not is_flat_poset_map(MonotoneMap(P, two, [1, 1]))


def test_flat_pointwise_matches_definitional():
    A = two_chain()
    posets = [antichain(2), vee_poset(), FinPoset.from_pairs("c2", ["a", "b"], [("a", "b")])]
    for P in posets:
        for m in enumerate_monotone_maps(P, A):
            assert is_flat_poset_map(m) == is_flat_definitional(m, max_carrier=1)


def test_meet_preserving_maps_of_semilattices_are_flat():
    L = complete_to_lattice(FinPoset.from_pairs("c3", ["0", "1", "2"], [("0", "1"), ("1", "2")]))
    for A in (two_chain(), boolean(2)):
        for m in enumerate_monotone_maps(L, A):
            meets = all(
                m.table[L.meet_t[a, b]] == A.meet_t[m.table[a], m.table[b]]
                for a in range(L.n) for b in range(L.n)
            ) and m.table[L.top] == A.top
            if meets:
                assert is_flat_poset_map(m)


# -- existential completion ---------------------------------------------------------------


def test_completion_sizes():
    one = FinPoset.from_pairs("one", ["p"], [])
    assert exists_completion(one)[0].frame.n == 2
    assert exists_completion(vee_poset())[0].frame.n == 5
    c2 = FinPoset.from_pairs("c2", ["a", "b"], [("a", "b")])
    low, _ = exists_completion(c2)
    assert low.frame.n == 3


@pytest.mark.parametrize("P", [vee_poset(), antichain(2)])
def test_universal_property_small(P):
    for A in (two_chain(), boolean(2), chain(3)):
        rep = check_completion_universal_property(P, A)
        assert rep.ok
        assert rep.frame_morphisms == rep.flat_maps


# -- existential primality --------------------------------------------------------------


def vee_frame():
    return lower_sets(vee_poset())


def test_principal_predicates_are_prime_by_characterization():
    F, emb = vee_frame()
    I = FinSet("I", list(emb.dom.elements))
    phi = Predicate(I, F, emb.table)
    v = is_exists_prime(phi)
    assert v.status is PrimeStatus.YES_BY_CHARACTERIZATION


def test_split_value_refuted_at_bound_two():
    F, _ = vee_frame()
    phi = Predicate(finset("I", 1), F, [F.index("{l,r}")])
    assert is_exists_prime(phi, bound=1).status is PrimeStatus.YES
    v = is_exists_prime(phi, bound=2)
    assert v.status is PrimeStatus.NO
    c = v.counterexample
    assert len(c.v) == 2 and sorted(F.elements[k] for k in c.psi) == ["{l}", "{r}"]


def test_bottom_is_not_prime():
    F, _ = vee_frame()
    phi = Predicate(finset("I", 2), F, [F.top, F.bottom])
    assert not prime_by_characterization(phi)
    assert is_exists_prime(phi, bound=1).status is PrimeStatus.NO


def test_prime_decomposition_examples():
    F, _ = vee_frame()
    I = finset("I", 1)
    f, w = prime_decomposition(Predicate(I, F, [F.index("{l,r}")]))
    assert sorted(j[1] for j in f.dom.elements) == ["{l}", "{r}"]
    assert prime_by_characterization(w)
    f, w = prime_decomposition(Predicate.bottom(finset("I", 3), F))
    assert len(f.dom) == 0
    assert exists_along(f, w) == Predicate.bottom(finset("I", 3), F)


def test_prime_decomposition_is_exact():
    F, _ = vee_frame()
    I = finset("I", 2)
    for phi in all_preds(I, F):
        f, w = prime_decomposition(phi)
        assert exists_along(f, w) == phi
        assert prime_by_characterization(w)


def test_prime_decomposition_of_pointwise_prime_is_trivial():
    F, emb = vee_frame()
    I = finset("I", 3)
    phi = Predicate(I, F, emb.table)
    f, _ = prime_decomposition(phi)
    # each value is the join of the primes below it; ⊤ = ↓top is itself prime
    assert len(f.dom) == sum(
        sum(1 for p in (1, 2, 4) if F.leq[p, v]) for v in phi.values
    )


def test_prime_decomposition_needs_join_primes(monkeypatch):
    # every finite distributive lattice has enough join-primes, so stub the test out
    import fintripos.doctrine as d

    monkeypatch.setattr(d, "has_enough_join_primes", lambda _: False)
    with pytest.raises(NoDecomposition):
        prime_decomposition(Predicate.top(finset("I", 1), boolean(2)))
