import itertools

import numpy as np
import pytest

from fintripos.errors import NotALattice, NotAPoset, NotDistributive, NotInStructure
from fintripos.order import (
    FRAME_MORPHISM,
    MEET_PRESERVING,
    MONOTONE,
    FinPoset,
    MonotoneMap,
    antichain,
    boolean,
    chain,
    check_frame,
    complete_to_lattice,
    distributive_lattices,
    enumerate_monotone_maps,
    frame_from_poset,
    has_enough_join_primes,
    is_join_prime,
    join_primes,
    lower_sets,
    map_class,
    two_chain,
    validate,
    vee_poset,
)


def naturally_labelled_posets(n):
    """Every partial order on 0..n-1 that extends the natural order (covers all posets up to iso)."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for bits in itertools.product([False, True], repeat=len(pairs)):
        leq = np.eye(n, dtype=bool)
        for (i, j), b in zip(pairs, bits):
            leq[i, j] = b
        closure = (leq.astype(np.int64) @ leq.astype(np.int64)) > 0
        if not np.any(closure & ~leq):
            yield FinPoset(f"N{n}", [f"p{i}" for i in range(n)], leq)


def frames_up_to_8():
    """The catalogue up to 6 elements plus a few larger frames."""
    extra = [boolean(3), chain(8), lower_sets(FinPoset.from_pairs("Y", ["a", "b", "c"], [("a", "c")]))[0]]
    return list(distributive_lattices(6)) + extra


def m3():
    return FinPoset.from_pairs(
        "M3", ["0", "a", "b", "c", "1"],
        [("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")],
    )


def test_two_chain_is_frame():
    F = frame_from_poset(FinPoset.from_pairs("2", ["0", "1"], [("0", "1")]))
    assert F.n == 2 and F.elements[F.top] == "1"


def test_diamond_not_distributive():
    with pytest.raises(NotDistributive) as e:
        frame_from_poset(m3())
    assert "'a'" in str(e.value) or "'b'" in str(e.value)


def test_vee_not_a_lattice():
    with pytest.raises(NotALattice) as e:
        complete_to_lattice(vee_poset())
    assert "'l'" in str(e.value) and "'r'" in str(e.value)


def test_validate_rejects_cycles_and_irreflexive():
    leq = np.array([[True, True], [True, True]])
    with pytest.raises(NotAPoset):
        validate(FinPoset("C", ["a", "b"], leq))
    with pytest.raises(NotAPoset):
        validate(FinPoset("C", ["a"], np.array([[False]])))
    with pytest.raises(NotAPoset):
        FinPoset.from_pairs("C", ["a", "b"], [("a", "b"), ("b", "a")])


def test_complete_to_lattice_agrees_with_brute_force():
    for n in range(1, 5):
        for P in naturally_labelled_posets(n):
            ok = True
            for a, b in itertools.combinations_with_replacement(range(n), 2):
                lbs = [c for c in range(n) if P.leq[c, a] and P.leq[c, b]]
                ubs = [c for c in range(n) if P.leq[a, c] and P.leq[b, c]]
                glb = [c for c in lbs if all(P.leq[d, c] for d in lbs)]
                lub = [c for c in ubs if all(P.leq[c, d] for d in ubs)]
                ok &= bool(glb) and bool(lub)
            if ok:
                L = complete_to_lattice(P)
                for a, b in itertools.product(range(n), repeat=2):
                    m, j = L.meet_t[a, b], L.join_t[a, b]
                    assert P.leq[m, a] and P.leq[m, b] and P.leq[a, j] and P.leq[b, j]
            else:
                with pytest.raises(NotALattice):
                    complete_to_lattice(P)


def test_heyting_adjunction_exhaustive():
    for F in frames_up_to_8():
        n = F.n
        for a, b, c in itertools.product(range(n), repeat=3):
            assert F.leq[c, F.imp_t[a, b]] == F.leq[F.meet_t[c, a], b]


def test_distributivity_of_all_subsets():
    for F in distributive_lattices(6):
        for a in range(F.n):
            for r in range(F.n + 1):
                for S in itertools.combinations(range(F.n), r):
                    lhs = F.meet_t[a, F.join_all(S)]
                    rhs = F.join_all([F.meet_t[a, s] for s in S])
                    assert lhs == rhs


def test_codes_are_a_lattice_embedding():
    for F in frames_up_to_8():
        c = F.code
        for a, b in itertools.product(range(F.n), repeat=2):
            assert c[F.meet_t[a, b]] == c[a] & c[b]
            assert c[F.join_t[a, b]] == c[a] | c[b]
            assert F.leq[a, b] == ((c[a] & ~c[b]) == 0)


def test_lower_sets_of_antichain_is_boolean():
    F, emb = lower_sets(antichain(2))
    assert F.n == 4
    assert len(join_primes(F)) == 2
    assert map_class(emb) == MONOTONE  # the poset carries no lattice structure


def test_lower_sets_of_vee():
    F, emb = lower_sets(vee_poset())
    assert list(F.elements) == ["{}", "{l}", "{r}", "{l,r}", "{l,top,r}"]
    assert emb("top") == "{l,top,r}"
    assert emb("l") == "{l}"


def test_lower_sets_of_empty_poset():
    F, _ = lower_sets(FinPoset("E", [], np.zeros((0, 0), dtype=bool)))
    assert F.n == 1 and F.top == F.bottom


def test_lower_sets_of_chain():
    F, _ = lower_sets(FinPoset.from_pairs("c2", ["a", "b"], [("a", "b")]))
    assert F.n == 3
    assert all(F.leq[i, j] or F.leq[j, i] for i in range(3) for j in range(3))


@pytest.mark.parametrize("n", range(0, 7))
def test_lower_sets_have_enough_join_primes(n):
    for P in naturally_labelled_posets(n):
        F, emb = lower_sets(P)
        primes = set(join_primes(F))
        assert primes == set(int(t) for t in emb.table)  # exactly the principal lower sets
        assert has_enough_join_primes(F)


def subset_join_prime(F, a):
    if a == F.bottom:
        return False
    for r in range(F.n + 1):
        for S in itertools.combinations(range(F.n), r):
            if F.leq[a, F.join_all(S)] and not any(F.leq[a, s] for s in S):
                return False
    return True


def test_join_prime_matches_subset_definition():
    for F in distributive_lattices(6):
        for a in range(F.n):
            assert is_join_prime(a, F) == subset_join_prime(F, a)


def test_join_prime_examples():
    F, emb = lower_sets(vee_poset())
    for p in F.base_poset.elements:
        assert is_join_prime(emb(p), F)
    assert not is_join_prime("{l,r}", F)
    assert not is_join_prime("{}", F)


def test_join_prime_refuses_non_frames_and_unknown_elements():
    L = complete_to_lattice(FinPoset.from_pairs("c", ["0", "1"], [("0", "1")]))
    with pytest.raises(NotDistributive):
        is_join_prime("1", L)
    with pytest.raises(NotInStructure):
        is_join_prime("zz", two_chain())


def test_map_class_examples():
    F, _ = lower_sets(vee_poset())
    two = two_chain()
    assert map_class(MonotoneMap.identity(F)) == FRAME_MORPHISM
    f = MonotoneMap.from_dict(F, two, {"{}": "0", "{l}": "0", "{r}": "0", "{l,r}": "1", "{l,top,r}": "1"})
    assert map_class(f) == MEET_PRESERVING
    bot = MonotoneMap(F, two, [two.bottom] * F.n)
    assert map_class(bot) == MONOTONE


def test_monotone_map_rejects_order_reversal():
    two = two_chain()
    with pytest.raises(ValueError):
        MonotoneMap(two, two, [1, 0])


@pytest.mark.parametrize(
    "P,Q,count",
    [
        (chain(1), chain(4), 4),
        (two_chain(), two_chain(), 3),
        (boolean(2), chain(1), 1),
        (antichain(2), chain(3), 9),
        (chain(3), chain(3), 10),
    ],
)
def test_monotone_map_counts(P, Q, count):
    ms = list(enumerate_monotone_maps(P, Q))
    assert len(ms) == count
    assert len(set(ms)) == count
    brute = sum(
        all(not P.leq[i, j] or Q.leq[t[i], t[j]] for i in range(P.n) for j in range(P.n))
        for t in itertools.product(range(Q.n), repeat=P.n)
    )
    assert brute == count


def test_distributive_lattice_catalogue_sizes():
    sizes = [F.n for F in distributive_lattices(6)]
    # 1, 2, 3, 4 (chain, boolean), 5 (chain, two more), 6 (five shapes)
    assert [sizes.count(k) for k in range(1, 7)] == [1, 1, 1, 2, 3, 5]


def test_check_frame_is_idempotent():
    F = boolean(2)
    assert check_frame(F) is F
