import pytest

from fintripos.fuzz import SUITES, run_suite
from fintripos.lang.rules import ALL_RULES

SMALL = {"soundness": 60, "lemmas": 60, "doctrine": 200, "cfo": 60, "localization": 60}


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_suite_passes_at_small_size(suite):
    res = run_suite(suite, seed=1, iters=SMALL[suite])
    assert res.ok, [c.as_dict() for c in res.checks if c.violations]
    assert res.checks
    for c in res.checks:
        assert c.instances > 0 and c.counterexample is None


@pytest.mark.parametrize("suite", ["lemmas", "cfo"])
def test_suites_are_deterministic(suite):
    a = run_suite(suite, seed=9, iters=30).as_dict()
    b = run_suite(suite, seed=9, iters=30).as_dict()
    assert a == b


def test_soundness_covers_every_rule_with_nonvacuous_instances():
    res = run_suite("soundness", seed=2, iters=100)
    assert len(res.checks) == len(ALL_RULES)
    for c in res.checks:
        assert c.instances == 100
        assert c.nonvacuous > 0, c.anchor


def test_zero_iterations():
    res = run_suite("doctrine", seed=0, iters=0)
    assert res.ok and all(c.instances == 0 for c in res.checks)
