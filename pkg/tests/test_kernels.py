import os
import subprocess
import sys

import numpy as np
import pytest

from fintripos import _kernels_py, kernels
from fintripos.finset import finset
from fintripos.order import boolean, chain, lower_sets, vee_poset
from fintripos.percat import enumerate_pers, nabla

compiled = pytest.importorskip("fintripos._kernels")

LOW_V, _ = lower_sets(vee_poset())
FRAMES = [chain(1), chain(2), boolean(2), LOW_V]


@pytest.mark.skipif(os.environ.get("FINTRIPOS_PURE") == "1", reason="fallback forced")
def test_compiled_backend_selected_by_default():
    assert kernels.BACKEND == "cython"


def test_pure_backend_forced_by_environment():
    code = "from fintripos import kernels; print(kernels.BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code], env={"FINTRIPOS_PURE": "1", "PATH": ""},
        capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("F", FRAMES, ids=lambda F: F.id)
@pytest.mark.parametrize("n", range(4))
def test_enumerate_pers_backends_agree(F, n):
    a = _kernels_py.enumerate_pers(n, F.code)
    b = compiled.enumerate_pers(n, F.code)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("F", [chain(2), boolean(2), LOW_V], ids=lambda F: F.id)
def test_enumerate_funrels_backends_agree(F):
    objs = enumerate_pers(finset("A", 1), F) + enumerate_pers(finset("A", 2), F)[::4]
    for X in objs:
        for Y in objs:
            a = _kernels_py.enumerate_funrels(X.code_matrix(), Y.code_matrix(), F.code)
            b = compiled.enumerate_funrels(X.code_matrix(), Y.code_matrix(), F.code)
            assert np.array_equal(a, b)


def test_enumerate_funrels_nabla():
    X = nabla(finset("A", 2), LOW_V)
    a = _kernels_py.enumerate_funrels(X.code_matrix(), X.code_matrix(), LOW_V.code)
    b = compiled.enumerate_funrels(X.code_matrix(), X.code_matrix(), LOW_V.code)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("seed", range(5))
def test_classify_names_backends_agree(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 500))
    m = int(rng.integers(0, 2 * n))
    src, dst = rng.integers(0, n, size=m), rng.integers(0, n, size=m)
    a = _kernels_py.classify_names(n, src, dst)
    b = compiled.classify_names(n, src, dst)
    assert np.array_equal(a, b)
    # roots are the smallest member of each connected component
    assert np.all(a <= np.arange(n))
    assert np.all(a[a] == a)
    assert np.all(a[src] == a[dst])


def test_classify_names_without_edges():
    assert np.array_equal(compiled.classify_names(3, np.zeros(0, np.int64), np.zeros(0, np.int64)), np.arange(3))
