import numpy as np
import pytest
from hypothesis import given, strategies as st

from markedrot import kernels
from markedrot.exactnum import FIXED_ONE
from markedrot.orbit import TOL0, TOL_STEP, alpha_fixed

from conftest import GOLDEN

try:
    CY = kernels.backend_module("cython")
except ImportError:  # compiled extension not built
    CY = None
PY = kernels.backend_module("python")

needs_cython = pytest.mark.skipif(CY is None, reason="compiled kernels not built")


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


def _cuts(seed, k):
    r = np.random.default_rng(seed)
    return np.concatenate([np.zeros(1, dtype=np.uint64), np.sort(r.integers(1, FIXED_ONE, size=k, dtype=np.uint64))])


@needs_cython
@given(st.integers(0, 2**64 - 1), st.integers(0, 10**6), st.integers(1, 5), st.integers(1, 3000))
def test_orbit_labels_backends_agree(x0, seed, k, n):
    cuts = _cuts(seed, k)
    a = alpha_fixed(GOLDEN)
    got = kernels.orbit_labels(x0, a, cuts, n, TOL0, TOL_STEP, impl=CY)
    want = kernels.orbit_labels(x0, a, cuts, n, TOL0, TOL_STEP, impl=PY)
    assert np.array_equal(got[0], want[0]) and np.array_equal(got[1], want[1]) and got[2] == want[2]


@needs_cython
@given(st.integers(0, 10**6), st.integers(1, 2000), st.integers(0, 50))
def test_perm_index_and_mismatch_backends_agree(seed, n, q):
    r = np.random.default_rng(seed)
    labels = r.integers(0, 3, size=n + q, dtype=np.int32)
    images = np.array([[0, 1, 2], [1, 0, 2], [2, 0, 1], [0, 2, 1], [1, 2, 0], [2, 1, 0]], dtype=np.int32)
    table = r.integers(0, 6, size=(3, 6), dtype=np.int32)
    p1 = kernels.prefix_perm_index(labels, table, 0, impl=CY)
    p2 = kernels.prefix_perm_index(labels, table, 0, impl=PY)
    assert np.array_equal(p1, p2)
    m1 = kernels.shift_mismatch(labels, p1, images, q, n, impl=CY)
    m2 = kernels.shift_mismatch(labels, p2, images, q, n, impl=PY)
    assert np.array_equal(m1, m2)


@needs_cython
@given(st.integers(0, 2**64 - 1), st.integers(1, 2**63), st.integers(0, 100), st.integers(1, 5000))
def test_first_hit_backends_agree(g, z, k0, span):
    a = alpha_fixed(GOLDEN)
    assert kernels.first_hit(g, a, z, k0, k0 + span, TOL0, TOL_STEP, impl=CY) == \
        kernels.first_hit(g, a, z, k0, k0 + span, TOL0, TOL_STEP, impl=PY)


def test_shift_mismatch_rejects_short_orbit():
    labels = np.zeros(10, dtype=np.int32)
    with pytest.raises(ValueError):
        kernels.shift_mismatch(labels, np.zeros(11, dtype=np.int32), np.array([[0, 1]], dtype=np.int32), 5, 10)
