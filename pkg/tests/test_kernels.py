import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pocs import _kernels_py, kernels

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def project_by_bisection(b, tau):
    """Independent oracle: bisection on the soft-threshold level."""
    if np.abs(b).sum() <= tau:
        return b.copy()
    lo, hi = 0.0, np.abs(b).max()
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.maximum(np.abs(b) - mid, 0).sum() > tau:
            lo = mid
        else:
            hi = mid
    return np.sign(b) * np.maximum(np.abs(b) - hi, 0)


@settings(max_examples=200, deadline=None)
@given(b=arrays(np.float64, st.integers(1, 40), elements=finite),
       frac=st.floats(0.0, 1.5))
def test_projection_matches_bisection_oracle(b, frac):
    tau = frac * np.abs(b).sum()
    want = project_by_bisection(b, tau)
    for impl in (_kernels_py, kernels):
        got = impl.project_l1_ball(b, tau)
        # float cancellation in the threshold scales with the input mass
        assert np.abs(got).sum() <= tau + 1e-12 * np.abs(b).sum() + 1e-300
        assert np.allclose(got, want, atol=1e-9 * max(1.0, np.abs(b).max()))


def test_projection_edge_cases(backend):
    b = np.array([3.0, -4.0, 0.5])
    assert np.array_equal(backend.project_l1_ball(b, 0.0), np.zeros(3))
    assert np.array_equal(backend.project_l1_ball(b, 100.0), b)
    assert np.allclose(backend.project_l1_ball(b, 1.0), [0.0, -1.0, 0.0])


def test_projection_idempotent(backend, rng):
    b = rng.standard_normal(50)
    p = backend.project_l1_ball(b, 2.0)
    assert np.allclose(backend.project_l1_ball(p, 2.0), p, atol=1e-12)


@pytest.mark.parametrize("u,s,want", [
    ([3.0, -5.0, 1.0], 1, [0.0, -5.0, 0.0]),
    ([2.0, 2.0], 1, [2.0, 0.0]),
    ([0.0, 0.0, 0.0], 2, [0.0, 0.0, 0.0]),
    ([1.0, -1.0, 1.0, -1.0], 2, [1.0, -1.0, 0.0, 0.0]),
])
def test_hard_threshold_examples(backend, u, s, want):
    assert np.array_equal(backend.hard_threshold(np.array(u), s), want)


def test_hard_threshold_rejects_bad_sparsity(backend):
    with pytest.raises(ValueError):
        backend.hard_threshold(np.ones(3), 4)
    with pytest.raises(ValueError):
        backend.hard_threshold(np.ones(3), 0)


def test_backends_agree(rng):
    if kernels.BACKEND != "cython":
        pytest.skip("compiled extension not built")
    from pocs import _kernels
    for _ in range(20):
        b = rng.standard_normal(64)
        tau = rng.uniform(0, np.abs(b).sum())
        assert np.allclose(_kernels.project_l1_ball(b, tau), _kernels_py.project_l1_ball(b, tau),
                           atol=1e-13)
        assert np.array_equal(_kernels.hard_threshold(b, 7), _kernels_py.hard_threshold(b, 7))
        v = rng.standard_normal(30) + 1j * rng.standard_normal(30)
        v[3] = 0
        assert np.allclose(_kernels.signc(v), _kernels_py.signc(v), atol=1e-15)
        A = rng.standard_normal((30, 12)) + 1j * rng.standard_normal((30, 12))
        assert np.allclose(_kernels.equivalent_matrix(A, v, 0.3),
                           _kernels_py.equivalent_matrix(A, v, 0.3), atol=1e-12)


def test_spg_solver_backends_agree(rng):
    if kernels.BACKEND != "cython":
        pytest.skip("compiled extension not built")
    from pocs import _kernels
    for _ in range(5):
        M = rng.standard_normal((20, 40)) / np.sqrt(20)
        x = np.zeros(40)
        x[rng.choice(40, 3, replace=False)] = rng.standard_normal(3)
        y = M @ x
        MT = np.ascontiguousarray(M.T)
        target = 1e-8 * np.linalg.norm(y)
        xc, _, code_c = _kernels.spg_bpdn(MT, y, 0.0, target, 1e-6, 10_000)
        xp, _, code_p = _kernels_py.spg_bpdn(MT, y, 0.0, target, 1e-6, 10_000)
        assert code_c == code_p == _kernels_py.ROOT_FOUND
        # same algorithm, different summation order: agree to solver accuracy
        assert np.allclose(xc, xp, atol=1e-6)
        assert np.allclose(xc, x, atol=1e-6)


def test_equivalent_matrix_rejects_length_mismatch(backend):
    with pytest.raises(ValueError):
        backend.equivalent_matrix(np.ones((3, 2), complex), np.ones(4, complex), 1.0)


def test_pure_python_switch(monkeypatch):
    import importlib
    monkeypatch.setenv("POCS_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("POCS_PURE_PYTHON")
        importlib.reload(kernels)
