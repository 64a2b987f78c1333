import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import min_l1_by_vertex_enumeration, random_oracle_instances
from pocs.linalg import Seed
from pocs.sensing import SensingEnsemble, generate_sparse_signal
from pocs.solvers import BpdnConfig, bpdn_solve


def _cs_instance(m, n=100, s=10, t=0):
    E = SensingEnsemble.gaussian(m, n, Seed(31, (t,)))
    x = generate_sparse_signal(n, s, Seed(32, (t,))).values
    M = E.stacked_real()
    return M, x


def test_oracle_sanity_on_known_solution():
    # identity rows: the only feasible point is y itself
    M = np.hstack([np.eye(3), np.zeros((3, 1))])
    M[:, 3] = [1.0, 1.0, 1.0]
    u, unique = min_l1_by_vertex_enumeration(M, np.array([1.0, 1.0, 1.0]))
    assert unique
    assert np.allclose(u, [0, 0, 0, 1])


def test_matches_exhaustive_oracle():
    for M, y, u_star in random_oracle_instances(15, seed=77):
        res = bpdn_solve(M, y)
        assert res.converged
        assert np.linalg.norm(res.estimate - u_star) <= 1e-4 * max(1.0, np.linalg.norm(u_star))


def test_zero_shortcut():
    M = np.ones((3, 4))
    y = np.array([0.1, 0.0, 0.0])
    res = bpdn_solve(M, y, BpdnConfig(fidelity_epsilon=0.2))
    assert np.array_equal(res.estimate, np.zeros(4))
    assert res.l1_value == 0 and res.converged


def test_noiseless_exact_recovery():
    M, x = _cs_instance(50)
    res = bpdn_solve(M, M @ x)
    assert res.converged
    assert np.linalg.norm(res.estimate - x) <= 1e-3 * np.linalg.norm(x)


@settings(max_examples=25, deadline=None)
@given(t=st.integers(0, 10**6), eps_frac=st.floats(0.0, 0.5))
def test_feasibility_of_converged_results(t, eps_frac):
    M, x = _cs_instance(30, n=40, s=4, t=t)
    y = M @ x + 0.05 * np.random.default_rng(t).standard_normal(M.shape[0])
    eps = eps_frac * np.linalg.norm(y)
    res = bpdn_solve(M, y, BpdnConfig(fidelity_epsilon=eps))
    actual = np.linalg.norm(M @ res.estimate - y)
    assert res.residual_norm == pytest.approx(actual, rel=1e-9, abs=1e-12)
    assert res.l1_value == pytest.approx(np.abs(res.estimate).sum(), rel=1e-12)
    if res.converged:
        assert actual <= eps * (1 + 1e-6) + 1e-8 * np.linalg.norm(y)


def test_l1_value_non_increasing_in_epsilon():
    M, x = _cs_instance(30, n=60, s=6, t=3)
    y = M @ x + 0.02 * np.random.default_rng(3).standard_normal(M.shape[0])
    values = [bpdn_solve(M, y, BpdnConfig(fidelity_epsilon=e)).l1_value
              for e in np.linspace(0.0, 2.0, 9)]
    for a, b in zip(values, values[1:]):
        assert b <= a + 1e-8 * max(1.0, a)


def test_error_grows_at_most_linearly_with_noise():
    # m/s = 6 with n = 100, s = 10
    slopes = []
    for t in range(5):
        M, x = _cs_instance(60, t=t)
        d = np.random.default_rng(100 + t).standard_normal(M.shape[0])
        d /= np.linalg.norm(d)
        errs = []
        for eps in (1e-3, 1e-2):
            res = bpdn_solve(M, M @ x + eps * d, BpdnConfig(fidelity_epsilon=eps))
            errs.append(np.linalg.norm(res.estimate - x))
        slopes.append(np.log10(errs[1] / errs[0]))
    assert np.mean(slopes) <= 1.2


def test_iteration_cap_reports_failure():
    M, x = _cs_instance(50)
    res = bpdn_solve(M, M @ x, BpdnConfig(max_iters=2))
    assert not res.converged
    assert res.iterations <= 2
    assert res.estimate.shape == (100,)


@pytest.mark.parametrize("kwargs", [
    {"fidelity_epsilon": -1.0}, {"opt_tol": 0.0}, {"feas_tol": -1e-3}, {"max_iters": 0},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        BpdnConfig(**kwargs)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        bpdn_solve(np.ones((3, 4)), np.ones(2))
