import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pocs.linalg import KAPPA, Seed, signc
from pocs.metrics import (
    ConeSampler, estimate_rip_constant, gaussian_mean_width_sparse, l1_concentration_check,
    noisy_rip_degradation, normalized_real_gaussian, projected_width_ratio,
    projected_width_ratio_with_error, rip_of_equivalent_matrix, sign_product_embedding_deviation,
    sign_product_vector, sparse_sphere_support, sphere_support,
)
from pocs.sensing import SensingEnsemble, generate_sparse_signal, normalize_to_convention


def chi_mean(k):
    return math.sqrt(2) * math.exp(math.lgamma((k + 1) / 2) - math.lgamma(k / 2))


def expected_max_abs_gaussian(n):
    # E max|g_i| = int_0^inf P(max > t) dt with P(|g| <= t) = erf(t / sqrt 2)
    t = np.linspace(0, 12, 200001)
    cdf = np.array([math.erf(v / math.sqrt(2)) for v in t[::100]])
    tail = 1 - np.interp(t, t[::100], cdf) ** n
    return float(np.sum((tail[1:] + tail[:-1]) / 2 * np.diff(t)))


def _normalized_pair(m, n=100, s=10, t=0):
    E = SensingEnsemble.gaussian(m, n, Seed(51, (t,)))
    x = normalize_to_convention(E, generate_sparse_signal(n, s, Seed(52, (t,))).values)
    return E, x


@pytest.mark.parametrize("sampler", [
    ConeSampler.sparse(30, 4), ConeSampler.sparse_difference(30, 4),
])
def test_sampler_outputs_lie_in_cone(sampler):
    for i in range(100):
        u, face = sampler.sample(Seed(53, (i,)))
        assert abs(np.linalg.norm(u) - 1) <= 1e-12
        assert np.count_nonzero(u) <= sampler.order
        assert sampler.contains(u)
        assert np.allclose(face.T @ face, np.eye(face.shape[1]), atol=1e-12)


def test_minus_line_sampler_structure():
    anchor = generate_sparse_signal(30, 4, Seed(54)).values
    sampler = ConeSampler.sparse_minus_line(30, 4, anchor)
    xbar = anchor / np.linalg.norm(anchor)
    for i in range(100):
        u, _ = sampler.sample(Seed(55, (i,)))
        assert abs(np.linalg.norm(u) - 1) <= 1e-12
        assert sampler.contains(u)
        # removing the right multiple of the anchor leaves at most s nonzeros
        assert any(np.count_nonzero(np.abs(u - c * xbar) > 1e-12) <= 4
                   for c in np.append(u[np.flatnonzero(xbar)] / xbar[np.flatnonzero(xbar)], 0.0))


def test_rip_identity_and_scaled_identity():
    sampler = ConeSampler.sparse(20, 3)
    assert estimate_rip_constant(np.eye(20), sampler, 50, Seed(56)).delta_hat == pytest.approx(0, abs=1e-12)
    assert estimate_rip_constant(2 * np.eye(20), sampler, 50, Seed(56)).delta_hat == pytest.approx(3, abs=1e-12)


def test_rip_is_monotone_under_sample_inclusion():
    M = normalized_real_gaussian(20, 40, Seed(57))
    sampler = ConeSampler.sparse(40, 4)
    short = estimate_rip_constant(M, sampler, 30, Seed(58))
    long = estimate_rip_constant(M, sampler, 90, Seed(58))
    assert np.array_equal(long.values[:30], short.values)
    assert long.delta_hat >= short.delta_hat
    assert long.violations == int(np.sum(long.values > long.threshold))


def test_refinement_only_raises_the_estimate():
    M = normalized_real_gaussian(20, 40, Seed(59))
    sampler = ConeSampler.sparse(40, 4)
    plain = estimate_rip_constant(M, sampler, 40, Seed(60), refine=False)
    refined = estimate_rip_constant(M, sampler, 40, Seed(60), refine=True)
    assert np.all(refined.values >= plain.values - 1e-15)


@pytest.mark.slow
def test_gaussian_rip_at_recommended_sample_size():
    n, s = 100, 10
    m = math.ceil(12 * s * math.log(n / s))
    good = 0
    for r in range(100):
        M = normalized_real_gaussian(m, n, Seed(5, (r,)))
        rep = estimate_rip_constant(M, ConeSampler.sparse_difference(n, s), 20, Seed(6, (r,)))
        good += rep.delta_hat <= 0.5
    assert good >= 95


def test_equivalent_matrix_maps_anchor_isometrically():
    E, x = _normalized_pair(60)
    Az_x = rip_of_equivalent_matrix(E, x, ConeSampler.sparse_minus_line(100, 10, x), 5, Seed(61))
    assert Az_x.samples == 5
    from pocs.equivalent import build_equivalent_matrix
    Az = build_equivalent_matrix(E, signc(E.A @ x)).matrix
    xbar = x / np.linalg.norm(x)
    # u = x maps to e1 exactly, so the isometry error is | ||x||^-2 - 1 | on the unit vector
    assert np.linalg.norm(Az @ x) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(Az @ xbar) ** 2 == pytest.approx(1 / np.linalg.norm(x) ** 2, rel=1e-10)


def test_equivalent_matrix_rip_regimes():
    E, x = _normalized_pair(60)
    sampler = ConeSampler.sparse_minus_line(100, 10, x)
    rep = rip_of_equivalent_matrix(E, x, sampler, 10_000, Seed(62), refine=False)
    assert rep.delta_hat < 1
    E4, x4 = _normalized_pair(4)
    collapsed = 0
    for t in range(10):
        E4, x4 = _normalized_pair(4, t=t)
        s4 = ConeSampler.sparse_minus_line(100, 10, x4)
        collapsed += rip_of_equivalent_matrix(E4, x4, s4, 200, Seed(63, (t,))).delta_hat >= 1
    assert collapsed >= 8


def test_sign_product_anchor_reduces_to_l1_statistic():
    E = SensingEnsemble.gaussian(300, 20, Seed(64))
    z = generate_sparse_signal(20, 3, Seed(65)).values
    z /= np.linalg.norm(z)
    d = sign_product_vector(E.Phi, z)
    want = np.abs(E.Phi @ z).sum() / (KAPPA * 300) - 1
    assert d @ z == pytest.approx(want, abs=1e-12)


def test_sign_product_homogeneity_in_phi(rng):
    E = SensingEnsemble.gaussian(300, 20, Seed(66))
    z = rng.standard_normal(20)
    z /= np.linalg.norm(z)
    u = rng.standard_normal(20)
    u -= (u @ z) * z
    d1 = sign_product_vector(E.Phi, z)
    d2 = sign_product_vector(2 * E.Phi, z)
    assert abs(d2 @ u) == pytest.approx(2 * abs(d1 @ u), rel=1e-12)


def test_sign_product_deviation_small_at_large_m():
    E = SensingEnsemble.gaussian(2000, 50, Seed(67))
    z = Seed(68).rng().standard_normal(50)
    z /= np.linalg.norm(z)
    rep = sign_product_embedding_deviation(E, z, ConeSampler.sparse(50, 5), 100, Seed(69))
    assert rep.delta_hat <= 0.25
    with pytest.raises(ValueError):
        sign_product_embedding_deviation(E, 2 * z, ConeSampler.sparse(50, 5), 10, Seed(69))


def test_l1_concentration_mean_and_scale_invariance():
    z = Seed(70).rng().standard_normal(10)
    rep = l1_concentration_check(z, 100, 10_000, Seed(71))
    assert 0.99 <= rep.values.mean() <= 1.01
    scaled = l1_concentration_check(7 * z, 100, 200, Seed(72))
    base = l1_concentration_check(z, 100, 200, Seed(72))
    assert np.allclose(scaled.values, base.values, rtol=1e-14)
    with pytest.raises(ValueError):
        l1_concentration_check(np.zeros(4), 10, 5, Seed(0))


def test_l1_concentration_at_large_m():
    rep = l1_concentration_check(np.ones(5), 2000, 100, Seed(73), delta=0.05)
    assert rep.violations <= 1


def test_mean_width_dense_matches_chi_mean():
    n = 100
    w = gaussian_mean_width_sparse(n, n, 10_000, Seed(74))
    assert w == pytest.approx(chi_mean(n), rel=0.02)
    assert chi_mean(n) == pytest.approx(math.sqrt(n) * (1 - 1 / (4 * n)), rel=1e-3)


def test_mean_width_one_sparse_matches_extreme_value():
    w = gaussian_mean_width_sparse(100, 1, 10_000, Seed(75))
    assert w == pytest.approx(expected_max_abs_gaussian(100), rel=0.05)


def test_mean_width_envelope():
    w = gaussian_mean_width_sparse(100, 10, 10_000, Seed(76))
    assert w * w <= 4 * 10 * math.log(10)
    with pytest.raises(ValueError):
        gaussian_mean_width_sparse(5, 6, 10, Seed(0))


def test_projected_width_examples():
    n = 20
    assert projected_width_ratio(sphere_support, np.eye(n), 500, Seed(77)) == pytest.approx(1.0, abs=1e-12)
    half = np.eye(n)[: n // 2]
    ratio, se = projected_width_ratio_with_error(sphere_support, half, 10_000, Seed(78))
    assert ratio == pytest.approx(chi_mean(n // 2) / chi_mean(n), abs=max(0.02, 3 * se))
    ratio = projected_width_ratio(sparse_sphere_support(2), half, 10_000, Seed(79))
    assert ratio <= 2.1
    with pytest.raises(ValueError):
        projected_width_ratio(sphere_support, 2 * half, 10, Seed(0))


def test_noisy_rip_reduces_to_noiseless():
    E, x = _normalized_pair(60)
    sampler = ConeSampler.sparse_minus_line(100, 10, x)
    rows = noisy_rip_degradation(E, x, [0.0, 0.05], sampler, 500, Seed(80), refine=False)
    base = rip_of_equivalent_matrix(E, x, sampler, 500, Seed(80), refine=False)
    assert rows[0].delta_hat == base.delta_hat
    assert rows[0].noise_inf_norm == 0
    assert rows[1].noise_inf_norm <= 0.05
    assert rows[1].delta_hat <= rows[0].delta_hat + 9 * 0.05 + 0.1
    with pytest.raises(ValueError):
        noisy_rip_degradation(E, x, [0.2], sampler, 5, Seed(80))


@settings(max_examples=20, deadline=None)
@given(k=st.integers(1, 60), extra=st.integers(1, 40))
def test_prefix_property_for_any_lengths(k, extra):
    M = normalized_real_gaussian(10, 15, Seed(81))
    sampler = ConeSampler.sparse(15, 2)
    a = estimate_rip_constant(M, sampler, k, Seed(82), refine=False)
    b = estimate_rip_constant(M, sampler, k + extra, Seed(82), refine=False)
    assert b.delta_hat >= a.delta_hat
