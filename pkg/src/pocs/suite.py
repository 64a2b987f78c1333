"""Batch runner for the embedding and concentration batteries."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import metrics
from .equivalent import build_equivalent_matrix
from .experiments import ExperimentConfig
from .linalg import Seed, signc
from .sensing import (
    NoiseSpec,
    SensingEnsemble,
    add_bounded_noise,
    generate_sparse_signal,
    normalize_to_convention,
)


@dataclass(frozen=True)
class SuiteRow:
    battery: str
    statistic: float
    threshold: float
    passed: bool
    detail: str

    def __post_init__(self):
        object.__setattr__(self, "statistic", float(self.statistic))
        object.__setattr__(self, "threshold", float(self.threshold))
        object.__setattr__(self, "passed", bool(self.passed))


@dataclass
class SuiteReport:
    rows: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def row(self, battery: str) -> SuiteRow:
        for r in self.rows:
            if r.battery == battery:
                return r
        raise KeyError(battery)


def _normalized_pair(n, s, m, seed, kappa):
    E = SensingEnsemble.gaussian(m, n, seed.child("matrix"), kappa=kappa)
    x = generate_sparse_signal(n, s, seed.child("signal")).values
    return E, normalize_to_convention(E, x)


def l1_concentration_battery(seed: Seed, m=2000, repetitions=100, delta=0.05, n=20):
    z = seed.child("anchor").rng().standard_normal(n)
    rep = metrics.l1_concentration_check(z, m, repetitions, seed.child("phi"), delta)
    within = repetitions - rep.violations
    return SuiteRow("l1-concentration", within, 99, within >= 99,
                    f"m={m} reps={repetitions} delta={delta} max_dev={rep.delta_hat:.4g}")


def sign_product_battery(seed: Seed, n=50, s=5, m=2000, repetitions=100, samples=200,
                         bound=0.25):
    sup = np.empty(repetitions)
    for r in range(repetitions):
        rs = seed.child(r)
        E = SensingEnsemble.gaussian(m, n, rs.child("matrix"))
        anchor = rs.child("anchor").rng().standard_normal(n)
        anchor /= np.linalg.norm(anchor)
        sup[r] = metrics.sign_product_embedding_deviation(
            E, anchor, metrics.ConeSampler.sparse(n, s), samples, rs.child("cone")).delta_hat
    within = int(np.sum(sup <= bound))
    return SuiteRow("sign-product-embedding", within, 95, within >= 95,
                    f"n={n} s={s} m={m} reps={repetitions} bound={bound} worst={sup.max():.4g}")


def projected_width_pairs(n: int, seed: Seed):
    """Five (set, projector) pairs used by the projected-width battery."""
    rng = seed.child("pairs").rng()

    def rand_proj(L):
        q, _ = np.linalg.qr(rng.standard_normal((n, L)))
        return q.T

    half = np.eye(n)[: n // 2]
    points = rng.standard_normal((50, n))
    points /= np.linalg.norm(points, axis=1, keepdims=True)
    return [
        ("sphere/identity", metrics.sphere_support, np.eye(n)),
        ("sphere/half-coordinates", metrics.sphere_support, half),
        ("sparse3/random5", metrics.sparse_sphere_support(3), rand_proj(5)),
        ("points50/random10", points, rand_proj(10)),
        ("sparse2/half-coordinates", metrics.sparse_sphere_support(2), half),
    ]


def projected_width_battery(seed: Seed, n=20, trials=10_000):
    worst = -math.inf
    details = []
    for name, K, P in projected_width_pairs(n, seed):
        ratio, se = metrics.projected_width_ratio_with_error(K, P, trials, seed.child(name))
        worst = max(worst, ratio - 3 * se)
        details.append(f"{name}={ratio:.3f}")
    return SuiteRow("projected-width", worst, 2.0, worst <= 2.0, " ".join(details))


def noise_image_battery(seed: Seed, kappa, n=100, s=10, m=500, taus=(0.01, 0.05, 0.1),
                        trials=100, delta=0.2):
    worst_count = trials
    details = []
    for i, tau in enumerate(taus):
        bound = math.sqrt(2) * tau * (1 + delta) / (1 - delta)
        ok = 0
        for t in range(trials):
            ts = seed.child(i, t)
            E, x = _normalized_pair(n, s, m, ts, kappa)
            z0 = signc(E.A @ x)
            eps = add_bounded_noise(z0, NoiseSpec("uniform-disc", tau), ts.child("noise")) - z0
            ok += np.linalg.norm(build_equivalent_matrix(E, eps).matrix @ x) <= bound
        worst_count = min(worst_count, ok)
        details.append(f"tau={tau}:{ok}/{trials}")
    return SuiteRow("noise-image-bound", worst_count, 99, worst_count >= 99, " ".join(details))


def equivalence_battery(seed: Seed, kappa, n=100, s=10, m=50, pairs=1000):
    worst = 0.0
    for k in range(pairs):
        E, x = _normalized_pair(n, s, m, seed.child(k), kappa)
        Az = build_equivalent_matrix(E, signc(E.A @ x)).matrix
        img = Az @ x
        img[0] -= 1.0
        worst = max(worst, np.linalg.norm(img), np.linalg.norm(Az[2:] @ x))
    return SuiteRow("equivalent-model-exactness", worst, 1e-9, worst <= 1e-9,
                    f"pairs={pairs} n={n} s={s} m={m}")


def rip_battery(seed: Seed, kappa, m, n=100, s=10, samples=10_000):
    E, x = _normalized_pair(n, s, m, seed, kappa)
    sampler = metrics.ConeSampler.sparse_minus_line(n, s, x)
    rep = metrics.rip_of_equivalent_matrix(E, x, sampler, samples, seed.child("cone"),
                                           refine=False)
    return SuiteRow("equivalent-rip", rep.delta_hat, 1.0, rep.delta_hat < 1.0,
                    f"m={m} n={n} s={s} samples={samples} (sampled lower bound)")


def noisy_rip_battery(seed: Seed, kappa, m=60, n=100, s=10, tau=0.05, samples=2000):
    E, x = _normalized_pair(n, s, m, seed, kappa)
    sampler = metrics.ConeSampler.sparse_minus_line(n, s, x)
    rows = metrics.noisy_rip_degradation(E, x, [0.0, tau], sampler, samples, seed.child("cone"),
                                         refine=False)
    limit = rows[0].delta_hat + 9 * tau + 0.1
    return SuiteRow("noisy-rip", rows[1].delta_hat, limit, rows[1].delta_hat <= limit,
                    f"m={m} tau={tau} delta0={rows[0].delta_hat:.4g}")


def mean_width_battery(seed: Seed, n=100, s=10, trials=10_000):
    w = metrics.gaussian_mean_width_sparse(n, s, trials, seed)
    limit = 4 * s * math.log(n / s)
    return SuiteRow("mean-width-envelope", w * w, limit, w * w <= limit, f"n={n} s={s} w={w:.4g}")


def run_metrics_suite(cfg: ExperimentConfig) -> SuiteReport:
    """Run every battery; the equivalent-matrix RIP row uses ``cfg.rip_m`` measurements."""
    root = Seed(cfg.base_seed, ("metrics-suite",))
    return SuiteReport([
        l1_concentration_battery(root.child("l1")),
        sign_product_battery(root.child("spe")),
        projected_width_battery(root.child("width")),
        noise_image_battery(root.child("noise-image"), cfg.kappa),
        equivalence_battery(root.child("equivalence"), cfg.kappa),
        rip_battery(root.child("rip"), cfg.kappa, cfg.rip_m),
        noisy_rip_battery(root.child("noisy-rip"), cfg.kappa),
        mean_width_battery(root.child("width-sparse")),
    ])
