"""Monte-Carlo checks of embedding and concentration properties.

Every supremum over a cone is approximated from below by sampling, so each
``delta_hat`` reported here is a lower bound on the true constant. For
sparse cones each sampled point also refines over its whole face (the span
of its support, plus the anchor line when present) using the extreme
singular values of the restricted matrix, which is exact within that face.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .equivalent import build_equivalent_matrix
from .linalg import KAPPA, Seed, as_seed, sample_complex_gaussian, signc
from .sensing import NoiseKind, NoiseSpec, SensingEnsemble, add_bounded_noise


class ConeKind(str, Enum):
    SPARSE = "sparse"
    SPARSE_DIFFERENCE = "sparse-difference"
    SPARSE_MINUS_LINE = "sparse-minus-line"


@dataclass(frozen=True)
class ConeSampler:
    """Random unit vectors from a sparse cone.

    ``sparse`` draws from ``Sigma_s``, ``sparse-difference`` from
    ``Sigma_2s`` (which contains ``Sigma_s - Sigma_s``), and
    ``sparse-minus-line`` draws ``w + t * anchor/||anchor||`` with ``w`` in
    ``Sigma_s`` and ``t ~ U[-2, 2]``, covering ``Sigma_s - R anchor``.
    """

    kind: ConeKind
    n: int
    s: int
    anchor: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ConeKind(self.kind))
        if not 1 <= self.order <= self.n:
            raise ValueError(f"cone sparsity {self.order} incompatible with n={self.n}")
        if self.kind is ConeKind.SPARSE_MINUS_LINE:
            if self.anchor is None:
                raise ValueError("sparse-minus-line cone needs an anchor vector")
            a = np.asarray(self.anchor, dtype=np.float64)
            if a.shape != (self.n,) or not np.any(a):
                raise ValueError("anchor must be a nonzero vector of length n")
            object.__setattr__(self, "anchor", a / np.linalg.norm(a))

    @classmethod
    def sparse(cls, n, s):
        return cls(ConeKind.SPARSE, n, s)

    @classmethod
    def sparse_difference(cls, n, s):
        return cls(ConeKind.SPARSE_DIFFERENCE, n, s)

    @classmethod
    def sparse_minus_line(cls, n, s, anchor):
        return cls(ConeKind.SPARSE_MINUS_LINE, n, s, anchor)

    @property
    def order(self) -> int:
        return 2 * self.s if self.kind is ConeKind.SPARSE_DIFFERENCE else self.s

    def sample(self, seed) -> tuple[np.ndarray, np.ndarray]:
        """Return a unit vector ``u`` and an orthonormal basis of the face containing it."""
        rng = as_seed(seed).rng()
        k = self.order
        support = np.sort(rng.choice(self.n, size=k, replace=False))
        w = np.zeros(self.n)
        w[support] = rng.standard_normal(k)
        face = np.zeros((self.n, k))
        face[support, np.arange(k)] = 1.0
        if self.kind is ConeKind.SPARSE_MINUS_LINE:
            t = rng.uniform(-2.0, 2.0)
            w = w + t * self.anchor
            face, _ = np.linalg.qr(np.column_stack([face, self.anchor]))
        return w / np.linalg.norm(w), face

    def contains(self, u, tol: float = 1e-9) -> bool:
        u = np.asarray(u, dtype=np.float64)
        if self.kind is ConeKind.SPARSE_MINUS_LINE:
            # u - c*anchor must be s-sparse for some c; test the best c per support pattern
            candidates = [u]
            for j in np.nonzero(self.anchor)[0]:
                candidates.append(u - (u[j] / self.anchor[j]) * self.anchor)
            return any(np.sum(np.abs(c) > tol) <= self.s for c in candidates)
        return np.sum(np.abs(u) > tol) <= self.order


@dataclass
class EmbeddingReport:
    """Worst observed deviation over ``samples`` draws.

    ``violations`` counts draws whose deviation exceeds ``threshold``;
    ``values`` holds the per-draw deviations.
    """

    delta_hat: float
    samples: int
    violations: int
    threshold: float
    values: np.ndarray = field(repr=False, default=None)


def _report(values, threshold) -> EmbeddingReport:
    values = np.asarray(values, dtype=np.float64)
    return EmbeddingReport(
        delta_hat=float(values.max()) if values.size else 0.0,
        samples=int(values.size),
        violations=int(np.sum(values > threshold)),
        threshold=float(threshold),
        values=values,
    )


def _isometry_deviation(M, u, face, refine):
    Mu = M @ u
    dev = abs(Mu @ Mu - 1.0)
    if refine:
        sv = np.linalg.svd(M @ face, compute_uv=False)
        dev = max(dev, sv[0] ** 2 - 1.0, 1.0 - sv[-1] ** 2)
    return dev


def estimate_rip_constant(M, sampler: ConeSampler, trials: int, seed,
                          threshold: float = 1.0, refine: bool = True) -> EmbeddingReport:
    """Lower bound on ``sup |‖M u‖² - 1|`` over unit vectors of the sampler's cone.

    Sample ``i`` is drawn from ``seed.child(i)``, so a run with more trials
    sees a superset of the draws of a shorter run.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    M = np.asarray(M, dtype=np.float64)
    seed = as_seed(seed)
    values = np.empty(trials)
    for i in range(trials):
        u, face = sampler.sample(seed.child(i))
        values[i] = _isometry_deviation(M, u, face, refine)
    return _report(values, threshold)


def normalized_real_gaussian(m: int, n: int, seed) -> np.ndarray:
    """``[Re Phi; Im Phi] / sqrt(2m)`` for ``Phi ~ N_C(0, 2)``: ``2m x n``, ``E‖Mu‖² = ‖u‖²``."""
    Phi = sample_complex_gaussian(m, n, 2.0, seed)
    return np.vstack([Phi.real, Phi.imag]) / np.sqrt(2.0 * m)


def rip_of_equivalent_matrix(E: SensingEnsemble, x, sampler: ConeSampler, trials: int,
                             seed, threshold: float = 1.0,
                             refine: bool = True) -> EmbeddingReport:
    """RIP estimate of ``A_z`` for ``z = signc(A x)`` (``x`` under the amplitude convention)."""
    z = signc(E.A @ np.asarray(x, dtype=np.float64))
    Az = build_equivalent_matrix(E, z)
    return estimate_rip_constant(Az.matrix, sampler, trials, seed, threshold, refine)


def sign_product_vector(Phi, anchor, kappa: float = KAPPA) -> np.ndarray:
    """Complex ``d`` with ``d . u = (1/(kappa m)) <signc(Phi z), Phi u> - <z, u>``."""
    Phi = np.asarray(Phi, dtype=np.complex128)
    anchor = np.asarray(anchor, dtype=np.float64)
    m = Phi.shape[0]
    c = Phi.T @ signc(Phi @ anchor).conj()
    return c / (kappa * m) - anchor


def sign_product_embedding_deviation(E: SensingEnsemble, z_anchor, sampler: ConeSampler,
                                     trials: int, seed, threshold: float = 0.25,
                                     refine: bool = True) -> EmbeddingReport:
    """Sup over sampled unit ``u`` of ``|(1/(kappa m)) <signc(Phi z), Phi u> - <z, u>|``."""
    z_anchor = np.asarray(z_anchor, dtype=np.float64)
    if abs(np.linalg.norm(z_anchor) - 1.0) > 1e-9:
        raise ValueError("anchor must have unit norm")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    d = sign_product_vector(E.Phi, z_anchor, E.kappa)
    dd = np.vstack([d.real, d.imag])
    seed = as_seed(seed)
    values = np.empty(trials)
    for i in range(trials):
        u, face = sampler.sample(seed.child(i))
        dev = abs(d @ u)
        if refine:
            dev = max(dev, np.linalg.svd(dd @ face, compute_uv=False)[0])
        values[i] = dev
    return _report(values, threshold)


def l1_concentration_check(z, m: int, repetitions: int, seed, delta: float = 0.05,
                           kappa: float = KAPPA) -> EmbeddingReport:
    """Distribution of ``‖Phi z‖_1 / (kappa m ‖z‖)`` over fresh ``Phi ~ N_C(0, 2)``.

    ``values`` holds the statistic itself; ``delta_hat`` its largest
    deviation from 1 and ``violations`` the count of deviations above ``delta``.
    """
    z = np.asarray(z, dtype=np.float64)
    znorm = np.linalg.norm(z)
    if znorm == 0:
        raise ValueError("z must be nonzero")
    seed = as_seed(seed)
    zbar = z / znorm
    stats = np.empty(repetitions)
    for r in range(repetitions):
        Phi = sample_complex_gaussian(m, z.size, 2.0, seed.child(r))
        stats[r] = np.abs(Phi @ zbar).sum() / (kappa * m)
    rep = _report(np.abs(stats - 1.0), delta)
    rep.values = stats
    return rep


def gaussian_mean_width_sparse(n: int, s: int, trials: int, seed) -> float:
    """Monte-Carlo ``E sup_{u in Sigma_s, ‖u‖=1} <g, u>``: mean l2 norm of the top-s entries of g."""
    if not 1 <= s <= n:
        raise ValueError(f"need 1 <= s <= n, got s={s}, n={n}")
    g = as_seed(seed).rng().standard_normal((trials, n))
    top = -np.partition(-np.abs(g), s - 1, axis=1)[:, :s]
    return float(np.linalg.norm(top, axis=1).mean())


# support functions h(g) = sup_{u in K} <g, u> for common sets

def sphere_support(g) -> float:
    return float(np.linalg.norm(g))


def sparse_sphere_support(s: int) -> Callable:
    def h(g):
        a = np.abs(np.asarray(g))
        return float(np.linalg.norm(np.partition(a, a.size - s)[a.size - s:]))
    return h


def finite_set_support(points) -> Callable:
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    return lambda g: float(np.max(points @ g))


def projected_width_ratio_with_error(K, P, trials: int, seed) -> tuple[float, float]:
    """Ratio ``w(P K) / w(K)`` and its delta-method standard error.

    ``K`` is either a support function ``g -> sup_{u in K} <g, u>`` or an
    array of points. Both widths are estimated from the same draws
    ``g' ~ N(0, I_n)``, using ``P g'`` as the Gaussian vector of the range.
    """
    P = np.atleast_2d(np.asarray(P, dtype=np.float64))
    if not np.allclose(P @ P.T, np.eye(P.shape[0]), atol=1e-10):
        raise ValueError("P must have orthonormal rows")
    h = K if callable(K) else finite_set_support(K)
    G = as_seed(seed).rng().standard_normal((trials, P.shape[1]))
    PtP = P.T @ P
    a = np.array([h(PtP @ g) for g in G])
    b = np.array([h(g) for g in G])
    ratio = a.mean() / b.mean()
    stderr = np.std(a - ratio * b, ddof=1) / np.sqrt(trials) / b.mean() if trials > 1 else np.inf
    return float(ratio), float(stderr)


def projected_width_ratio(K, P, trials: int, seed) -> float:
    return projected_width_ratio_with_error(K, P, trials, seed)[0]


@dataclass(frozen=True)
class NoisyRipRow:
    tau: float
    delta_hat: float
    noise_inf_norm: float


def noisy_rip_degradation(E: SensingEnsemble, x, tau_grid, sampler: ConeSampler, trials: int,
                          seed, kind: NoiseKind = NoiseKind.UNIFORM_DISC,
                          refine: bool = True) -> list[NoisyRipRow]:
    """RIP estimate of ``A_{z0 + eps}`` for each noise level in ``tau_grid``.

    The cone draws come from ``seed`` for every level, so the ``tau = 0``
    row equals :func:`rip_of_equivalent_matrix` with the same seed.
    """
    seed = as_seed(seed)
    x = np.asarray(x, dtype=np.float64)
    z0 = signc(E.A @ x)
    rows = []
    for i, tau in enumerate(tau_grid):
        if not 0 <= tau < 1 / 9:
            raise ValueError(f"noise level {tau} outside [0, 1/9)")
        z = add_bounded_noise(z0, NoiseSpec(kind, tau), seed.child("noise", i))
        Az = build_equivalent_matrix(E, z)
        rep = estimate_rip_constant(Az.matrix, sampler, trials, seed, refine=refine)
        rows.append(NoisyRipRow(float(tau), rep.delta_hat, float(np.abs(z - z0).max(initial=0.0))))
    return rows
