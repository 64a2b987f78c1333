"""Sparse test signals and the linear, phase-only and noisy sensing models."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .linalg import KAPPA, Seed, as_seed, sample_complex_gaussian, signc, stack_real


class DegenerateSignalError(ValueError):
    """Raised when ``A x = 0`` so the amplitude convention cannot be imposed."""


@dataclass(frozen=True)
class SparseSignal:
    values: np.ndarray
    support: np.ndarray

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def s(self) -> int:
        return self.support.size


@dataclass(frozen=True)
class SensingEnsemble:
    """Complex sensing matrix ``A = Phi / sqrt(m)`` with its amplitude constant.

    Parameters
    ----------
    Phi : ndarray, shape (m, n)
        Unnormalized complex matrix, typically ``N_C(0, 2)`` entries.
    kappa : float
        Constant of the convention ``||A x||_1 = kappa * sqrt(m)``.
    seed : Seed, optional
        Seed the matrix was drawn from, kept for provenance only.
    """

    Phi: np.ndarray
    kappa: float = KAPPA
    seed: Seed | None = None
    A: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        Phi = np.ascontiguousarray(self.Phi, dtype=np.complex128)
        if Phi.ndim != 2:
            raise ValueError("Phi must be a 2-D array")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        object.__setattr__(self, "Phi", Phi)
        object.__setattr__(self, "A", Phi / np.sqrt(Phi.shape[0]))

    @classmethod
    def gaussian(cls, m: int, n: int, seed, kappa: float = KAPPA) -> "SensingEnsemble":
        seed = as_seed(seed)
        return cls(sample_complex_gaussian(m, n, 2.0, seed), kappa=kappa, seed=seed)

    @property
    def m(self) -> int:
        return self.Phi.shape[0]

    @property
    def n(self) -> int:
        return self.Phi.shape[1]

    def stacked_real(self) -> np.ndarray:
        """``[Re A; Im A]``, the real ``2m x n`` form of the linear model."""
        return stack_real(self.A)


class NoiseKind(str, Enum):
    UNIFORM_DISC = "uniform-disc"
    UNIFORM_PHASE = "uniform-phase"


@dataclass(frozen=True)
class NoiseSpec:
    kind: NoiseKind = NoiseKind.UNIFORM_DISC
    tau: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if not self.tau >= 0:
            raise ValueError(f"noise level must be nonnegative, got {self.tau}")


def generate_sparse_signal(n: int, s: int, seed) -> SparseSignal:
    """Uniformly random support of size ``s``, standard normal values on it."""
    if not 1 <= s <= n:
        raise ValueError(f"need 1 <= s <= n, got s={s}, n={n}")
    rng = as_seed(seed).rng()
    support = np.sort(rng.choice(n, size=s, replace=False))
    values = np.zeros(n)
    values[support] = rng.standard_normal(s)
    # a zero draw is a measure-zero event but must not break |supp| = ||x||_0
    support = support[values[support] != 0]
    return SparseSignal(values, support)


def _check_signal(E: SensingEnsemble, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (E.n,):
        raise ValueError(f"signal has shape {x.shape}, expected ({E.n},)")
    return x


def measure_linear(E: SensingEnsemble, x, noise=None) -> np.ndarray:
    """Complex measurements ``A x + noise``."""
    x = _check_signal(E, x)
    y = E.A @ x
    if noise is not None:
        noise = np.asarray(noise, dtype=np.complex128)
        if noise.shape != (E.m,):
            raise ValueError(f"noise has shape {noise.shape}, expected ({E.m},)")
        y = y + noise
    return y


def measure_phase_only(E: SensingEnsemble, x) -> np.ndarray:
    """Phase-only measurements ``signc(A x)``."""
    return signc(E.A @ _check_signal(E, x))


def _uniform_disc(rng: np.random.Generator, size: int, radius: float) -> np.ndarray:
    out = np.empty(size, dtype=np.complex128)
    todo = np.arange(size)
    while todo.size:
        cand = rng.uniform(-radius, radius, todo.size) + 1j * rng.uniform(-radius, radius, todo.size)
        ok = np.abs(cand) <= radius
        out[todo[ok]] = cand[ok]
        todo = todo[~ok]
    return out


def add_bounded_noise(z0, spec: NoiseSpec, seed) -> np.ndarray:
    """Corrupt ``z0`` with noise whose entries are bounded by ``spec.tau``.

    ``uniform-disc`` adds ``eps_k ~ U(tau * unit disc)``; ``uniform-phase``
    multiplies by ``exp(i xi_k)`` with ``xi_k ~ U([-tau, tau])``.
    """
    z0 = np.asarray(z0, dtype=np.complex128)
    if spec.tau == 0:
        return z0.copy()
    rng = as_seed(seed).rng()
    if spec.kind is NoiseKind.UNIFORM_DISC:
        return z0 + _uniform_disc(rng, z0.size, spec.tau)
    xi = rng.uniform(-spec.tau, spec.tau, z0.size)
    return np.exp(1j * xi) * z0


def normalize_to_convention(E: SensingEnsemble, x) -> np.ndarray:
    """Rescale ``x`` so that ``||A x||_1 = kappa * sqrt(m)``."""
    x = _check_signal(E, x)
    l1 = np.abs(E.A @ x).sum()
    if l1 == 0:
        raise DegenerateSignalError("A x = 0, the amplitude convention is undefined")
    return x * (E.kappa * np.sqrt(E.m) / l1)


def stacked_measurements(y) -> np.ndarray:
    """Real stacking ``[Re y; Im y]`` matching :meth:`SensingEnsemble.stacked_real`."""
    y = np.asarray(y)
    return np.concatenate([y.real, y.imag])
