"""Dense complex arithmetic and seeded random generation.

Complex vectors and matrices are plain ``numpy`` arrays of dtype
``complex128``; real ones are ``float64``.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from . import kernels

#: Mean of a unit-scale Rayleigh variable, ``E|g|`` for ``g ~ N_C(0, 2)``.
KAPPA = float(np.sqrt(np.pi / 2.0))


def _label_to_int(label) -> int:
    if isinstance(label, (bool, np.bool_)):
        return int(label)
    if isinstance(label, (int, np.integer)):
        if label < 0:
            raise ValueError(f"stream labels must be nonnegative, got {label}")
        return int(label)
    if isinstance(label, str):
        return zlib.crc32(label.encode("utf-8"))
    raise TypeError(f"unsupported stream label {label!r}")


@dataclass(frozen=True)
class Seed:
    """Counter-based seed: a 64-bit base plus a tuple of stream labels.

    Identical ``(base, labels)`` always produce identical draws, whatever
    order the streams are consumed in. String labels are hashed with CRC32.
    """

    base: int
    labels: tuple = ()

    def __post_init__(self):
        if not 0 <= int(self.base) < 2**64:
            raise ValueError(f"seed base must be a 64-bit unsigned integer, got {self.base}")
        object.__setattr__(self, "labels", tuple(_label_to_int(x) for x in self.labels))

    def child(self, *labels) -> "Seed":
        return Seed(self.base, self.labels + tuple(_label_to_int(x) for x in labels))

    def rng(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.base), spawn_key=self.labels)
        return np.random.Generator(np.random.PCG64(ss))


def as_seed(seed) -> Seed:
    if isinstance(seed, Seed):
        return seed
    return Seed(int(seed))


def sample_complex_gaussian(m: int, n: int, variance_total: float, seed) -> np.ndarray:
    """Draw an ``m x n`` matrix with i.i.d. ``N_C(0, variance_total)`` entries.

    Real and imaginary parts are independent ``N(0, variance_total / 2)``.
    """
    if m < 1 or n < 1:
        raise ValueError(f"dimensions must be positive, got ({m}, {n})")
    if not variance_total > 0:
        raise ValueError(f"variance must be positive, got {variance_total}")
    rng = as_seed(seed).rng()
    sd = np.sqrt(variance_total / 2.0)
    re = rng.standard_normal((m, n))
    im = rng.standard_normal((m, n))
    return sd * (re + 1j * im)


def signc(v) -> np.ndarray:
    """Complex sign ``v/|v|``, with ``signc(0) = 0`` (exact-zero test)."""
    return kernels.signc(v)


def norms(v) -> tuple[float, float, float]:
    """Return ``(l1, l2, linf)`` of a real or complex vector."""
    mod = np.abs(np.asarray(v)).ravel()
    if mod.size == 0:
        return 0.0, 0.0, 0.0
    linf = float(mod.max())
    if linf == 0.0:
        return 0.0, 0.0, 0.0
    # scale by linf so the squares neither underflow nor overflow
    return float(mod.sum()), linf * float(np.linalg.norm(mod / linf)), linf


def adjoint(M) -> np.ndarray:
    return np.conj(np.asarray(M)).T


def inner(u, v) -> complex:
    """Inner product ``<u, v> = u^H v`` (conjugate-linear in ``u``)."""
    return complex(np.vdot(u, v))


def stack_real(M) -> np.ndarray:
    """Real ``2m x n`` stacking ``[Re M; Im M]``.

    For real ``x``, ``||stack_real(M) @ x|| == ||M @ x||``.
    """
    M = np.asarray(M)
    return np.vstack([M.real, M.imag])
