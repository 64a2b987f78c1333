"""Equivalent real linear model of phase-only measurements.

For ``z = signc(A x)`` and ``x`` scaled so that ``||A x||_1 = kappa sqrt(m)``,
the real ``(m+2) x n`` matrix ``A_z`` built here maps ``x`` to
``e_1 = (1, 0, ..., 0)``. Recovering the direction of ``x`` is then an
ordinary linear inverse problem in ``A_z``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .sensing import SensingEnsemble


@dataclass(frozen=True)
class EquivalentMatrix:
    """Rows ``alpha_re``, ``alpha_im`` (normalization) over ``H`` (phase consistency).

    ``matrix`` holds the stacked dense array; the three blocks are views of it.
    """

    matrix: np.ndarray
    kappa: float

    @property
    def alpha_re(self) -> np.ndarray:
        return self.matrix[0]

    @property
    def alpha_im(self) -> np.ndarray:
        return self.matrix[1]

    @property
    def H(self) -> np.ndarray:
        return self.matrix[2:]

    @property
    def m(self) -> int:
        return self.matrix.shape[0] - 2

    @property
    def n(self) -> int:
        return self.matrix.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def build_equivalent_matrix(E: SensingEnsemble, v) -> EquivalentMatrix:
    """Build ``A_v`` from the ensemble and any complex vector ``v`` of length m.

    The map ``v -> A_v`` is linear, so ``A_{z0 + eps} = A_{z0} + A_eps``.
    """
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (E.m,):
        raise ValueError(f"vector has shape {v.shape}, expected ({E.m},)")
    scale = 1.0 / (E.kappa * np.sqrt(E.m))
    return EquivalentMatrix(kernels.equivalent_matrix(E.A, v, scale), E.kappa)


def apply_equivalent(M: EquivalentMatrix, u) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (M.n,):
        raise ValueError(f"vector has shape {u.shape}, expected ({M.n},)")
    return M.matrix @ u


@dataclass(frozen=True)
class ConsistencyReport:
    """Outcome of a phase-consistency check.

    ``strictly_positive`` reports the discarded constraint ``Re(...) > 0``;
    it never affects ``consistent``.
    """

    consistent: bool
    max_abs_imag: float
    min_real: float
    imag_violations: int
    real_violations: int
    strictly_positive: bool

    def __bool__(self) -> bool:
        return self.consistent


def check_phase_consistency(E: SensingEnsemble, z, u, tol: float = 1e-10) -> ConsistencyReport:
    """Test whether ``diag(z)^* A u`` lies in the nonnegative real orthant up to ``tol``."""
    if tol < 0:
        raise ValueError(f"tolerance must be nonnegative, got {tol}")
    z = np.asarray(z, dtype=np.complex128)
    w = z.conj() * (E.A @ np.asarray(u, dtype=np.float64))
    if w.size == 0:
        return ConsistencyReport(True, 0.0, 0.0, 0, 0, True)
    imag_bad = np.abs(w.imag) > tol
    real_bad = w.real < -tol
    return ConsistencyReport(
        consistent=not (imag_bad.any() or real_bad.any()),
        max_abs_imag=float(np.abs(w.imag).max()),
        min_real=float(w.real.min()),
        imag_violations=int(imag_bad.sum()),
        real_violations=int(real_bad.sum()),
        strictly_positive=bool((w.real > 0).all()),
    )
