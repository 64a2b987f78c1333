"""Basis pursuit denoising by root finding on the Pareto curve.

Solves::

    minimize ||u||_1  subject to  ||M u - y||_2 <= epsilon

by following the curve ``phi(tau) = min_{||u||_1 <= tau} ||M u - y||``.
Each ``tau`` subproblem is an l1-ball constrained least-squares problem
solved by spectral projected gradient with a non-monotone curvilinear line
search; ``tau`` is advanced by Newton steps on ``phi(tau) = epsilon`` using
``phi'(tau) = -||M^T r||_inf / ||r||``. Each step is taken to the dual
lower bound ``(y^T r - epsilon ||r||) / ||M^T r||_inf`` on the optimal l1
value, which coincides with the Newton step at an exact subproblem
solution and can never overshoot. The iterates therefore approach the
root from below and the first feasible iterate is l1-minimal up to the
feasibility tolerance.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .. import kernels

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BpdnConfig:
    """Tolerances for :func:`bpdn_solve`.

    Parameters
    ----------
    fidelity_epsilon : float
        Radius of the l2 data-fidelity constraint.
    opt_tol : float
        Relative duality-gap tolerance for each ``tau`` subproblem.
    feas_tol : float
        Relative feasibility tolerance: a result is converged when
        ``||M u - y|| <= epsilon (1 + feas_tol) + feas_tol ||y||``.
    max_iters : int
        Cap on projected-gradient iterations over all subproblems.
    """

    fidelity_epsilon: float = 0.0
    opt_tol: float = 1e-6
    feas_tol: float = 1e-8
    max_iters: int = 100_000

    def __post_init__(self):
        if not self.fidelity_epsilon >= 0:
            raise ValueError(f"fidelity_epsilon must be nonnegative, got {self.fidelity_epsilon}")
        if not (self.opt_tol > 0 and self.feas_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass
class DecodeResult:
    estimate: np.ndarray
    iterations: int
    residual_norm: float
    l1_value: float
    converged: bool
    status: str = ""


STATUS = ("root-found", "least-squares", "iteration-cap", "line-search-failure")
ROOT_FOUND = 0


def bpdn_solve(M, y, cfg: BpdnConfig | None = None) -> DecodeResult:
    """Approximate ``argmin ||u||_1 s.t. ||M u - y|| <= cfg.fidelity_epsilon``.

    Returns the zero vector immediately when ``||y|| <= epsilon``. When the
    constraint is unreachable (``y`` has no feasible preimage within
    ``epsilon``), or the iteration cap is hit, ``converged`` is False and the
    iterate with the smallest residual is returned.
    """
    cfg = cfg or BpdnConfig()
    M = np.asarray(M, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if M.ndim != 2 or y.shape != (M.shape[0],):
        raise ValueError(f"shape mismatch: M is {M.shape}, y is {y.shape}")
    n = M.shape[1]
    sigma = cfg.fidelity_epsilon
    ynorm = float(np.linalg.norm(y))
    if ynorm <= sigma:
        return DecodeResult(np.zeros(n), 0, ynorm, 0.0, True, "zero-feasible")

    target = sigma * (1.0 + cfg.feas_tol) + cfg.feas_tol * ynorm
    MT = np.ascontiguousarray(M.T)
    x, it, code = kernels.spg_bpdn(MT, y, sigma, target, cfg.opt_tol, cfg.max_iters)
    status = STATUS[code]
    if code != ROOT_FOUND:
        logger.debug("bpdn stopped with %s after %d iterations", status, it)
    resid = float(np.linalg.norm(y - M @ x))
    converged = code == ROOT_FOUND and resid <= target
    return DecodeResult(x, it, resid, float(np.abs(x).sum()), converged, status)
