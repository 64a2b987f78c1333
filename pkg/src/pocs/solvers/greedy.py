"""Hard-thresholding baselines: IHT and projected back-projection."""
from __future__ import annotations

import numpy as np

from .. import kernels
from ..sensing import DegenerateSignalError, SensingEnsemble, normalize_to_convention
from .bpdn import DecodeResult


def hard_threshold(u, s: int) -> np.ndarray:
    """Keep the ``s`` largest-magnitude entries of ``u``; ties go to the lowest index."""
    return kernels.hard_threshold(u, s)


def iht_solve(M, y, s: int, max_iters: int = 1000, step: float = 1.0,
              rel_tol: float = 1e-8) -> DecodeResult:
    """Iterative hard thresholding ``u <- H_s(u + step * M^T (y - M u))``.

    Stops when ``||u_new - u|| <= rel_tol * ||u_new||`` or after
    ``max_iters`` iterations.
    """
    M = np.asarray(M, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = M.shape[1]
    if not 1 <= s <= n:
        raise ValueError(f"need 1 <= s <= n, got s={s}, n={n}")
    u = np.zeros(n)
    converged = False
    it = 0
    while it < max_iters:
        it += 1
        u_new = hard_threshold(u + step * (M.T @ (y - M @ u)), s)
        change = np.linalg.norm(u_new - u)
        u = u_new
        if change <= rel_tol * np.linalg.norm(u):
            converged = True
            break
    resid = float(np.linalg.norm(y - M @ u))
    return DecodeResult(u, it, resid, float(np.abs(u).sum()), converged,
                        "converged" if converged else "iteration-cap")


def pbp_estimate(E: SensingEnsemble, z, s: int) -> np.ndarray:
    """Projected back-projection ``H_s(Re(A^* z))``, rescaled to the amplitude convention.

    Returns zeros when the back-projection vanishes (e.g. ``z = 0``).
    """
    if not 1 <= s <= E.n:
        raise ValueError(f"need 1 <= s <= n, got s={s}, n={E.n}")
    z = np.asarray(z, dtype=np.complex128)
    if z.shape != (E.m,):
        raise ValueError(f"z has shape {z.shape}, expected ({E.m},)")
    back = (E.A.conj().T @ z).real / (E.kappa * np.sqrt(E.m))
    u = hard_threshold(back, s)
    try:
        return normalize_to_convention(E, u)
    except DegenerateSignalError:
        return np.zeros(E.n)
