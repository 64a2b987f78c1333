"""Signal direction recovery from phase-only measurements."""
from __future__ import annotations

import numpy as np

from ..equivalent import build_equivalent_matrix
from ..sensing import SensingEnsemble
from .bpdn import BpdnConfig, DecodeResult, bpdn_solve


def recover_direction_pocs(E: SensingEnsemble, z, epsilon: float = 0.0,
                           cfg: BpdnConfig | None = None) -> DecodeResult:
    """Estimate ``x`` (scaled so ``||A x||_1 = kappa sqrt(m)``) from ``z = signc(A x) + noise``.

    Solves basis pursuit denoising on ``A_z u = e_1`` with fidelity
    ``epsilon``. Any ``fidelity_epsilon`` in ``cfg`` is overridden.
    """
    z = np.asarray(z, dtype=np.complex128)
    if z.shape != (E.m,):
        raise ValueError(f"z has shape {z.shape}, expected ({E.m},)")
    cfg = cfg or BpdnConfig()
    cfg = BpdnConfig(epsilon, cfg.opt_tol, cfg.feas_tol, cfg.max_iters)
    Az = build_equivalent_matrix(E, z)
    e1 = np.zeros(E.m + 2)
    e1[0] = 1.0
    return bpdn_solve(Az.matrix, e1, cfg)
