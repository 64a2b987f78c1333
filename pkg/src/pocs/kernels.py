"""Hot-loop kernels with a compiled backend and a numpy fallback.

The Cython extension ``pocs._kernels`` is used when it was built; otherwise
the numpy implementations in ``pocs._kernels_py`` are used. Setting the
environment variable ``POCS_PURE_PYTHON=1`` forces the fallback.

Functions
---------
project_l1_ball(b, tau)
    Euclidean projection of a real vector onto ``{u : ||u||_1 <= tau}``.
hard_threshold(u, s)
    Keep the ``s`` largest-magnitude entries, ties broken by lowest index.
signc(v)
    Complex sign ``v / |v|`` with ``signc(0) = 0``.
equivalent_matrix(a, v, scale)
    Real ``(m+2, n)`` array with rows ``scale*Re(v^H a)``, ``scale*Im(v^H a)``
    and ``Im(diag(v)^* a)``.
spg_bpdn(mt, y, sigma, target, opt_tol, max_iters)
    Basis pursuit denoising loop on ``M = mt.T``; returns
    ``(x, iterations, status_code)``.
"""
import os

import numpy as np

from . import _kernels_py

if os.environ.get("POCS_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"


def project_l1_ball(b, tau):
    return _impl.project_l1_ball(np.ascontiguousarray(b, dtype=np.float64), float(tau))


def hard_threshold(u, s):
    return _impl.hard_threshold(np.ascontiguousarray(u, dtype=np.float64), int(s))


def signc(v):
    v = np.ascontiguousarray(v, dtype=np.complex128)
    return _impl.signc(v.ravel()).reshape(v.shape)


def equivalent_matrix(a, v, scale):
    return _impl.equivalent_matrix(
        np.ascontiguousarray(a, dtype=np.complex128),
        np.ascontiguousarray(v, dtype=np.complex128),
        float(scale),
    )


def spg_bpdn(mt, y, sigma, target, opt_tol, max_iters):
    return _impl.spg_bpdn(
        np.ascontiguousarray(mt, dtype=np.float64),
        np.ascontiguousarray(y, dtype=np.float64),
        float(sigma), float(target), float(opt_tol), int(max_iters),
    )


__all__ = [
    "BACKEND",
    "project_l1_ball",
    "hard_threshold",
    "signc",
    "equivalent_matrix",
    "spg_bpdn",
]
