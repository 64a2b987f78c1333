# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.

Every function here has a numpy twin in ``_kernels_py`` with an identical
signature and identical results (up to floating-point summation order).
"""
import numpy as np

from libc.math cimport INFINITY, fabs, fmax, sqrt
from libc.stdlib cimport malloc, free, qsort


cdef struct _Item:
    double key
    Py_ssize_t idx


cdef int _cmp_desc(const void *a, const void *b) noexcept nogil:
    cdef double ka = (<_Item *> a).key
    cdef double kb = (<_Item *> b).key
    if ka > kb:
        return -1
    if ka < kb:
        return 1
    # lowest index first among equal keys
    if (<_Item *> a).idx < (<_Item *> b).idx:
        return -1
    if (<_Item *> a).idx > (<_Item *> b).idx:
        return 1
    return 0


cdef int _cmp_double_desc(const void *a, const void *b) noexcept nogil:
    cdef double da = (<double *> a)[0]
    cdef double db = (<double *> b)[0]
    if da > db:
        return -1
    if da < db:
        return 1
    return 0


def project_l1_ball(const double[::1] b, double tau):
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t i
    cdef double total = 0.0, csum = 0.0, theta = 0.0, v
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(n):
        total += fabs(b[i])
    if total <= tau:
        for i in range(n):
            o[i] = b[i]
        return out
    if tau <= 0.0:
        return out

    cdef double *mags = <double *> malloc(n * sizeof(double))
    if mags == NULL:
        raise MemoryError()
    try:
        for i in range(n):
            mags[i] = fabs(b[i])
        qsort(mags, n, sizeof(double), _cmp_double_desc)
        theta = mags[0] - tau  # first index always qualifies in exact arithmetic
        for i in range(n):
            csum += mags[i]
            v = (csum - tau) / (i + 1)
            if i > 0 and v >= mags[i]:
                break
            theta = v
    finally:
        free(mags)

    for i in range(n):
        v = fabs(b[i]) - theta
        if v > 0.0:
            o[i] = v if b[i] > 0.0 else -v
    return out


def hard_threshold(const double[::1] u, Py_ssize_t s):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i
    if s < 1 or s > n:
        raise ValueError(f"sparsity s={s} must lie in [1, {n}]")
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef _Item *items = <_Item *> malloc(n * sizeof(_Item))
    if items == NULL:
        raise MemoryError()
    try:
        for i in range(n):
            items[i].key = fabs(u[i])
            items[i].idx = i
        qsort(items, n, sizeof(_Item), _cmp_desc)
        for i in range(s):
            o[items[i].idx] = u[items[i].idx]
    finally:
        free(items)
    return out


def signc(const double complex[::1] v):
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t i
    cdef double re, im, mod, big
    out = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    for i in range(n):
        re = v[i].real
        im = v[i].imag
        if re == 0.0 and im == 0.0:
            continue
        # rescale first so tiny or huge entries neither underflow nor overflow
        big = fmax(fabs(re), fabs(im))
        re = re / big
        im = im / big
        mod = sqrt(re * re + im * im)
        o[i].real = re / mod
        o[i].imag = im / mod
    return out


def equivalent_matrix(const double complex[:, ::1] a, const double complex[::1] v,
                      double scale):
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    cdef Py_ssize_t k, j
    cdef double vr, vi, ar, ai
    if v.shape[0] != m:
        raise ValueError(f"vector length {v.shape[0]} does not match {m} rows")
    out = np.zeros((m + 2, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    for k in range(m):
        vr = v[k].real
        vi = v[k].imag
        for j in range(n):
            ar = a[k, j].real
            ai = a[k, j].imag
            o[0, j] += vr * ar + vi * ai
            o[1, j] += vr * ai - vi * ar
            o[k + 2, j] = vr * ai - vi * ar
    for j in range(n):
        o[0, j] *= scale
        o[1, j] *= scale
    return out


# ---------------------------------------------------------------------------
# basis pursuit denoising inner loop (twin of ``_kernels_py.spg_bpdn``)

cdef enum:
    N_PREV = 3
    LINE_ITERS = 10
    MAX_LINE_ERRORS = 10

cdef double STEP_MIN = 1e-16
cdef double STEP_MAX = 1e5
cdef double DEC_TOL = 1e-4
cdef double LS_TOL = 1e-6
cdef double GAMMA = 1e-4


cdef inline double _dot(const double *a, const double *b, Py_ssize_t n) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        acc += a[i] * b[i]
    return acc


cdef void _residual(const double *mt, const double *y, const double *x, double *r,
                    Py_ssize_t m, Py_ssize_t n) noexcept nogil:
    """r = y - M x, with M given by its transpose; zero entries of x are skipped."""
    cdef Py_ssize_t i, j
    cdef double xj
    cdef const double *col
    for i in range(m):
        r[i] = y[i]
    for j in range(n):
        xj = x[j]
        if xj != 0.0:
            col = mt + j * m
            for i in range(m):
                r[i] -= xj * col[i]


cdef void _neg_grad(const double *mt, const double *r, double *g,
                    Py_ssize_t m, Py_ssize_t n) noexcept nogil:
    """g = -M^T r."""
    cdef Py_ssize_t j
    for j in range(n):
        g[j] = -_dot(mt + j * m, r, m)


cdef void _project(const double *b, double tau, double *out, double *work,
                   Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    cdef double total = 0.0, csum = 0.0, theta, v
    for i in range(n):
        total += fabs(b[i])
    if total <= tau:
        for i in range(n):
            out[i] = b[i]
        return
    if tau <= 0.0:
        for i in range(n):
            out[i] = 0.0
        return
    for i in range(n):
        work[i] = fabs(b[i])
    qsort(work, n, sizeof(double), _cmp_double_desc)
    theta = work[0] - tau
    for i in range(n):
        csum += work[i]
        v = (csum - tau) / (i + 1)
        if i > 0 and v >= work[i]:
            break
        theta = v
    for i in range(n):
        v = fabs(b[i]) - theta
        if v > 0.0:
            out[i] = v if b[i] > 0.0 else -v
        else:
            out[i] = 0.0


cdef struct _Work:
    double *xnew
    double *rnew
    double *tmp
    double *sort


cdef bint _line_search_curvy(const double *x, const double *g, double f_ref,
                             const double *mt, const double *y, double tau,
                             Py_ssize_t m, Py_ssize_t n, _Work *w,
                             double *fout) noexcept nogil:
    cdef double step = 1.0, scale = 1.0, snorm = 0.0, snorm_old, gts, fnew = 0.0
    cdef double gnrm = 0.0
    cdef int nsafe = 0, it
    cdef Py_ssize_t i
    for i in range(n):
        gnrm += g[i] * g[i]
    gnrm = sqrt(gnrm / n)
    for it in range(LINE_ITERS + 1):
        for i in range(n):
            w.tmp[i] = x[i] - (step * scale) * g[i]
        _project(w.tmp, tau, w.xnew, w.sort, n)
        _residual(mt, y, w.xnew, w.rnew, m, n)
        fnew = 0.5 * _dot(w.rnew, w.rnew, m)
        gts = 0.0
        snorm_old = snorm
        snorm = 0.0
        for i in range(n):
            w.tmp[i] = w.xnew[i] - x[i]
            gts += g[i] * w.tmp[i]
            snorm += w.tmp[i] * w.tmp[i]
        gts *= scale
        fout[0] = fnew
        if gts >= 0:
            return False
        if fnew < f_ref + GAMMA * step * gts:
            return True
        step *= 0.5
        snorm = sqrt(snorm / n)
        if fabs(snorm - snorm_old) <= 1e-6 * snorm:
            # projected arc has stalled on a face; shrink the raw step instead
            scale = snorm / gnrm / (2.0 ** nsafe)
            nsafe += 1
    return False


cdef bint _line_search(double f, const double *x, const double *d, double gtd, double f_ref,
                       const double *mt, const double *y, Py_ssize_t m, Py_ssize_t n,
                       _Work *w, double *fout) noexcept nogil:
    cdef double step = 1.0, fnew = 0.0, denom, trial
    cdef int it
    cdef Py_ssize_t i
    gtd = -fabs(gtd)
    for it in range(LINE_ITERS + 1):
        for i in range(n):
            w.xnew[i] = x[i] + step * d[i]
        _residual(mt, y, w.xnew, w.rnew, m, n)
        fnew = 0.5 * _dot(w.rnew, w.rnew, m)
        fout[0] = fnew
        if fnew < f_ref + GAMMA * step * gtd:
            return True
        if step <= 0.1:
            step *= 0.5
        else:
            denom = 2.0 * (fnew - f - step * gtd)
            trial = -gtd * step * step / denom if denom != 0 else -1.0
            if not (0.1 <= trial <= 0.9 * step):
                trial = step / 2.0
            step = trial
    return False


def spg_bpdn(const double[:, ::1] mt, const double[::1] y, double sigma, double target,
             double opt_tol, long max_iters):
    """Pareto root finding for basis pursuit denoising on ``M = mt.T``.

    Returns ``(x, iterations, status_code)`` exactly like the numpy twin.
    """
    cdef Py_ssize_t n = mt.shape[0], m = mt.shape[1]
    if y.shape[0] != m:
        raise ValueError(f"y has length {y.shape[0]}, expected {m}")
    x_arr = np.zeros(n)
    best_arr = np.zeros(n)
    cdef double[::1] xv = x_arr, bv = best_arr
    cdef double *x = &xv[0] if n > 0 else NULL
    cdef double *best_x = &bv[0] if n > 0 else NULL
    cdef double *buf = <double *> malloc((9 * n + 3 * m) * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double *xold = buf
    cdef double *g = buf + n
    cdef double *gold = buf + 2 * n
    cdef double *gs = buf + 3 * n
    cdef double *dx = buf + 4 * n
    cdef _Work w
    w.xnew = buf + 5 * n
    w.tmp = buf + 6 * n
    w.sort = buf + 7 * n
    cdef double *spare = buf + 8 * n
    cdef double *r = buf + 9 * n
    w.rnew = buf + 9 * n + m
    cdef double *rold = buf + 9 * n + 2 * m
    cdef const double *M = &mt[0, 0]
    cdef const double *Y = &y[0]

    cdef double lipschitz = 0.0, tau = 0.0, f, fold, f_ref, gstep, step_max
    cdef double rnorm, gnorm, best_r, gap, rgap, aerror1, rerror2, fchange, tau_lb
    cdef double sty, sts, fnew = 0.0, gtd
    cdef double last_f[N_PREV]
    cdef bint updated_tau = False, stalled = False, want_update, ok
    cdef int line_errors = 0, code = -1
    cdef long it = 0
    cdef Py_ssize_t i, k
    with nogil:
        for i in range(n * m):
            lipschitz += M[i] * M[i]
        for i in range(m):
            r[i] = Y[i]
        f = 0.5 * _dot(r, r, m)
        _neg_grad(M, r, g, m, n)
        gstep = STEP_MAX
        step_max = STEP_MAX
        for k in range(N_PREV):
            last_f[k] = -INFINITY
        last_f[0] = f
        fold = f
        best_r = sqrt(2.0 * f)
        while True:
            rnorm = sqrt(2.0 * f)
            gnorm = 0.0
            for i in range(n):
                gnorm = fmax(gnorm, fabs(g[i]))
            if rnorm < best_r:
                best_r = rnorm
                for i in range(n):
                    best_x[i] = x[i]
            if rnorm <= target:
                code = 0
                break
            if gnorm <= LS_TOL * rnorm:
                code = 1
                break
            if it >= max_iters:
                code = 2
                break

            gap = tau * gnorm
            for i in range(m):
                gap += r[i] * (r[i] - Y[i])
            rgap = fabs(gap) / fmax(1.0, f)
            aerror1 = rnorm - sigma
            rerror2 = fabs(f - 0.5 * sigma * sigma) / fmax(1.0, f)
            fchange = fabs(f - fold)
            want_update = (
                (fchange <= DEC_TOL * f and rnorm > 2.0 * sigma)
                or (fchange <= 0.1 * f * fabs(aerror1) and rnorm <= 2.0 * sigma)
                or rgap <= fmax(opt_tol, rerror2) * 1e-2
            )
            if want_update and not updated_tau and aerror1 > 0:
                tau_lb = (_dot(Y, r, m) - sigma * rnorm) / gnorm
                if tau_lb > tau:
                    tau = tau_lb
                    updated_tau = True
                elif stalled:
                    tau += rnorm * aerror1 / gnorm
                    updated_tau = True
                stalled = False
            else:
                updated_tau = False

            it += 1
            for i in range(n):
                xold[i] = x[i]
                gold[i] = g[i]
                gs[i] = gstep * g[i]
            for i in range(m):
                rold[i] = r[i]
            fold = f
            f_ref = last_f[0]
            for k in range(1, N_PREV):
                f_ref = f_ref if f_ref >= last_f[k] else last_f[k]

            ok = _line_search_curvy(xold, gs, f_ref, M, Y, tau, m, n, &w, &fnew)
            if not ok:
                for i in range(n):
                    w.tmp[i] = xold[i] - gs[i]
                _project(w.tmp, tau, dx, w.sort, n)
                gtd = 0.0
                for i in range(n):
                    dx[i] -= xold[i]
                    gtd += gold[i] * dx[i]
                ok = _line_search(fold, xold, dx, gtd, f_ref, M, Y, m, n, &w, &fnew)
            if not ok:
                # a 1/L projected-gradient step cannot increase f
                for i in range(n):
                    w.tmp[i] = xold[i] - gold[i] / lipschitz
                _project(w.tmp, tau, w.xnew, w.sort, n)
                _residual(M, Y, w.xnew, w.rnew, m, n)
                fnew = 0.5 * _dot(w.rnew, w.rnew, m)
                ok = fnew < fold
            if not ok:
                stalled = True
                line_errors += 1
                if line_errors > MAX_LINE_ERRORS:
                    code = 3
                    break
                step_max /= 10.0
                gstep = gstep if gstep <= step_max else step_max
                continue

            for i in range(n):
                x[i] = w.xnew[i]
            for i in range(m):
                r[i] = w.rnew[i]
            f = fnew
            _neg_grad(M, r, g, m, n)
            sty = 0.0
            sts = 0.0
            for i in range(n):
                spare[i] = x[i] - xold[i]
                sty += spare[i] * (g[i] - gold[i])
                sts += spare[i] * spare[i]
            if sty <= 0:
                gstep = step_max
            else:
                gstep = sts / sty
                gstep = gstep if gstep >= STEP_MIN else STEP_MIN
                gstep = gstep if gstep <= step_max else step_max
            if f > 0.5 * sigma * sigma:
                last_f[it % N_PREV] = f
    free(buf)
    if code == 0:
        return x_arr, it, code
    return best_arr, it, code
