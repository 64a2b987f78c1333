"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np


def project_l1_ball(b, tau):
    b = np.asarray(b, dtype=np.float64)
    mags = np.abs(b)
    if mags.sum() <= tau:
        return b.copy()
    if tau <= 0.0:
        return np.zeros_like(b)
    mu = np.sort(mags)[::-1]
    cs = np.cumsum(mu) - tau
    ratios = cs / np.arange(1, mu.size + 1)
    ok = np.nonzero(mu > ratios)[0]
    rho = ok[-1] if ok.size else 0  # rounding can drop index 0 when tau is tiny
    theta = ratios[rho]
    return np.sign(b) * np.maximum(mags - theta, 0.0)


def hard_threshold(u, s):
    u = np.asarray(u, dtype=np.float64)
    n = u.size
    if s < 1 or s > n:
        raise ValueError(f"sparsity s={s} must lie in [1, {n}]")
    keep = np.argsort(-np.abs(u), kind="stable")[:s]
    out = np.zeros_like(u)
    out[keep] = u[keep]
    return out


def signc(v):
    v = np.asarray(v, dtype=np.complex128)
    out = np.zeros_like(v)
    nz = v != 0
    re, im = v.real[nz], v.imag[nz]
    # rescale componentwise first so tiny or huge entries neither underflow nor overflow
    big = np.maximum(np.abs(re), np.abs(im))
    re, im = re / big, im / big
    mod = np.hypot(re, im)
    out.real[nz] = re / mod
    out.imag[nz] = im / mod
    return out


def equivalent_matrix(a, v, scale):
    a = np.asarray(a, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    m, n = a.shape
    if v.shape[0] != m:
        raise ValueError(f"vector length {v.shape[0]} does not match {m} rows")
    out = np.empty((m + 2, n))
    alpha = v.conj() @ a
    out[0] = scale * alpha.real
    out[1] = scale * alpha.imag
    out[2:] = (v.conj()[:, None] * a).imag
    return out


# basis pursuit denoising inner loop

_STEP_MIN = 1e-16
_STEP_MAX = 1e5
_N_PREV = 3
_DEC_TOL = 1e-4
_LS_TOL = 1e-6
_GAMMA = 1e-4
_LINE_ITERS = 10
_MAX_LINE_ERRORS = 10

ROOT_FOUND, LEAST_SQUARES, ITERATION_CAP, LINE_SEARCH_FAILURE = range(4)


def _line_search_curvy(x, g, fmax, MT, y, tau):
    """Backtrack along the projected arc ``P(x - step * g)``; returns ``(f, x, r, ok)``."""
    step = 1.0
    scale = 1.0
    snorm = 0.0
    nsafe = 0
    n = x.size
    for _ in range(_LINE_ITERS + 1):
        xnew = project_l1_ball(x - (step * scale) * g, tau)
        rnew = y - MT.T @ xnew
        fnew = 0.5 * (rnew @ rnew)
        s = xnew - x
        gts = scale * (g @ s)
        if gts >= 0:
            return fnew, xnew, rnew, False
        if fnew < fmax + _GAMMA * step * gts:
            return fnew, xnew, rnew, True
        step *= 0.5
        snorm_old = snorm
        snorm = np.linalg.norm(s) / np.sqrt(n)
        if abs(snorm - snorm_old) <= 1e-6 * snorm:
            # projected arc has stalled on a face; shrink the raw step instead
            scale = snorm / (np.linalg.norm(g) / np.sqrt(n)) / 2.0**nsafe
            nsafe += 1
    return fnew, xnew, rnew, False


def _line_search(f, x, d, gtd, fmax, MT, y):
    """Safeguarded quadratic backtracking along the fixed direction ``d``."""
    step = 1.0
    gtd = -abs(gtd)
    for _ in range(_LINE_ITERS + 1):
        xnew = x + step * d
        rnew = y - MT.T @ xnew
        fnew = 0.5 * (rnew @ rnew)
        if fnew < fmax + _GAMMA * step * gtd:
            return fnew, xnew, rnew, True
        if step <= 0.1:
            step *= 0.5
        else:
            denom = 2.0 * (fnew - f - step * gtd)
            trial = -gtd * step**2 / denom if denom != 0 else np.nan
            if not (0.1 <= trial <= 0.9 * step):
                trial = step / 2.0
            step = trial
    return fnew, xnew, rnew, False


def spg_bpdn(MT, y, sigma, target, opt_tol, max_iters):
    """Pareto root finding for basis pursuit denoising on ``M = MT.T``.

    Returns ``(x, iterations, status_code)``. For codes other than
    ``ROOT_FOUND`` the returned ``x`` is the smallest-residual iterate.
    """
    n = MT.shape[0]
    lipschitz = float((MT * MT).sum())  # Frobenius bound on ||M||_2^2
    tau = 0.0
    x = np.zeros(n)
    r = y.copy()
    f = 0.5 * (r @ r)
    g = -(MT @ r)
    gstep = step_max = _STEP_MAX
    last_f = np.full(_N_PREV, -np.inf)
    last_f[0] = f
    fold = f
    updated_tau = stalled = False
    line_errors = 0
    best_x, best_r = x.copy(), np.sqrt(2.0 * f)
    it = 0
    while True:
        rnorm = np.sqrt(2.0 * f)
        gnorm = np.abs(g).max()
        if rnorm < best_r:
            best_x, best_r = x.copy(), rnorm
        if rnorm <= target:
            return x, it, ROOT_FOUND
        if gnorm <= _LS_TOL * rnorm:
            # r is (nearly) orthogonal to range(M): the constraint is unreachable
            return best_x, it, LEAST_SQUARES
        if it >= max_iters:
            return best_x, it, ITERATION_CAP

        gap = r @ (r - y) + tau * gnorm
        rgap = abs(gap) / max(1.0, f)
        aerror1 = rnorm - sigma
        rerror2 = abs(f - 0.5 * sigma**2) / max(1.0, f)
        fchange = abs(f - fold)
        want_update = (
            (fchange <= _DEC_TOL * f and rnorm > 2.0 * sigma)
            or (fchange <= 0.1 * f * abs(aerror1) and rnorm <= 2.0 * sigma)
            or rgap <= max(opt_tol, rerror2) * 1e-2
        )
        if want_update and not updated_tau and aerror1 > 0:
            # r / ||M^T r||_inf is dual feasible, so this never exceeds the optimal l1 value;
            # it equals the Newton step once the subproblem is solved exactly
            tau_lb = (y @ r - sigma * rnorm) / gnorm
            if tau_lb > tau:
                tau = tau_lb
                updated_tau = True
            elif stalled:
                # at the rounding floor the bound lags; overshoot is at most gap / gnorm
                tau += rnorm * aerror1 / gnorm
                updated_tau = True
            stalled = False
        else:
            updated_tau = False

        it += 1
        xold, fold, gold = x, f, g
        fmax = last_f.max()
        f, x, r, ok = _line_search_curvy(xold, gstep * gold, fmax, MT, y, tau)
        if not ok:
            dx = project_l1_ball(xold - gstep * gold, tau) - xold
            f, x, r, ok = _line_search(fold, xold, dx, gold @ dx, fmax, MT, y)
        if not ok:
            # a 1/L projected-gradient step cannot increase f
            x = project_l1_ball(xold - gold / lipschitz, tau)
            r = y - MT.T @ x
            f = 0.5 * (r @ r)
            ok = f < fold
        if not ok:
            x, f = xold, fold
            r = y - MT.T @ x
            stalled = True
            line_errors += 1
            if line_errors > _MAX_LINE_ERRORS:
                return best_x, it, LINE_SEARCH_FAILURE
            step_max /= 10.0
            gstep = min(step_max, gstep)
            continue

        g = -(MT @ r)
        s = x - xold
        sty = s @ (g - gold)
        if sty <= 0:
            gstep = step_max
        else:
            gstep = min(step_max, max(_STEP_MIN, (s @ s) / sty))
        if f > 0.5 * sigma**2:
            last_f[it % _N_PREV] = f
