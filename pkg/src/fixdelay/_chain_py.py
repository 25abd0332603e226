"""Pure-Python fallback kernel for the transform chain.

Same contract as the compiled kernel (_chain_c): given a flattened delay
encoding, a closed-form seed encoding and a grid of lambda values, evaluate
the transform h, its derivative h', and optionally the alignment residual
h - tau(h) - h(lam - tau*).  Vectorised across grid points and synchronised
by composition level, with a bracketed Newton-bisection solve per level.

Per-point status codes: 0 ok, 1 no convergence, 2 lag derivative vanished,
3 lambda out of domain.
"""

from __future__ import annotations

import numpy as np

OK, NO_CONV, DERIV_VANISHED, OUT_OF_DOMAIN = 0, 1, 2, 3


def _tau(t, dkinds, doffs, dparams):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for i, kind in enumerate(dkinds):
        p = dparams[doffs[i]:doffs[i + 1]]
        if kind == 0:
            out = out + p[0]
        elif kind == 1:
            out = out + p[0] * np.sin(p[1] * t + p[2]) + p[3]
        else:
            acc = np.zeros_like(t)
            for c in p[::-1]:
                acc = acc * t + c
            out = out + acc
    return out


def _tau_dot(t, dkinds, doffs, dparams):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for i, kind in enumerate(dkinds):
        p = dparams[doffs[i]:doffs[i + 1]]
        if kind == 0:
            continue
        if kind == 1:
            out = out + p[0] * p[1] * np.cos(p[1] * t + p[2])
        else:
            acc = np.zeros_like(t)
            for j in range(len(p) - 1, 0, -1):
                acc = acc * t + j * p[j]
            out = out + acc
    return out


def _phi(x, spoly, sexp, scos, order=0):
    x = np.asarray(x, dtype=float)
    coeffs = list(spoly)
    for _ in range(order):
        coeffs = [j * c for j, c in enumerate(coeffs)][1:]
    out = np.zeros_like(x)
    for c in coeffs[::-1]:
        out = out * x + c
    if sexp[0] != 0.0:
        out = out + sexp[0] * sexp[1] ** order * np.exp(sexp[1] * x)
    if scos[0] != 0.0:
        trig = (np.cos, lambda v: -np.sin(v), lambda v: -np.cos(v), np.sin)[order % 4]
        out = out + scos[0] * scos[1] ** order * trig(scos[1] * x + scos[2])
    return out


def _theta_solve(s, tol, max_iter, dkinds, doffs, dparams):
    """Vectorised bracketed Newton for theta(t) = s. Returns (t, status)."""
    s = np.asarray(s, dtype=float)
    status = np.zeros(s.shape, dtype=np.int32)

    g = s + _tau(s, dkinds, doffs, dparams)
    lo = s.copy()  # theta(s) - s = -tau(s) < 0 for positive delays
    hi = g.copy()
    neg = g - _tau(g, dkinds, doffs, dparams) - s < 0.0
    lo = np.where(neg, g, lo)
    step = np.maximum(_tau(g, dkinds, doffs, dparams), 0.1)
    for _ in range(200):
        if not neg.any():
            break
        hi = np.where(neg, lo + step, hi)
        neg = hi - _tau(hi, dkinds, doffs, dparams) - s < 0.0
        lo = np.where(neg, hi, lo)
        step = step * 2.0
    else:
        status[neg] = NO_CONV

    t = np.clip(g, lo, hi)
    active = status == OK
    converged = np.zeros(s.shape, dtype=bool)
    for _ in range(max_iter):
        r = t - _tau(t, dkinds, doffs, dparams) - s
        converged |= np.abs(r) <= tol
        live = active & ~converged
        if not live.any():
            break
        lo = np.where(live & (r < 0.0), t, lo)
        hi = np.where(live & (r >= 0.0), t, hi)
        td = 1.0 - _tau_dot(t, dkinds, doffs, dparams)
        vanished = live & (td <= 0.0)
        status[vanished] = DERIV_VANISHED
        active &= ~vanished
        live &= ~vanished
        t_newton = t - r / np.where(td > 0.0, td, 1.0)
        outside = (t_newton <= lo) | (t_newton >= hi)
        t_next = np.where(outside, 0.5 * (lo + hi), t_newton)
        t = np.where(live, t_next, t)
    status[active & ~converged] = NO_CONV
    return t, status


def _chain(lams, tau_star, tol, max_iter, dkinds, doffs, dparams, spoly, sexp, scos):
    """h, h', status, fail level for each lambda (no residual)."""
    lams = np.asarray(lams, dtype=float)
    n = lams.shape[0]
    status = np.zeros(n, dtype=np.int32)
    level = np.full(n, -1, dtype=np.int32)

    bad = lams < -tau_star
    status[bad] = OUT_OF_DOMAIN

    k = np.floor(lams / tau_star).astype(np.int64) + 1
    k = np.maximum(k, 0)
    k[bad] = 0
    base = np.clip(lams - k * tau_star, -tau_star, 0.0)

    h = _phi(base, spoly, sexp, scos)
    hp_num = _phi(base, spoly, sexp, scos, order=1)
    den = np.ones(n)

    kmax = int(k.max()) if n else 0
    for lev in range(1, kmax + 1):
        act = (k >= lev) & (status == OK)
        if not act.any():
            continue
        t_new, st = _theta_solve(h[act], tol, max_iter, dkinds, doffs, dparams)
        idx = np.flatnonzero(act)
        failed = st != OK
        status[idx[failed]] = st[failed]
        level[idx[failed]] = lev
        h[act] = t_new
        td = 1.0 - _tau_dot(t_new, dkinds, doffs, dparams)
        dv = (st == OK) & (td <= 0.0)
        status[idx[dv]] = DERIV_VANISHED
        level[idx[dv]] = lev
        den[act] *= td

    hp = np.where(den != 0.0, hp_num / np.where(den != 0.0, den, 1.0), np.inf)
    h[status == OUT_OF_DOMAIN] = np.nan
    hp[status == OUT_OF_DOMAIN] = np.nan
    return h, hp, status, level


def chain_grid(dkinds, doffs, dparams, spoly, sexp, scos,
               tau_star, lams, tol, max_iter, want_abel):
    """Evaluate h, h' (and the alignment residual when requested) on a grid."""
    dkinds = np.ascontiguousarray(dkinds, dtype=np.int32)
    doffs = np.ascontiguousarray(doffs, dtype=np.int32)
    dparams = np.ascontiguousarray(dparams, dtype=np.float64)
    spoly = np.ascontiguousarray(spoly, dtype=np.float64)
    sexp = np.ascontiguousarray(sexp, dtype=np.float64)
    scos = np.ascontiguousarray(scos, dtype=np.float64)
    lams = np.ascontiguousarray(lams, dtype=np.float64)

    h, hp, status, level = _chain(lams, tau_star, tol, max_iter,
                                  dkinds, doffs, dparams, spoly, sexp, scos)
    abel = np.full(lams.shape, np.nan)
    if want_abel:
        mask = (lams >= 0.0) & (status == OK)
        if mask.any():
            h_prev, _, st_prev, _ = _chain(lams[mask] - tau_star, tau_star, tol, max_iter,
                                           dkinds, doffs, dparams, spoly, sexp, scos)
            vals = h[mask] - _tau(h[mask], dkinds, doffs, dparams) - h_prev
            vals[st_prev != OK] = np.nan
            abel[mask] = vals
    return h, hp, abel, status, level


def backend_name() -> str:
    return "python"
