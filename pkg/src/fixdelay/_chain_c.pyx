# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for the transform chain.

Scalar inner loops over grid points; same contract and status codes as the
pure-Python fallback (_chain_py).
"""

from libc.math cimport sin, cos, exp, floor, fabs, NAN, INFINITY

import numpy as np

cdef enum:
    OK = 0
    NO_CONV = 1
    DERIV_VANISHED = 2
    OUT_OF_DOMAIN = 3


cdef double _tau(double t, const int* kinds, const int* offs, const double* par, int m) noexcept nogil:
    cdef double out = 0.0, acc
    cdef int i, j
    for i in range(m):
        if kinds[i] == 0:
            out += par[offs[i]]
        elif kinds[i] == 1:
            out += par[offs[i]] * sin(par[offs[i] + 1] * t + par[offs[i] + 2]) + par[offs[i] + 3]
        else:
            acc = 0.0
            for j in range(offs[i + 1] - 1, offs[i] - 1, -1):
                acc = acc * t + par[j]
            out += acc
    return out


cdef double _tau_dot(double t, const int* kinds, const int* offs, const double* par, int m) noexcept nogil:
    cdef double out = 0.0, acc
    cdef int i, j, deg
    for i in range(m):
        if kinds[i] == 1:
            out += par[offs[i]] * par[offs[i] + 1] * cos(par[offs[i] + 1] * t + par[offs[i] + 2])
        elif kinds[i] == 2:
            acc = 0.0
            for j in range(offs[i + 1] - 1, offs[i], -1):
                deg = j - offs[i]
                acc = acc * t + deg * par[j]
            out += acc
    return out


cdef double _phi(double x, const double* pc, int npc,
                 double ce, double ae, double cc, double oc, double pccos) noexcept nogil:
    cdef double out = 0.0
    cdef int j
    for j in range(npc - 1, -1, -1):
        out = out * x + pc[j]
    if ce != 0.0:
        out += ce * exp(ae * x)
    if cc != 0.0:
        out += cc * cos(oc * x + pccos)
    return out


cdef double _phi_prime(double x, const double* pc, int npc,
                       double ce, double ae, double cc, double oc, double pccos) noexcept nogil:
    cdef double out = 0.0
    cdef int j
    for j in range(npc - 1, 0, -1):
        out = out * x + j * pc[j]
    if ce != 0.0:
        out += ce * ae * exp(ae * x)
    if cc != 0.0:
        out -= cc * oc * sin(oc * x + pccos)
    return out


cdef int _theta_solve(double s, double tol, int max_iter,
                      const int* kinds, const int* offs, const double* par, int m,
                      double* out) noexcept nogil:
    """Bracketed Newton for theta(t) = t - tau(t) = s."""
    cdef double g = s + _tau(s, kinds, offs, par, m)
    cdef double lo = s, hi, step, t, r, td, tn
    cdef int i
    if g - _tau(g, kinds, offs, par, m) - s >= 0.0:
        hi = g
    else:
        lo = g
        step = _tau(g, kinds, offs, par, m)
        if step < 0.1:
            step = 0.1
        hi = g + step
        for i in range(200):
            if hi - _tau(hi, kinds, offs, par, m) - s >= 0.0:
                break
            lo = hi
            step *= 2.0
            hi += step
        else:
            return NO_CONV
    t = g
    if t < lo:
        t = lo
    elif t > hi:
        t = hi
    for i in range(max_iter):
        r = t - _tau(t, kinds, offs, par, m) - s
        if fabs(r) <= tol:
            out[0] = t
            return OK
        if r < 0.0:
            lo = t
        else:
            hi = t
        td = 1.0 - _tau_dot(t, kinds, offs, par, m)
        if td <= 0.0:
            return DERIV_VANISHED
        tn = t - r / td
        if tn <= lo or tn >= hi:
            tn = 0.5 * (lo + hi)
        t = tn
    return NO_CONV


cdef int _chain_point(double lam, double tau_star, double tol, int max_iter,
                      const int* kinds, const int* offs, const double* par, int m,
                      const double* pc, int npc, double ce, double ae,
                      double cc, double oc, double pccos,
                      double* h_out, double* hp_out, int* lev_out) noexcept nogil:
    cdef long k
    cdef double base, h, den, td
    cdef int j, st
    lev_out[0] = -1
    if lam < -tau_star:
        return OUT_OF_DOMAIN
    k = <long>floor(lam / tau_star) + 1
    if k < 0:
        k = 0
    base = lam - k * tau_star
    if base < -tau_star:
        base = -tau_star
    elif base > 0.0:
        base = 0.0
    h = _phi(base, pc, npc, ce, ae, cc, oc, pccos)
    den = 1.0
    for j in range(<int>k):
        st = _theta_solve(h, tol, max_iter, kinds, offs, par, m, &h)
        if st != OK:
            lev_out[0] = j + 1
            return st
        td = 1.0 - _tau_dot(h, kinds, offs, par, m)
        if td <= 0.0:
            lev_out[0] = j + 1
            return DERIV_VANISHED
        den *= td
    h_out[0] = h
    if den != 0.0:
        hp_out[0] = _phi_prime(base, pc, npc, ce, ae, cc, oc, pccos) / den
    else:
        hp_out[0] = INFINITY
    return OK


def chain_grid(dkinds, doffs, dparams, spoly, sexp, scos,
               double tau_star, lams, double tol, int max_iter, bint want_abel):
    """Evaluate h, h' (and the alignment residual when requested) on a grid."""
    cdef int[::1] kv = np.ascontiguousarray(dkinds, dtype=np.int32)
    cdef int[::1] ov = np.ascontiguousarray(doffs, dtype=np.int32)
    cdef double[::1] pv = np.ascontiguousarray(dparams, dtype=np.float64)
    cdef double[::1] pcv = np.ascontiguousarray(spoly, dtype=np.float64)
    cdef double[::1] sev = np.ascontiguousarray(sexp, dtype=np.float64)
    cdef double[::1] scv = np.ascontiguousarray(scos, dtype=np.float64)
    cdef double[::1] lv = np.ascontiguousarray(lams, dtype=np.float64)

    cdef Py_ssize_t n = lv.shape[0]
    h_arr = np.empty(n)
    hp_arr = np.empty(n)
    abel_arr = np.full(n, np.nan)
    status_arr = np.zeros(n, dtype=np.int32)
    level_arr = np.full(n, -1, dtype=np.int32)
    cdef double[::1] hv = h_arr
    cdef double[::1] hpv = hp_arr
    cdef double[::1] av = abel_arr
    cdef int[::1] stv = status_arr
    cdef int[::1] lvv = level_arr

    cdef int m = kv.shape[0]
    cdef int npc = pcv.shape[0]
    cdef double ce = sev[0], ae = sev[1]
    cdef double cc = scv[0], oc = scv[1], pccos = scv[2]
    cdef const int* kp = &kv[0] if m > 0 else NULL
    cdef const int* op = &ov[0]
    cdef const double* pp = &pv[0] if pv.shape[0] > 0 else NULL
    cdef const double* pcp = &pcv[0] if npc > 0 else NULL

    cdef Py_ssize_t i
    cdef double h, hp, hprev, hpdummy
    cdef int st, lev, lev2
    with nogil:
        for i in range(n):
            h = NAN
            hp = NAN
            st = _chain_point(lv[i], tau_star, tol, max_iter, kp, op, pp, m,
                              pcp, npc, ce, ae, cc, oc, pccos, &h, &hp, &lev)
            stv[i] = st
            lvv[i] = lev
            hv[i] = h
            hpv[i] = hp
            if want_abel and st == OK and lv[i] >= 0.0:
                st = _chain_point(lv[i] - tau_star, tau_star, tol, max_iter,
                                  kp, op, pp, m, pcp, npc, ce, ae, cc, oc, pccos,
                                  &hprev, &hpdummy, &lev2)
                if st == OK:
                    av[i] = h - _tau(h, kp, op, pp, m) - hprev
    return h_arr, hp_arr, abel_arr, status_arr, level_arr


def backend_name():
    return "c"
