# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Riccati backend.

Same Dormand-Prince 5(4) scheme as riccati_np, as a tight scalar loop per
wavenumber with the potential evaluated inline.  Used for the hot phase
sweeps; results agree with the NumPy backend to solver tolerance.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cosh, exp, fabs, hypot, pow

cnp.import_array()

cdef double SAFETY = 0.9
cdef double MIN_SCALE = 0.2
cdef double MAX_SCALE = 5.0
cdef double complex CI = 1j

# Dormand-Prince tableau
cdef double C2 = 1.0 / 5.0, C3 = 3.0 / 10.0, C4 = 4.0 / 5.0, C5 = 8.0 / 9.0
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0


cdef inline double _cmag(double complex z) nogil:
    return hypot(z.real, z.imag)


cdef inline double _pot(int code, double d, double w, double[::1] sx,
                        double[:, ::1] sc, int nspl, double x) nogil:
    cdef int lo, hi, mid
    cdef double t
    if code == 0:
        t = x / w
        return -d * exp(-t * t)
    elif code == 1:
        return -d if x < w else 0.0
    elif code == 2:
        t = exp(-2.0 * fabs(x / w))
        return -4.0 * d * t / ((1.0 + t) * (1.0 + t))
    elif code == 3:
        return -d * exp(-x / w)
    else:
        if x <= sx[0]:
            lo = 0
            t = 0.0
        elif x >= sx[nspl - 1]:
            lo = nspl - 2
            t = sx[nspl - 1] - sx[lo]
        else:
            lo = 0
            hi = nspl - 1
            while hi - lo > 1:
                mid = (lo + hi) >> 1
                if sx[mid] <= x:
                    lo = mid
                else:
                    hi = mid
            t = x - sx[lo]
        return ((sc[0, lo] * t + sc[1, lo]) * t + sc[2, lo]) * t + sc[3, lo]


cdef inline double complex _eta(double complex z, double complex[::1] p, int n_p,
                                double complex[::1] dp, int ndp) nogil:
    cdef double complex s = 1.0 / z
    cdef double complex num = 0.0
    cdef double complex den = 0.0
    cdef int j
    for j in range(ndp - 1, -1, -1):
        num = num * s + dp[j]
    for j in range(n_p - 1, -1, -1):
        den = den * s + p[j]
    return 1.0 + CI * s * s * num / den


cdef inline double complex _rhs_u(double complex kk, double x, double complex u,
                                  double v, bint use_eta, double complex[::1] p,
                                  int n_p, double complex[::1] dp, int ndp) nogil:
    cdef double complex drift
    if use_eta:
        drift = 2.0 * kk * _eta(kk * x, p, n_p, dp, ndp) * u
    else:
        drift = 2.0 * kk * u
    return -CI * (drift + u * u + v)


cdef int _solve_one(int code, double d, double w, double[::1] sx, double[:, ::1] sc,
                    int nspl, bint use_eta, double complex[::1] ep, int n_p,
                    double complex[::1] edp, int ndp, double complex kk,
                    double x_lo, double x_hi, double atol, double rtol,
                    long max_steps, double complex* out_u, double complex* out_B,
                    double* out_err, long* out_steps) nogil:
    cdef double span = x_hi - x_lo
    cdef double x = x_hi
    cdef double complex u = 0.0
    cdef double complex B = 0.0
    cdef double h, h_min, h_cap, xi, v, norm, eu, eB, su, sB, factor
    cdef double err_acc = 0.0
    cdef long nsteps = 0
    cdef double complex ku1, ku2, ku3, ku4, ku5, ku6, ku7
    cdef double complex kB1, kB2, kB3, kB4, kB5, kB6, kB7
    cdef double complex ui, u_new, B_new, err_u, err_B

    if span <= 0.0:
        out_u[0] = 0.0
        out_B[0] = 0.0
        out_err[0] = 0.0
        out_steps[0] = 0
        return 0

    h_cap = span / 16.0
    h = -h_cap
    if 0.25 / (1.0 + _cmag(kk)) < h_cap:
        h = -0.25 / (1.0 + _cmag(kk))
    h_min = span * 1e-14

    v = _pot(code, d, w, sx, sc, nspl, x)
    ku1 = _rhs_u(kk, x, u, v, use_eta, ep, n_p, edp, ndp)
    kB1 = u

    while True:
        if fabs(x - x_lo) <= 1e-14 * span:
            out_u[0] = u
            out_B[0] = B
            out_err[0] = err_acc
            out_steps[0] = nsteps
            return 0
        if nsteps >= max_steps or fabs(h) < h_min:
            out_u[0] = u
            out_B[0] = B
            out_err[0] = err_acc
            out_steps[0] = nsteps
            return 1
        if x + h < x_lo:
            h = x_lo - x

        xi = x + C2 * h
        ui = u + h * (A21 * ku1)
        v = _pot(code, d, w, sx, sc, nspl, xi)
        ku2 = _rhs_u(kk, xi, ui, v, use_eta, ep, n_p, edp, ndp)
        kB2 = ui

        xi = x + C3 * h
        ui = u + h * (A31 * ku1 + A32 * ku2)
        v = _pot(code, d, w, sx, sc, nspl, xi)
        ku3 = _rhs_u(kk, xi, ui, v, use_eta, ep, n_p, edp, ndp)
        kB3 = ui

        xi = x + C4 * h
        ui = u + h * (A41 * ku1 + A42 * ku2 + A43 * ku3)
        v = _pot(code, d, w, sx, sc, nspl, xi)
        ku4 = _rhs_u(kk, xi, ui, v, use_eta, ep, n_p, edp, ndp)
        kB4 = ui

        xi = x + C5 * h
        ui = u + h * (A51 * ku1 + A52 * ku2 + A53 * ku3 + A54 * ku4)
        v = _pot(code, d, w, sx, sc, nspl, xi)
        ku5 = _rhs_u(kk, xi, ui, v, use_eta, ep, n_p, edp, ndp)
        kB5 = ui

        xi = x + h
        ui = u + h * (A61 * ku1 + A62 * ku2 + A63 * ku3 + A64 * ku4 + A65 * ku5)
        v = _pot(code, d, w, sx, sc, nspl, xi)
        ku6 = _rhs_u(kk, xi, ui, v, use_eta, ep, n_p, edp, ndp)
        kB6 = ui

        u_new = u + h * (B1 * ku1 + B3 * ku3 + B4 * ku4 + B5 * ku5 + B6 * ku6)
        B_new = B + h * (B1 * kB1 + B3 * kB3 + B4 * kB4 + B5 * kB5 + B6 * kB6)

        v = _pot(code, d, w, sx, sc, nspl, x + h)
        ku7 = _rhs_u(kk, x + h, u_new, v, use_eta, ep, n_p, edp, ndp)
        kB7 = u_new

        err_u = h * (E1 * ku1 + E3 * ku3 + E4 * ku4 + E5 * ku5 + E6 * ku6 + E7 * ku7)
        err_B = h * (E1 * kB1 + E3 * kB3 + E4 * kB4 + E5 * kB5 + E6 * kB6 + E7 * kB7)
        eu = _cmag(err_u)
        eB = _cmag(err_B)
        su = atol + rtol * max(_cmag(u), _cmag(u_new))
        sB = atol + rtol * max(_cmag(B), _cmag(B_new))
        norm = max(eu / su, eB / sB)

        if norm == norm and norm <= 1.0:
            x = x + h
            u = u_new
            B = B_new
            err_acc += eu + eB
            nsteps += 1
            ku1 = ku7
            kB1 = kB7
            if norm > 0.0:
                factor = SAFETY * pow(norm, -0.2)
            else:
                factor = MAX_SCALE
        else:
            factor = MIN_SCALE
            if norm == norm and norm > 1.0:
                factor = SAFETY * pow(norm, -0.2)
                if factor < MIN_SCALE:
                    factor = MIN_SCALE
                if factor > 1.0:
                    factor = 1.0
        if factor > MAX_SCALE:
            factor = MAX_SCALE
        if factor < MIN_SCALE:
            factor = MIN_SCALE
        h = h * factor
        if fabs(h) > h_cap:
            h = -h_cap


def solve_riccati(payload, ks, double x_lo, double x_hi, eta_pair=None,
                  double atol=1e-12, double rtol=1e-10, long max_steps=2000000,
                  record=False):
    """Batch driver; mirrors riccati_np.solve_riccati (record unsupported)."""
    if record:
        raise NotImplementedError("profile recording uses the python backend")
    cdef int code = payload[0]
    cdef double d = payload[1]
    cdef double w = payload[2]
    cdef double[::1] sx
    cdef double[:, ::1] sc
    cdef int nspl = 0
    if payload[3] is not None:
        sx = np.ascontiguousarray(payload[3], dtype=np.float64)
        sc = np.ascontiguousarray(payload[4], dtype=np.float64)
        nspl = sx.shape[0]
    else:
        sx = np.zeros(1)
        sc = np.zeros((4, 1))

    cdef bint use_eta = 0
    cdef double complex[::1] ep = np.ones(1, dtype=np.complex128)
    cdef double complex[::1] edp = np.zeros(1, dtype=np.complex128)
    cdef int n_p = 1, ndp = 0
    if eta_pair is not None:
        p_arr = np.ascontiguousarray(eta_pair[0], dtype=np.complex128)
        dp_arr = np.ascontiguousarray(eta_pair[1], dtype=np.complex128)
        if dp_arr.size > 0:
            use_eta = 1
            ep = p_arr
            edp = dp_arr
            n_p = p_arr.size
            ndp = dp_arr.size

    ks_arr = np.atleast_1d(np.asarray(ks, dtype=np.complex128))
    cdef double complex[::1] kv = np.ascontiguousarray(ks_arr)
    cdef Py_ssize_t n = kv.shape[0]

    u_out = np.zeros(n, dtype=np.complex128)
    B_out = np.zeros(n, dtype=np.complex128)
    e_out = np.zeros(n, dtype=np.float64)
    s_out = np.zeros(n, dtype=np.int64)
    f_out = np.zeros(n, dtype=bool)
    cdef double complex[::1] uv = u_out
    cdef double complex[::1] Bv = B_out
    cdef double[::1] ev = e_out
    cdef long[::1] sv = s_out
    cdef Py_ssize_t i
    cdef int bad
    cdef double complex ui, Bi
    cdef double erri
    cdef long stepsi

    with nogil:
        for i in range(n):
            bad = _solve_one(code, d, w, sx, sc, nspl, use_eta, ep, n_p, edp, ndp,
                             kv[i], x_lo, x_hi, atol, rtol, max_steps,
                             &ui, &Bi, &erri, &stepsi)
            uv[i] = ui
            Bv[i] = Bi
            ev[i] = erri
            sv[i] = stepsi
            if bad:
                with gil:
                    f_out[i] = True

    return u_out, B_out, e_out, s_out, f_out, None
