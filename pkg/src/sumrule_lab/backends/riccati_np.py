"""Pure-NumPy Riccati backend.

All requested k values advance together as vector lanes; each lane keeps
its own adaptive step size, so the cost per iteration is a handful of
array operations regardless of how many wavenumbers are in flight.
Selected automatically when the compiled extension is unavailable (or
via SUMRULE_LAB_BACKEND=python).
"""

from __future__ import annotations

import numpy as np

from .common import DP_A, DP_B, DP_C, DP_E, MAX_STEPS, eta_from_coeffs, eval_payload

_SAFETY = 0.9
_MIN_SCALE = 0.2
_MAX_SCALE = 5.0


def _rhs(payload, eta_pair, ks, x, u):
    v = eval_payload(payload, np.real(x))
    if eta_pair is None:
        drift = 2.0 * ks * u
    else:
        p, dp = eta_pair
        drift = 2.0 * ks * eta_from_coeffs(p, dp, ks * x) * u
    return -1j * (drift + u * u + v)


def solve_riccati(
    payload,
    ks,
    x_lo: float,
    x_hi: float,
    eta_pair=None,
    atol: float = 1e-12,
    rtol: float = 1e-10,
    max_steps: int = MAX_STEPS,
    record: bool = False,
):
    """Integrate the Riccati system inward over [x_lo, x_hi] for a batch
    of wavenumbers.

    Returns (u0, beta0, err_est, nsteps, failed, profile): arrays over the
    batch, where err_est accumulates the embedded-difference magnitudes of
    the accepted steps (a conservative bound on the tolerance-halving
    change) and profile is a list of (x, u) arrays when record=True.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=complex))
    n = ks.size
    span = x_hi - x_lo
    if span <= 0:
        z = np.zeros(n, dtype=complex)
        return z, z.copy(), np.zeros(n), np.zeros(n, int), np.zeros(n, bool), None

    x = np.full(n, x_hi)
    u = np.zeros(n, dtype=complex)
    B = np.zeros(n, dtype=complex)
    h = -np.minimum(span / 16.0, 0.25 / (1.0 + np.abs(ks)))
    err_acc = np.zeros(n)
    nsteps = np.zeros(n, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    failed = np.zeros(n, dtype=bool)
    h_min = span * 1e-14

    ku = np.empty((7, n), dtype=complex)
    kB = np.empty((7, n), dtype=complex)
    ku[0] = _rhs(payload, eta_pair, ks, x, u)
    kB[0] = u

    trace = [[] for _ in range(n)] if record else None
    if record:
        for i in range(n):
            trace[i].append((x_hi, 0.0 + 0.0j))

    it = 0
    max_iters = 4 * max_steps
    while not np.all(done | failed) and it < max_iters:
        it += 1
        act = ~(done | failed)
        # clamp the step so no lane overshoots x_lo
        h = np.where(act & (x + h < x_lo), x_lo - x, h)

        for i in range(1, 6):
            du = np.zeros(n, dtype=complex)
            dB = np.zeros(n, dtype=complex)
            for j in range(i):
                aij = DP_A[i][j]
                if aij != 0.0:
                    du += aij * ku[j]
                    dB += aij * kB[j]
            xi = x + DP_C[i] * h
            ui = u + h * du
            ku[i] = _rhs(payload, eta_pair, ks, xi, ui)
            kB[i] = ui
        u_new = u + h * (
            DP_B[0] * ku[0] + DP_B[2] * ku[2] + DP_B[3] * ku[3] + DP_B[4] * ku[4] + DP_B[5] * ku[5]
        )
        B_new = B + h * (
            DP_B[0] * kB[0] + DP_B[2] * kB[2] + DP_B[3] * kB[3] + DP_B[4] * kB[4] + DP_B[5] * kB[5]
        )
        # FSAL stage: derivative at the accepted endpoint
        ku[6] = _rhs(payload, eta_pair, ks, x + h, u_new)
        kB[6] = u_new
        err_u = h * (ku[0] * DP_E[0] + ku[2] * DP_E[2] + ku[3] * DP_E[3] + ku[4] * DP_E[4] + ku[5] * DP_E[5] + ku[6] * DP_E[6])
        err_B = h * (kB[0] * DP_E[0] + kB[2] * DP_E[2] + kB[3] * DP_E[3] + kB[4] * DP_E[4] + kB[5] * DP_E[5] + kB[6] * DP_E[6])
        scale_u = atol + rtol * np.maximum(np.abs(u), np.abs(u_new))
        scale_B = atol + rtol * np.maximum(np.abs(B), np.abs(B_new))
        norm = np.maximum(np.abs(err_u) / scale_u, np.abs(err_B) / scale_B)
        norm = np.where(np.isfinite(norm), norm, np.inf)

        accept = act & (norm <= 1.0)
        if np.any(accept):
            x = np.where(accept, x + h, x)
            u = np.where(accept, u_new, u)
            B = np.where(accept, B_new, B)
            err_acc = np.where(accept, err_acc + np.abs(err_u) + np.abs(err_B), err_acc)
            nsteps = np.where(accept, nsteps + 1, nsteps)
            ku[0] = np.where(accept, ku[6], ku[0])
            kB[0] = np.where(accept, kB[6], kB[0])
            if record:
                for i in np.nonzero(accept)[0]:
                    trace[i].append((float(np.real(x[i])), complex(u[i])))

        with np.errstate(divide="ignore", over="ignore"):
            factor = _SAFETY * norm ** (-0.2)
        factor = np.clip(np.where(np.isfinite(factor), factor, _MIN_SCALE), _MIN_SCALE, _MAX_SCALE)
        factor = np.where(accept, factor, np.minimum(factor, 1.0))
        h = np.where(act, h * factor, h)
        h = np.where(act & (np.abs(h) > span / 16.0), -span / 16.0, h)

        newly_done = act & (np.abs(x - x_lo) <= 1e-14 * span)
        done |= newly_done
        failed |= act & ((np.abs(h) < h_min) | (nsteps >= max_steps))

    failed |= ~(done | failed)

    profile = None
    if record:
        profile = []
        for tr in trace:
            xs = np.array([p[0] for p in tr])
            us = np.array([p[1] for p in tr])
            order = np.argsort(xs)
            profile.append((xs[order], us[order]))
    return u, B, err_acc, nsteps, failed, profile
