"""Shared pieces of the Riccati integrator backends.

Both backends integrate the complex Riccati system

    u'(x) = -i * (2k * eta * u + u^2 + V(x)),      B'(x) = u(x),

inward from x_hi (where u = B = 0) to x_lo, with eta = 1 in one dimension
and eta = eta_ell(k r) for partial waves.  B(x_lo) is the exponent of the
Jost function and u(x_lo) its spatial derivative.

The scheme is the Dormand-Prince 5(4) embedded pair with FSAL; the same
Butcher tableau is used by the compiled and the pure-NumPy backend so
that their results are directly comparable.
"""

from __future__ import annotations

import numpy as np

from ..errors import SingularPotential

# Dormand-Prince 5(4) tableau
DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
DP_A = np.array(
    [
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1 / 5, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3 / 40, 9 / 40, 0.0, 0.0, 0.0, 0.0],
        [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0, 0.0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0, 0.0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0.0],
    ]
)
DP_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# difference between the 5th- and embedded 4th-order weights
DP_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)

MAX_STEPS = 2_000_000

GAUSSIAN, SQUARE, SECH2, EXPONENTIAL, TABULATED = range(5)

_FAMILY_CODES = {
    "gaussian_well": GAUSSIAN,
    "square_well": SQUARE,
    "sech2": SECH2,
    "exponential_well": EXPONENTIAL,
    "tabulated": TABULATED,
}


def pot_payload(potential) -> tuple:
    """(code, p1, p2, spline_breaks, spline_coeffs) consumed by both backends."""
    if potential.singular:
        raise SingularPotential("ODE backends reject the delta potential")
    code = _FAMILY_CODES[potential.family]
    if code == TABULATED:
        spl = potential._spline
        return (code, 0.0, 0.0, np.ascontiguousarray(spl.x), np.ascontiguousarray(spl.c))
    return (code, float(potential.depth), float(potential.width), None, None)


def eval_payload(payload, x):
    """Vectorized V(x) for a payload; reference implementation."""
    code, d, w, sx, sc = payload
    x = np.asarray(x, dtype=float)
    if code == GAUSSIAN:
        return -d * np.exp(-((x / w) ** 2))
    if code == SQUARE:
        return np.where(x < w, -d, 0.0)
    if code == SECH2:
        e = np.exp(-2.0 * np.abs(x / w))
        return -4.0 * d * e / (1.0 + e) ** 2
    if code == EXPONENTIAL:
        return -d * np.exp(-x / w)
    if code == TABULATED:
        xc = np.clip(x, sx[0], sx[-1])
        idx = np.clip(np.searchsorted(sx, xc, side="right") - 1, 0, len(sx) - 2)
        t = xc - sx[idx]
        c = sc[:, idx]
        return ((c[0] * t + c[1]) * t + c[2]) * t + c[3]
    raise AssertionError(code)


def eta_poly_coeffs(ell: int) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients (ascending in s = 1/z) of P_ell and P_ell', where the
    free outgoing radial solution is w_ell(z) = e^{iz} P_ell(1/z).

    Recurrence: P_0 = 1, P_1 = s - i, P_{l+1} = (2l+1) s P_l - P_{l-1}.
    The log-derivative factor is eta_ell(z) = 1 + i s^2 P'(s)/P(s).
    """
    p_prev = np.array([1.0 + 0j])
    if ell == 0:
        return p_prev, np.zeros(0, dtype=complex)
    p_cur = np.array([-1j, 1.0 + 0j])
    for l in range(1, ell):
        nxt = np.zeros(l + 2, dtype=complex)
        nxt[1:] = (2 * l + 1) * p_cur
        nxt[: l] -= p_prev
        p_prev, p_cur = p_cur, nxt
    dp = p_cur[1:] * np.arange(1, len(p_cur))
    return p_cur, dp


def eta_from_coeffs(p, dp, z):
    """eta_ell(z) = 1 + i s^2 P'(s)/P(s), s = 1/z; vectorized, complex-safe."""
    z = np.asarray(z, dtype=complex)
    s = 1.0 / z
    num = np.zeros_like(s)
    for c in dp[::-1]:
        num = num * s + c
    den = np.zeros_like(s)
    for c in p[::-1]:
        den = den * s + c
    return 1.0 + 1j * s * s * num / den
