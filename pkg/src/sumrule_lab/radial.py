"""Partial-wave machinery: eta_ell, the radial Riccati equation, radial
Jost functions and phase shifts.

The free outgoing radial solution is w_ell(z) = i z h^(1)_ell(z), which
factorizes as e^{iz} P_ell(1/z) with P_ell a degree-ell polynomial.  The
radial Jost solution is parameterized as f_ell = e^{i beta_ell} w_ell, and
beta_ell obeys

    -i beta'' + 2 k eta_ell(k r) beta' + beta'^2 + V(r) = 0,
    eta_ell(z) = -i d/dz ln[z h^(1)_ell(z)] = 1 + i P'(s) s^2 / P(s),  s = 1/z,

with beta(inf) = beta'(inf) = 0.  eta_ell has a 1/r pole at the origin for
ell >= 1, so the inward integration stops at r_min = 1e-4 * (potential
scale) and beta(k, r_min) is Richardson-extrapolated to r -> 0 using two
further halvings (the local behaviour beta' = O(r) makes the error
r_min^2 at leading order).  For ell = 0 the equation coincides with the
1D antisymmetric problem and is integrated straight to r = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backends
from .backends.common import eta_from_coeffs, eta_poly_coeffs
from .channels import Channel, partial_wave
from .errors import DomainError, SingularPotential, StiffnessFailure
from .jost1d import DEFAULT_ATOL, DEFAULT_RTOL, K_FLOOR, PhaseTable
from .potentials import HALF_LINE, PotentialSpec

ELL_MAX = 25
R_MIN_FACTOR = 1e-4


@dataclass(frozen=True)
class RadialBeta:
    """Origin data of the radial Jost exponent at one (ell, k)."""

    ell: int
    k: complex
    beta0: complex
    betaprime_rmin: complex
    r_min: float
    r_max: float
    error_estimate: float


def _check_ell(ell: int):
    if ell < 0:
        raise DomainError("ell must be a nonnegative integer")
    if ell > ELL_MAX:
        raise DomainError(
            f"ell = {ell} above the supported cap {ELL_MAX}; the polynomial "
            "ratio would need compensated summation beyond this"
        )


def eta(ell: int, z: complex):
    """Logarithmic-derivative factor of the free radial solution.

    Rational in z, analytic for Im z >= 0 away from z = 0, with
    eta_ell -> 1 as |z| -> inf; eta_0 is identically 1.
    """
    _check_ell(ell)
    zs = np.asarray(z, dtype=complex)
    if np.any(zs == 0):
        raise DomainError("eta is singular at z = 0")
    p, dp = eta_poly_coeffs(ell)
    out = eta_from_coeffs(p, dp, zs)
    den = np.zeros_like(zs)
    for c in p[::-1]:
        den = den / zs + c
    if np.any(np.abs(den) < 1e-280):
        raise DomainError("z is numerically a zero of the free radial solution")
    return complex(out) if np.isscalar(z) else out


def _geometry_ok(potential: PotentialSpec):
    if potential.singular:
        raise SingularPotential("radial solver rejects the delta potential")
    if potential.geometry != HALF_LINE:
        raise ValueError("radial operations need geometry=half_line_radial")


def solve_beta_radial_batch(
    potential: PotentialSpec,
    ell: int,
    ks,
    atol: float = DEFAULT_ATOL,
    rtol: float = DEFAULT_RTOL,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(beta0, betaprime at r_min, error) arrays over a batch of k."""
    _geometry_ok(potential)
    _check_ell(ell)
    ks = np.atleast_1d(np.asarray(ks, dtype=complex))
    for k in ks:
        if abs(k) <= K_FLOOR:
            raise DomainError(f"|k| = {abs(k):.3g} below k_floor = {K_FLOOR}")
        if k.imag < 0:
            raise DomainError("Im k must be >= 0")
    payload = backends.pot_payload(potential)
    r_max = potential.x_max
    if ell == 0:
        u0, b0, err, _, failed, _ = backends.solve_riccati(
            payload, ks, 0.0, r_max, None, atol, rtol
        )
        if np.any(failed):
            raise StiffnessFailure("radial Riccati failed (ell=0)")
        return b0, u0, err

    eta_pair = eta_poly_coeffs(ell)
    r_min = R_MIN_FACTOR * potential.width
    vals = []
    errs = []
    u_at_rmin = None
    for r_cut in (r_min, r_min / 2.0, r_min / 4.0):
        u0, b0, err, _, failed, _ = backends.solve_riccati(
            payload, ks, r_cut, r_max, eta_pair, atol, rtol
        )
        if np.any(failed):
            bad = ks[np.nonzero(failed)[0][0]]
            raise StiffnessFailure(
                f"radial Riccati step control underflowed at ell={ell}, k={bad}, "
                f"reached r_min={r_cut:.3g}"
            )
        vals.append(b0)
        errs.append(err)
        if u_at_rmin is None:
            u_at_rmin = u0
    f1, f2, f4 = vals  # cutoffs r_min, r_min/2, r_min/4
    r10 = (4.0 * f2 - f1) / 3.0
    r21 = (4.0 * f4 - f2) / 3.0
    beta0 = (8.0 * r21 - r10) / 7.0
    return beta0, u_at_rmin, np.maximum.reduce(errs)


def solve_beta_radial(
    potential: PotentialSpec,
    ell: int,
    k: complex,
    atol: float = DEFAULT_ATOL,
    rtol: float = DEFAULT_RTOL,
) -> RadialBeta:
    b0, up, err = solve_beta_radial_batch(potential, ell, [k], atol, rtol)
    r_min = 0.0 if ell == 0 else R_MIN_FACTOR * potential.width
    return RadialBeta(
        ell=ell,
        k=complex(k),
        beta0=complex(b0[0]),
        betaprime_rmin=complex(up[0]),
        r_min=r_min,
        r_max=potential.x_max,
        error_estimate=float(err[0]),
    )


def jost_F_radial(potential: PotentialSpec, ell: int, k: complex, **kw) -> complex:
    """F_ell(k) = lim_{r->0} f_ell(k,r)/w_ell(kr) = exp(i beta_ell(k,0)).

    Purely imaginary k routes through the linear solver, which represents
    the zeros of F_ell at the binding momenta exactly."""
    k = complex(k)
    if k.real == 0.0 and k.imag > 0.0:
        from . import spectrum

        _geometry_ok(potential)
        _check_ell(ell)
        return complex(
            spectrum.jost_value_imag_axis(potential, partial_wave(ell), k.imag)
        )
    sol = solve_beta_radial(potential, ell, k, **kw)
    return complex(np.exp(1j * sol.beta0))


def phase_shift_radial(
    potential: PotentialSpec, ell: int, k: float, **kw
) -> float:
    """delta_ell(k) = -Re beta_ell(k, 0); continuous in k by construction."""
    sol = solve_beta_radial(potential, ell, k, **kw)
    return float(-sol.beta0.real)


def phase_shift_radial_zero(
    potential: PotentialSpec,
    ell: int,
    atol: float = DEFAULT_ATOL,
    rtol: float = DEFAULT_RTOL,
) -> float:
    """delta_ell(0+) by Richardson extrapolation over k in [1e-3, 5e-2]."""
    ks = np.geomspace(1.001e-3, 5e-2, 10)
    b0, _, _ = solve_beta_radial_batch(potential, ell, ks, atol, rtol)
    coeffs = np.polyfit(ks, -b0.real, 3)
    return float(coeffs[-1])


def build_phase_table_radial(
    potential: PotentialSpec,
    ell: int,
    k_grid,
    born_orders: int = 3,
    atol: float = DEFAULT_ATOL,
    rtol: float = DEFAULT_RTOL,
) -> PhaseTable:
    """Partial-wave phase table with Born columns (same CSV schema as the
    1D tables, distinguished by the channel label)."""
    from . import born

    ks = np.asarray(k_grid, dtype=float)
    if ks.ndim != 1 or ks.size < 2 or np.any(np.diff(ks) <= 0) or ks[0] <= 0:
        raise ValueError("k_grid must be a positive increasing 1D array")
    b0, _, _ = solve_beta_radial_batch(potential, ell, ks, atol, rtol)
    delta = -b0.real
    engine = born.BornEngine(potential, ell=ell)
    cols = {
        nu: np.array([-engine.born_beta_value(nu, k).real for k in ks])
        for nu in range(1, born_orders + 1)
    }
    return PhaseTable(partial_wave(ell), ks, delta, cols, np.zeros(ks.size, dtype=int))
