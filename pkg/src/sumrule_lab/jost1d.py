"""Jost-solution exponent and phase shifts for the two 1D channels.

The Jost solution is written f(k,x) = exp(ikx + i beta(k,x)); beta obeys
the Riccati equation

    -i beta'' + 2k beta' + beta'^2 + V = 0,    beta(inf) = beta'(inf) = 0,

integrated inward as u = beta'.  The channel data follows from the origin
values:

    F(k) = exp(i beta(k,0))                       psi(0) = 0 channel
    G(k) = i (k + beta'(k,0)) exp(i beta(k,0))    psi'(0) = 0 channel
    delta_minus = -Re beta(k,0)
    delta_plus  = -Re beta(k,0) - arg(1 + beta'(k,0)/k)   (continuous arg)

delta_minus is continuous in k by construction; delta_plus needs branch
unwinding of the arg along a k grid, done here by adaptive midpoint
insertion.  The singular delta potential is routed to its closed-form
reference everywhere.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import backends
from .channels import ANTISYM, SYM, Channel
from .errors import BranchAmbiguity, DomainError, SingularPotential, StiffnessFailure
from .potentials import PotentialSpec, closed_form_reference

K_FLOOR = 1e-3
_RICHARDSON_WINDOW = (1e-3, 5e-2)
_MAX_REFINE = 12

DEFAULT_ATOL = 1e-12
DEFAULT_RTOL = 1e-10


@dataclass(frozen=True)
class BetaSolution:
    """Origin data of the Jost exponent at one wavenumber."""

    k: complex
    beta0: complex
    betaprime0: complex
    error_estimate: float
    profile: tuple | None = None  # (x samples, beta'(k,x) samples)


@dataclass
class PhaseTable:
    """Continuous-branch phase shifts with Born columns on a k grid."""

    channel: Channel
    k_grid: np.ndarray
    delta: np.ndarray
    born_delta: dict = field(default_factory=dict)
    branch_offsets: np.ndarray | None = None

    def born_sum(self, m: int) -> np.ndarray:
        """Sum of the first m Born phases on the grid."""
        out = np.zeros_like(self.delta)
        for nu in range(1, m + 1):
            out += self.born_delta[nu]
        return out

    def to_csv(self) -> str:
        orders = sorted(self.born_delta)
        buf = io.StringIO()
        cols = ["k", "delta"] + [f"delta_born_{nu}" for nu in orders] + ["branch_offset"]
        buf.write(",".join(cols) + "\n")
        offsets = self.branch_offsets
        if offsets is None:
            offsets = np.zeros(len(self.k_grid), dtype=int)
        for i, k in enumerate(self.k_grid):
            row = [f"{k:.11e}", f"{self.delta[i]:.11e}"]
            row += [f"{self.born_delta[nu][i]:.11e}" for nu in orders]
            row.append(str(int(offsets[i])))
            buf.write(",".join(row) + "\n")
        return buf.getvalue()


def _check_k(k: complex):
    if abs(k) <= K_FLOOR:
        raise DomainError(
            f"|k| = {abs(k):.3g} is below the k_floor = {K_FLOOR}; "
            "use the Richardson endpoint helpers for k -> 0"
        )
    if k.imag < 0:
        raise DomainError("Im k must be >= 0")


def solve_beta_batch(
    potential: PotentialSpec,
    ks,
    atol: float = DEFAULT_ATOL,
    rtol: float = DEFAULT_RTOL,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(beta0, betaprime0, error_estimate) arrays for a batch of wavenumbers."""
    ks = np.atleast_1d(np.asarray(ks, dtype=complex))
    for k in ks:
        _check_k(k)
    payload = backends.pot_payload(potential)
    u0, b0, err, _, failed, _ = backends.solve_riccati(
        payload, ks, 0.0, potential.x_max, None, atol, rtol
    )
    if np.any(failed):
        bad = ks[np.nonzero(failed)[0][0]]
        raise StiffnessFailure(f"Riccati step control underflowed at k = {bad}")
    return b0, u0, err


def solve_beta(
    potential: PotentialSpec,
    k: complex,
    atol: float = DEFAULT_ATOL,
    rtol: float = DEFAULT_RTOL,
    profile: bool = False,
) -> BetaSolution:
    """Jost exponent origin data at one wavenumber (Im k >= 0)."""
    if potential.singular:
        raise SingularPotential("solve_beta rejects the delta potential")
    _check_k(k)
    if profile:
        payload = backends.pot_payload(potential)
        u0, b0, err, _, failed, prof = backends.solve_riccati(
            payload, [k], 0.0, potential.x_max, None, atol, rtol, record=True
        )
        if failed[0]:
            raise StiffnessFailure(f"Riccati step control underflowed at k = {k}")
        xs, us = prof[0]
        order = np.argsort(xs)
        return BetaSolution(
            k=complex(k),
            beta0=complex(b0[0]),
            betaprime0=complex(u0[0]),
            error_estimate=float(err[0]),
            profile=(xs[order], us[order]),
        )
    b0, u0, err = solve_beta_batch(potential, [k], atol, rtol)
    return BetaSolution(
        k=complex(k),
        beta0=complex(b0[0]),
        betaprime0=complex(u0[0]),
        error_estimate=float(err[0]),
    )


def jost_F(potential: PotentialSpec, k: complex, **kw) -> complex:
    """F(k) = exp(i beta(k,0)), the psi(0)=0 channel Jost function.

    Purely imaginary k is served by the linear solver: the exponent
    parameterization cannot represent the zeros of F on that axis."""
    if potential.singular:
        ref = closed_form_reference(potential, ANTISYM)
        return complex(ref.jost(k))
    k = complex(k)
    if k.real == 0.0 and k.imag > 0.0:
        from . import spectrum

        return complex(spectrum.jost_value_imag_axis(potential, ANTISYM, k.imag))
    sol = solve_beta(potential, k, **kw)
    return complex(np.exp(1j * sol.beta0))


def jost_G(potential: PotentialSpec, k: complex, **kw) -> complex:
    """G(k) = i (k + beta'(k,0)) exp(i beta(k,0)), the psi'(0)=0 channel."""
    if potential.singular:
        ref = closed_form_reference(potential, SYM)
        return complex(ref.jost(k))
    k = complex(k)
    if k.real == 0.0 and k.imag > 0.0:
        from . import spectrum

        return complex(spectrum.jost_value_imag_axis(potential, SYM, k.imag))
    sol = solve_beta(potential, k, **kw)
    return complex(1j * (k + sol.betaprime0) * np.exp(1j * sol.beta0))


# ---------------------------------------------------------------------------
# continuous-branch symmetric phase
# ---------------------------------------------------------------------------


def _raw_theta(ks: np.ndarray, u0: np.ndarray) -> np.ndarray:
    """Principal arg(1 + beta'/k) = arg(k + beta') for real k > 0."""
    return np.angle(ks + u0)


def _unwind(ks: np.ndarray, theta_raw: np.ndarray) -> np.ndarray:
    """March from the largest k (where the arg vanishes) down, returning
    integer multiples of 2*pi per node.  Jumps above pi/2 between adjacent
    nodes are the caller's signal to refine."""
    n = len(ks)
    offsets = np.zeros(n, dtype=int)
    theta = theta_raw.copy()
    for i in range(n - 2, -1, -1):
        m = round((theta[i + 1] - theta_raw[i]) / (2 * math.pi))
        offsets[i] = m
        theta[i] = theta_raw[i] + 2 * math.pi * m
    return offsets


def symmetric_theta_batch(
    potential: PotentialSpec,
    ks: np.ndarray,
    atol: float = DEFAULT_ATOL,
    rtol: float = DEFAULT_RTOL,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Continuous arg(1 + beta'/k) on a sorted positive grid.

    Returns (theta, offsets, beta0, betaprime0, error) on the input grid.  The
    grid is extended internally up to a reference k where the arg is
    unambiguous, and midpoints are inserted (up to 12 rounds) wherever the
    unwound jump between neighbours exceeds pi/2.
    """
    ks = np.asarray(ks, dtype=float)
    if np.any(np.diff(ks) <= 0) or ks[0] <= 0:
        raise ValueError("k grid must be positive and strictly increasing")

    k_ref = max(20.0 * potential.k_scale, 2.0 * ks[-1])
    ext = np.geomspace(ks[-1], k_ref, 8)[1:]
    work = np.concatenate([ks, ext])
    b0, u0, err = solve_beta_batch(potential, work, atol, rtol)

    for _ in range(_MAX_REFINE):
        theta_raw = _raw_theta(work, u0)
        offsets = _unwind(work, theta_raw)
        theta = theta_raw + 2 * math.pi * offsets
        jumps = np.abs(np.diff(theta))
        bad = np.nonzero(jumps > math.pi / 2)[0]
        if bad.size == 0:
            keep = np.searchsorted(work, ks)
            return theta[keep], offsets[keep], b0[keep], u0[keep], err[keep]
        mids = np.sqrt(work[bad] * work[bad + 1])
        mb, mu, me = solve_beta_batch(potential, mids, atol, rtol)
        work = np.concatenate([work, mids])
        order = np.argsort(work)
        work = work[order]
        b0 = np.concatenate([b0, mb])[order]
        u0 = np.concatenate([u0, mu])[order]
        err = np.concatenate([err, me])[order]
    raise BranchAmbiguity("phase unwinding did not settle after 12 refinement rounds")


def phase_shift(
    potential: PotentialSpec,
    k: float,
    channel: Channel,
    atol: float = DEFAULT_ATOL,
    rtol: float = DEFAULT_RTOL,
) -> float:
    """Continuous-branch phase shift at a single real k > k_floor."""
    if not channel.is_1d:
        raise ValueError("use radial.phase_shift_radial for partial waves")
    if potential.singular:
        ref = closed_form_reference(potential, channel)
        return float(ref.phase(k))
    if channel == ANTISYM:
        b0, _, _ = solve_beta_batch(potential, [k], atol, rtol)
        return float(-b0[0].real)
    # symmetric channel: march the arg branch down from high k
    ladder = np.geomspace(k, max(20.0 * potential.k_scale, 2.0 * k), 24)
    theta, _, b0, _, _ = symmetric_theta_batch(potential, ladder, atol, rtol)
    return float(-b0[0].real - theta[0])


def phase_shift_zero(
    potential: PotentialSpec,
    channel: Channel,
    atol: float = DEFAULT_ATOL,
    rtol: float = DEFAULT_RTOL,
) -> float:
    """delta(0+) by Richardson extrapolation in k over [1e-3, 5e-2]."""
    if potential.singular:
        ref = closed_form_reference(potential, channel)
        return float(ref.phase(1e-9))
    lo, hi = _RICHARDSON_WINDOW
    ks = np.geomspace(lo * 1.0001, hi, 10)
    if channel == ANTISYM:
        b0, _, _ = solve_beta_batch(potential, ks, atol, rtol)
        deltas = -b0.real
    else:
        ladder = np.concatenate([ks, np.geomspace(hi * 1.3, 20.0 * potential.k_scale, 24)])
        theta, _, b0, _, _ = symmetric_theta_batch(potential, ladder, atol, rtol)
        deltas = (-b0.real - theta)[: len(ks)]
    coeffs = np.polyfit(ks, deltas, 3)
    return float(coeffs[-1])


def build_phase_table(
    potential: PotentialSpec,
    channel: Channel,
    k_grid,
    born_orders: int = 3,
    atol: float = DEFAULT_ATOL,
    rtol: float = DEFAULT_RTOL,
) -> PhaseTable:
    """Phase table with unwound branch and Born columns on a user grid."""
    from . import born  # deferred: born pulls in the panel machinery

    ks = np.asarray(k_grid, dtype=float)
    if ks.ndim != 1 or ks.size < 2 or np.any(np.diff(ks) <= 0) or ks[0] <= 0:
        raise ValueError("k_grid must be a positive increasing 1D array")

    if potential.singular:
        ref = closed_form_reference(potential, channel)
        delta = np.asarray(ref.phase(ks), dtype=float)
        born_cols = {
            nu: np.asarray(ref.born_phase(nu, ks), dtype=float)
            for nu in range(1, born_orders + 1)
        }
        return PhaseTable(channel, ks, delta, born_cols, np.zeros(ks.size, dtype=int))

    if channel == ANTISYM:
        b0, _, _ = solve_beta_batch(potential, ks, atol, rtol)
        delta = -b0.real
        offsets = np.zeros(ks.size, dtype=int)
    elif channel == SYM:
        theta, offsets, b0, _, _ = symmetric_theta_batch(potential, ks, atol, rtol)
        delta = -b0.real - theta
    else:
        raise ValueError("use radial.build_phase_table_radial for partial waves")

    engine = born.BornEngine(potential)
    born_cols = {
        nu: engine.born_phase_batch(nu, ks, channel) for nu in range(1, born_orders + 1)
    }
    return PhaseTable(channel, ks, delta, born_cols, offsets)
