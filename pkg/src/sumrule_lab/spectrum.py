"""Bound states from Jost-function zeros, cross-checked by shooting.

On the positive imaginary axis k = i kappa the Jost solution is real (up
to a constant phase) and can be integrated as a linear ODE

    f'' = (V(x) + [ell(ell+1)/r^2] + kappa^2) f,

inward from x_max where f and its log-derivative match the free decaying
solution.  Zeros of the channel Jost value (f(0), f'(0) or the small-r
limit for partial waves) in kappa are the binding momenta.  An
independent eigensolver shoots the regular solution outward and the
decaying solution inward, matching Wronskians at an interior point, with
Sturm node counts guaranteeing that no state is missed.  Both lists must
agree one-to-one before a BoundStateSet is accepted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .backends.common import eta_poly_coeffs, eta_from_coeffs
from .channels import ANTISYM, SYM, Channel
from .errors import CrossCheckMismatch, ScanIncomplete, SingularPotential
from .potentials import PotentialSpec, closed_form_reference, evaluator

KAPPA_FLOOR = 1e-4
SCAN_PER_DECADE = 40
AGREEMENT_TOL = 1e-6
_HALF_BOUND_TOL = 1e-4


@dataclass(frozen=True)
class BoundStateSet:
    channel: Channel
    kappas: tuple  # sorted decreasing
    jost_residuals: tuple
    shooting_kappas: tuple
    agreement: float
    half_bound: bool = False
    near_threshold: tuple = field(default=())

    @property
    def count(self) -> int:
        return len(self.kappas)


def spectral_moment(bound: BoundStateSet, n: int) -> float:
    """-sum_j (-kappa_j^2)^n; the spectral side of the sum rules."""
    if n < 0:
        raise ValueError("moment order must be >= 0")
    return float(-sum((-(kap**2)) ** n for kap in bound.kappas))


# ---------------------------------------------------------------------------
# linear solves on the imaginary axis
# ---------------------------------------------------------------------------


def _rhs_factory(veval, ell: int | None, kappa_sq: float):
    if ell:
        cent = ell * (ell + 1)

        def rhs(x, y):
            return [y[1], (veval(x) + cent / (x * x) + kappa_sq) * y[0]]

    else:

        def rhs(x, y):
            return [y[1], (veval(x) + kappa_sq) * y[0]]

    return rhs


def _x_lo(potential: PotentialSpec, channel: Channel) -> float:
    if channel.is_1d or channel.ell == 0:
        return 0.0
    return 1e-4 * potential.width


def _jost_axis_value(potential: PotentialSpec, channel: Channel, kappa: float,
                     rtol: float = 1e-11, with_scale: bool = False):
    """Channel Jost value at k = i kappa, up to a kappa-dependent positive
    factor; sign and zeros are those of F (or G, or F_ell).  With
    with_scale=True also returns the sup of the trajectory, which sets the
    natural magnitude against which a zero is judged."""
    veval = evaluator(potential)
    x_hi = potential.x_max
    x_lo = _x_lo(potential, channel)
    ell = None if channel.is_1d else channel.ell
    if ell and kappa > 0:
        p, dp = eta_poly_coeffs(ell)
        logderiv = -kappa * float(np.real(eta_from_coeffs(p, dp, 1j * kappa * x_hi)))
    elif ell:
        logderiv = -ell / x_hi  # zero-energy decaying solution ~ r^-ell
    else:
        logderiv = -kappa
    y0 = [1.0, logderiv]
    sol = solve_ivp(
        _rhs_factory(veval, ell, kappa * kappa),
        (x_hi, x_lo),
        y0,
        method="DOP853",
        rtol=rtol,
        atol=1e-13,
        t_eval=np.linspace(x_hi, x_lo, 160) if with_scale else None,
    )
    f, fp = sol.y[0, -1], sol.y[1, -1]
    val = float(-fp) if channel == SYM else float(f)
    if with_scale:
        traj = sol.y[1] if channel == SYM else sol.y[0]
        return val, float(np.max(np.abs(traj)))
    return val


def _x_far(potential: PotentialSpec, kappa: float) -> float:
    """Outer boundary for the shooting legs: far enough that the missing
    tail cannot shift a node count or eigenvalue at threshold accuracy."""
    return potential.x_max + min(40.0 / max(kappa, KAPPA_FLOOR), 5e5)


def jost_value_imag_axis(potential: PotentialSpec, channel: Channel, kappa: float) -> float:
    """Properly normalized channel Jost function at k = i kappa.

    The exponent parameterization cannot represent the zeros of F on the
    imaginary axis, so this linear-solve path is the analytic continuation
    used by Jost-function callers for purely imaginary wavenumbers."""
    val = _jost_axis_value(potential, channel, kappa, rtol=1e-12)
    if channel == SYM:
        val = -val  # _jost_axis_value sign-flips G for a uniform scan sign
    x_hi = potential.x_max
    if channel.is_1d:
        # init had f(x_hi) = 1 while the Jost solution is e^{-kappa x}
        return val * math.exp(-kappa * x_hi)
    ell = channel.ell
    x_lo = _x_lo(potential, channel)
    p, _ = eta_poly_coeffs(ell)

    def w_val(r):
        if ell == 0:
            return math.exp(-kappa * r)
        s = 1.0 / (1j * kappa * r)
        acc = 0.0 + 0.0j
        for c in p[::-1]:
            acc = acc * s + c
        return np.exp(-kappa * r) * acc

    # f_scaled(r_lo) = F * w(i kappa r_lo) / w(i kappa x_hi) in the r->0 limit
    ratio = w_val(x_lo) / w_val(x_hi)
    return float(np.real(val / ratio))


def _shoot_outward(potential: PotentialSpec, channel: Channel, kappa: float,
                   x_stop: float, count_nodes: bool = False, rtol: float = 1e-11):
    veval = evaluator(potential)
    x_lo = _x_lo(potential, channel)
    ell = None if channel.is_1d else channel.ell
    if channel == SYM:
        y0 = [1.0, 0.0]
    elif channel == ANTISYM:
        y0 = [0.0, 1.0]
    else:
        le = channel.ell
        y0 = [x_lo ** (le + 1), (le + 1) * x_lo**le] if le else [0.0, 1.0]
    t_eval = None
    if count_nodes:
        # dense sampling inside the potential; the forbidden tail can hold
        # at most one further sign change, so coarse sampling suffices there
        inside = np.linspace(x_lo, potential.x_max, 600)
        tail = np.linspace(potential.x_max, x_stop, 160)[1:]
        t_eval = np.concatenate([inside, tail]) if x_stop > potential.x_max else inside
    sol = solve_ivp(
        _rhs_factory(veval, ell, kappa * kappa),
        (x_lo, x_stop),
        y0,
        method="DOP853",
        rtol=rtol,
        atol=1e-12,
        t_eval=t_eval,
    )
    if count_nodes:
        vals = sol.y[0]
        signs = np.sign(vals[np.abs(vals) > 0])
        nodes = int(np.count_nonzero(np.diff(signs) != 0))
        return nodes
    return sol.y[0, -1], sol.y[1, -1]


def _count_states_above(potential: PotentialSpec, channel: Channel, kappa: float) -> int:
    """Number of bound states with kappa_j > kappa (Sturm node count of the
    outward regular solution on an effectively infinite domain)."""
    return _shoot_outward(
        potential, channel, kappa, _x_far(potential, kappa), count_nodes=True
    )


def _match_mismatch(potential: PotentialSpec, channel: Channel, kappa: float) -> float:
    """Normalized Wronskian of the outward regular and inward decaying
    solutions at an interior matching point; zero at an eigenvalue."""
    x_m = min(potential.width, 0.5 * potential.x_max)
    fo, fpo = _shoot_outward(potential, channel, kappa, x_m)
    veval = evaluator(potential)
    ell = None if channel.is_1d else channel.ell
    sol = solve_ivp(
        _rhs_factory(veval, ell, kappa * kappa),
        (potential.x_max, x_m),
        [1.0, -kappa],
        method="DOP853",
        rtol=1e-11,
        atol=1e-12,
    )
    fi, fpi = sol.y[0, -1], sol.y[1, -1]
    no = math.hypot(fo, fpo)
    ni = math.hypot(fi, fpi)
    if no == 0 or ni == 0:
        return 0.0
    return (fpo * fi - fo * fpi) / (no * ni)


def _shooting_kappas(potential: PotentialSpec, channel: Channel, kappa_max: float) -> list[float]:
    """Eigen-kappas by node-count bracketing plus Wronskian root polish."""
    n_states = _count_states_above(potential, channel, KAPPA_FLOOR)
    if n_states == 0:
        return []
    # node count at kappa: number of eigenvalues with kappa_j > kappa
    found = []
    for j in range(n_states):
        target = j + 1  # want count >= target to the left of kappa_j
        lo, hi = KAPPA_FLOOR, kappa_max
        # bisect on the integer node count until the Wronskian brackets
        for _ in range(22):
            if hi - lo < 1e-13:
                break
            mid = 0.5 * (lo + hi)
            if _count_states_above(potential, channel, mid) >= target:
                lo = mid
            else:
                hi = mid
        a, b = lo, hi
        wa = _match_mismatch(potential, channel, a)
        wb = _match_mismatch(potential, channel, b)
        if wa * wb <= 0 and wa != wb:
            root = brentq(
                lambda kap: _match_mismatch(potential, channel, kap), a, b, xtol=1e-13
            )
        else:
            root = 0.5 * (a + b)
        found.append(root)
    return sorted(found, reverse=True)


def bound_states(potential: PotentialSpec, channel: Channel) -> BoundStateSet:
    """Binding momenta by Jost-zero bisection, cross-checked by shooting."""
    if potential.singular:
        ref = closed_form_reference(potential, channel)
        kappas = tuple(sorted(ref.bound_kappas, reverse=True))
        return BoundStateSet(
            channel=channel,
            kappas=kappas,
            jost_residuals=tuple(0.0 for _ in kappas),
            shooting_kappas=kappas,
            agreement=0.0,
            half_bound=ref.half_bound,
        )

    depth = potential.depth
    if depth <= 0:
        return BoundStateSet(channel, (), (), (), 0.0)
    kappa_max = 2.0 * math.sqrt(depth)

    n_grid = max(8, int(SCAN_PER_DECADE * math.log10(kappa_max / KAPPA_FLOOR)))
    grid = np.geomspace(KAPPA_FLOOR, kappa_max, n_grid)
    vals = np.array([_jost_axis_value(potential, channel, kap) for kap in grid])
    if vals[-1] <= 0:
        raise ScanIncomplete(
            f"Jost value at kappa_max={kappa_max:.3g} does not have the "
            "no-bound-state sign; enlarge the scan"
        )

    roots = []
    residuals = []
    for i in range(n_grid - 1):
        if vals[i] == 0.0:
            roots.append(float(grid[i]))
            residuals.append(0.0)
        elif vals[i] * vals[i + 1] < 0:
            root = brentq(
                lambda kap: _jost_axis_value(potential, channel, kap),
                grid[i],
                grid[i + 1],
                xtol=1e-12,
            )
            roots.append(float(root))
            residuals.append(abs(_jost_axis_value(potential, channel, root)))
    roots_sorted = sorted(roots, reverse=True)

    shoot = _shooting_kappas(potential, channel, kappa_max)
    if len(shoot) != len(roots_sorted):
        raise CrossCheckMismatch(
            f"{channel}: Jost scan found {len(roots_sorted)} states, "
            f"shooting found {len(shoot)}"
        )
    agreement = max(
        (abs(a - b) for a, b in zip(roots_sorted, shoot)), default=0.0
    )
    if agreement > AGREEMENT_TOL:
        raise CrossCheckMismatch(
            f"{channel}: bound-state locations disagree by {agreement:.2e}"
        )

    # zero-energy (half-bound) diagnostic: Jost value at kappa -> 0,
    # measured against the trajectory magnitude
    j0, scale0 = _jost_axis_value(potential, channel, 0.0, with_scale=True)
    half_bound = abs(j0) < _HALF_BOUND_TOL * max(scale0, 1e-30)

    near = tuple(kap for kap in roots_sorted if kap < 10 * KAPPA_FLOOR)
    return BoundStateSet(
        channel=channel,
        kappas=tuple(roots_sorted),
        jost_residuals=tuple(residuals),
        shooting_kappas=tuple(shoot),
        agreement=float(agreement),
        half_bound=half_bound,
        near_threshold=near,
    )


def bound_state_report(bound: BoundStateSet) -> dict:
    """JSON-ready summary."""
    return {
        "channel": bound.channel.label,
        "kappas": [float(k) for k in bound.kappas],
        "shooting_kappas": [float(k) for k in bound.shooting_kappas],
        "agreement": float(bound.agreement),
        "half_bound": bool(bound.half_bound),
        "near_threshold": [float(k) for k in bound.near_threshold],
    }
