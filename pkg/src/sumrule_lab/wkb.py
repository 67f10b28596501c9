"""Semiclassical estimates: WKB phase, moment formulas and the
phase-space check.

For an everywhere-attractive potential V = -U (U >= 0) the reflection
coefficient is exponentially small and both parity channels share the
WKB phase

    delta(k) = Int_0^inf (sqrt(k^2 + U(x)) - k) dx.

The minimally subtracted moments then collapse to quadratures of powers
of the well profile,

    sum_j kappa_j^{2n}  ~=  2^{n+1}/pi * n!/(2n+1)!! * Int_0^inf U^{n+1/2} dx,

which coincides with the phase-space count
(1/2 pi) Int dx dp (U - p^2)^n over the classically bound region.  The
"exact" side of the relative-error table sums the bound states of both
parity channels, matching the full-line phase-space integral.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .channels import ANTISYM, SYM
from .errors import PositivePotential, SingularPotential
from .potentials import PotentialSpec, evaluator, power_integral, sech2
from .spectrum import bound_states


@dataclass(frozen=True)
class WkbEstimate:
    n: int
    value: float  # semiclassical moment
    exact: float  # sum of kappa^{2n} over both parity channels
    relative_error: float  # (value - exact) / (value + exact)


def _require_attractive(potential: PotentialSpec):
    if potential.singular:
        raise SingularPotential("semiclassics needs a pointwise potential")
    xs = np.linspace(0.0, potential.x_max, 2048)
    v = evaluator(potential)(xs)
    if np.any(v > 1e-12):
        raise PositivePotential("WKB estimates need V <= 0 everywhere")


def wkb_phase(potential: PotentialSpec, k: float) -> float:
    """Semiclassical phase shift at wavenumber k > 0."""
    _require_attractive(potential)
    if k <= 0:
        raise ValueError("k must be positive")
    veval = evaluator(potential)

    def integrand(x):
        return math.sqrt(k * k - veval(x)) - k

    val, _ = quad(integrand, 0.0, potential.x_max, limit=200)
    return float(val)


def _moment_coefficient(n: int) -> float:
    """2^{n+1}/pi * n!/(2n+1)!!."""
    dfac = 1.0
    for j in range(1, 2 * n + 2, 2):
        dfac *= j
    return 2.0 ** (n + 1) / math.pi * math.factorial(n) / dfac


def phase_space_coefficient(n: int) -> float:
    """Weight of Int U^{n+1/2} in the phase-space count: the inner momentum
    integral gives U^{n+1/2} sqrt(pi) Gamma(n+1)/Gamma(n+3/2), the full line
    doubles the half-line integral, and the measure carries 1/(2 pi).
    Identical to the moment-formula prefactor."""
    return math.gamma(n + 1) / (math.sqrt(math.pi) * math.gamma(n + 1.5))


def wkb_moment(potential: PotentialSpec, n: int) -> float:
    """Semiclassical estimate of sum_j kappa_j^{2n} (both channels)."""
    _require_attractive(potential)
    if n < 0:
        raise ValueError("n must be >= 0")
    return _moment_coefficient(n) * power_integral(potential, n + 0.5)


def semiclassical_check(potential: PotentialSpec, n: int) -> tuple[float, float]:
    """(phase-space integral, wkb_moment): the two are identical analytics,
    evaluated by independent quadratures."""
    _require_attractive(potential)
    veval = evaluator(potential)

    def inner(x):
        u = -float(veval(x))
        if u <= 0:
            return 0.0
        p_max = math.sqrt(u)
        val, _ = quad(lambda p: (u - p * p) ** n, -p_max, p_max, limit=100)
        return val

    # full line = twice the half line for even wells
    outer, _ = quad(inner, 0.0, potential.x_max, limit=200)
    phase_space = outer / math.pi  # (1/2pi) * full line
    return float(phase_space), wkb_moment(potential, n)


def wkb_estimate(potential: PotentialSpec, n: int) -> WkbEstimate:
    """Semiclassical moment against the two-channel spectral sum."""
    value = wkb_moment(potential, n)
    exact = 0.0
    for ch in (ANTISYM, SYM):
        bs = bound_states(potential, ch)
        exact += sum(kap ** (2 * n) for kap in bs.kappas)
    rel = (value - exact) / (value + exact) if value + exact != 0 else 0.0
    return WkbEstimate(n=n, value=float(value), exact=float(exact), relative_error=float(rel))


def figure1_data(n_list=(0, 1, 2), l_range=range(1, 7)) -> list[dict]:
    """Relative-error table of the semiclassical moments for the
    reflectionless family (strength l(l+1)), one row per (l, n)."""
    rows = []
    for l in l_range:
        pot = sech2(float(l * (l + 1)))
        for n in n_list:
            est = wkb_estimate(pot, n)
            rows.append(
                {
                    "l": int(l),
                    "n": int(n),
                    "wkb": est.value,
                    "exact": est.exact,
                    "relative_error": est.relative_error,
                }
            )
    return rows


def figure1_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write("l,n,wkb,exact,relative_error\n")
    for r in rows:
        buf.write(
            f"{r['l']},{r['n']},{r['wkb']:.11e},{r['exact']:.11e},"
            f"{r['relative_error']:.11e}\n"
        )
    return buf.getvalue()
