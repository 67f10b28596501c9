"""Potential definitions, moments and solvable reference data.

Units
-----
hbar = 2m = 1 throughout, so V(x) carries units of k^2 and a bound state
with binding momentum kappa has energy -kappa^2.

Families
--------
gaussian_well       V(x) = -depth * exp(-(x/width)^2)
square_well         V(x) = -depth for x < width, 0 beyond
sech2               V(x) = -strength / cosh(x/width)^2
exponential_well    V(x) = -depth * exp(-x/width)
delta_function      V(x) = -coupling * delta(x)   (never sampled pointwise)
tabulated           cubic-spline interpolant of (grid, values) samples

All analytic families are even in x, so evaluation is only ever requested
for x >= 0.  ``full_line_symmetric`` geometry feeds the two 1D parity
channels, ``half_line_radial`` feeds the partial-wave machinery.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq
from scipy.special import gamma as _gamma

from .channels import ANTISYM, SYM, Channel
from .errors import DivergentMoment, OutOfRange, SingularPotential

TAIL_EPS = 1e-12

FULL_LINE = "full_line_symmetric"
HALF_LINE = "half_line_radial"

_FAMILIES = (
    "gaussian_well",
    "square_well",
    "sech2",
    "exponential_well",
    "delta_function",
    "tabulated",
)

# canonical parameter names with accepted aliases
_PARAM_ALIASES = {
    "V0": "depth",
    "v0": "depth",
    "a": "width",
    "lam": "coupling",
    "lambda": "coupling",
    "s": "strength",
}


def _canon_params(params: dict) -> dict[str, float]:
    out = {}
    for key, val in params.items():
        out[_PARAM_ALIASES.get(key, key)] = float(val)
    return out


@dataclass(frozen=True)
class PotentialSpec:
    """Declarative description of a potential.

    ``params`` uses canonical names (depth/width/strength/coupling); the
    JSON loader accepts the usual short aliases.  Tabulated potentials
    carry their sample arrays instead of named parameters.
    """

    family: str
    params: dict = field(default_factory=dict)
    geometry: str = FULL_LINE
    grid: np.ndarray | None = None
    values: np.ndarray | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.geometry not in (FULL_LINE, HALF_LINE):
            raise ValueError(f"unknown geometry {self.geometry!r}")
        object.__setattr__(self, "params", _canon_params(self.params))
        if self.family == "tabulated":
            if self.grid is None or self.values is None:
                raise ValueError("tabulated potential needs grid and values")
            g = np.asarray(self.grid, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if g.ndim != 1 or g.shape != v.shape or g.size < 4:
                raise ValueError("tabulated grid/values must be 1D, equal length >= 4")
            if not np.all(np.diff(g) > 0):
                raise ValueError("tabulated grid must be strictly increasing")
            if g[0] != 0.0:
                raise ValueError("tabulated grid must start at x = 0")
            object.__setattr__(self, "grid", g)
            object.__setattr__(self, "values", v)
            object.__setattr__(self, "_spline", CubicSpline(g, v))
        else:
            self._validate_params()

    def _validate_params(self):
        p = self.params
        if self.family == "gaussian_well":
            depth, width = p.get("depth"), p.get("width", 1.0)
        elif self.family == "square_well":
            depth, width = p.get("depth"), p.get("width", 1.0)
        elif self.family == "sech2":
            depth, width = p.get("strength"), p.get("width", 1.0)
        elif self.family == "exponential_well":
            depth, width = p.get("depth"), p.get("width", 1.0)
        elif self.family == "delta_function":
            lam = p.get("coupling")
            if lam is None or lam <= 0:
                raise ValueError("delta_function needs coupling > 0")
            return
        if depth is None or depth < 0:
            raise ValueError(f"{self.family} needs a nonnegative depth/strength")
        if width <= 0:
            raise ValueError(f"{self.family} needs width > 0")

    # -- basic descriptors -------------------------------------------------

    @property
    def singular(self) -> bool:
        return self.family == "delta_function"

    @property
    def depth(self) -> float:
        """max_x |V(x)| for non-singular families."""
        if self.family == "sech2":
            return self.params["strength"]
        if self.family == "tabulated":
            return float(np.max(np.abs(self.values)))
        if self.singular:
            raise SingularPotential("delta potential has no pointwise depth")
        return self.params["depth"]

    @property
    def width(self) -> float:
        """Characteristic length scale."""
        if self.family == "tabulated":
            return float(self.grid[-1]) / 8.0
        if self.singular:
            return 1.0
        return self.params.get("width", 1.0)

    @property
    def x_max(self) -> float:
        """Smallest x with |V(x)| < TAIL_EPS (closed form per family)."""
        if self.singular:
            raise SingularPotential("delta potential has no evaluation range")
        if self.family == "tabulated":
            return float(self.grid[-1])
        d, w = self.depth, self.width
        if d <= TAIL_EPS:
            return w
        if self.family == "gaussian_well":
            return w * math.sqrt(math.log(d / TAIL_EPS))
        if self.family == "square_well":
            return w
        if self.family == "sech2":
            return 0.5 * w * math.log(4.0 * d / TAIL_EPS)
        if self.family == "exponential_well":
            return w * math.log(d / TAIL_EPS)
        raise AssertionError(self.family)

    @property
    def k_scale(self) -> float:
        """Natural momentum scale, used to size k grids and cutoffs."""
        if self.singular:
            return max(1.0, 0.5 * self.params["coupling"])
        return max(1.0, math.sqrt(self.depth))

    @property
    def edge_ringing_freq(self) -> float | None:
        """Frequency (in k) of the phase-shift ringing caused by a potential
        discontinuity, or None for smooth families.  A jump at x = a makes
        scattering quantities oscillate like exp(2ika)."""
        if self.family == "square_well":
            return 2.0 * self.width
        return None

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        doc = {"family": self.family, "geometry": self.geometry}
        if self.family == "tabulated":
            doc["grid"] = list(map(float, self.grid))
            doc["values"] = list(map(float, self.values))
        else:
            doc["params"] = dict(self.params)
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "PotentialSpec":
        family = doc["family"]
        geometry = doc.get("geometry", FULL_LINE)
        if family == "tabulated":
            return cls(family, {}, geometry, grid=doc["grid"], values=doc["values"])
        return cls(family, doc.get("params", {}), geometry)

    @classmethod
    def from_json(cls, text: str) -> "PotentialSpec":
        return cls.from_json_dict(json.loads(text))


def gaussian_well(depth: float, width: float = 1.0, geometry: str = FULL_LINE) -> PotentialSpec:
    return PotentialSpec("gaussian_well", {"depth": depth, "width": width}, geometry)


def square_well(depth: float, width: float = 1.0, geometry: str = FULL_LINE) -> PotentialSpec:
    return PotentialSpec("square_well", {"depth": depth, "width": width}, geometry)


def sech2(strength: float, width: float = 1.0, geometry: str = FULL_LINE) -> PotentialSpec:
    return PotentialSpec("sech2", {"strength": strength, "width": width}, geometry)


def sech2_from_ell(ell: int, squared: bool = False, geometry: str = FULL_LINE) -> PotentialSpec:
    """Reflectionless-family strength ell*(ell+1); the ``squared`` variant
    ell*(ell+1)^2 reproduces the alternative coupling convention."""
    s = ell * (ell + 1) ** 2 if squared else ell * (ell + 1)
    return sech2(float(s), 1.0, geometry)


def exponential_well(depth: float, width: float = 1.0, geometry: str = FULL_LINE) -> PotentialSpec:
    return PotentialSpec("exponential_well", {"depth": depth, "width": width}, geometry)


def delta_function(coupling: float, geometry: str = FULL_LINE) -> PotentialSpec:
    return PotentialSpec("delta_function", {"coupling": coupling}, geometry)


def tabulated(grid, values, geometry: str = FULL_LINE) -> PotentialSpec:
    return PotentialSpec("tabulated", {}, geometry, grid=grid, values=values)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def evaluate(potential: PotentialSpec, x):
    """V(x) for x >= 0; vectorized over x."""
    if potential.singular:
        raise SingularPotential("delta_function must not be sampled pointwise")
    scalar = np.isscalar(x)
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0):
        raise OutOfRange("potentials are defined for x >= 0")
    p = potential.params
    if potential.family == "gaussian_well":
        out = -p["depth"] * np.exp(-((xs / p.get("width", 1.0)) ** 2))
    elif potential.family == "square_well":
        out = np.where(xs < p.get("width", 1.0), -p["depth"], 0.0)
    elif potential.family == "sech2":
        out = -p["strength"] / np.cosh(xs / p.get("width", 1.0)) ** 2
    elif potential.family == "exponential_well":
        out = -p["depth"] * np.exp(-xs / p.get("width", 1.0))
    elif potential.family == "tabulated":
        if np.any(xs > potential.grid[-1] * (1 + 1e-12)):
            raise OutOfRange("x beyond tabulated grid")
        out = potential._spline(np.minimum(xs, potential.grid[-1]))
    else:
        raise AssertionError(potential.family)
    return float(out) if scalar else out


def evaluator(potential: PotentialSpec) -> Callable:
    """Vectorized closure V(x), for the ODE backends."""
    if potential.singular:
        raise SingularPotential("delta_function must not be sampled pointwise")
    p = potential.params
    if potential.family == "gaussian_well":
        d, w = p["depth"], p.get("width", 1.0)
        return lambda x: -d * np.exp(-((x / w) ** 2))
    if potential.family == "square_well":
        d, w = p["depth"], p.get("width", 1.0)
        return lambda x: np.where(np.asarray(x) < w, -d, 0.0)
    if potential.family == "sech2":
        s, w = p["strength"], p.get("width", 1.0)

        def _sech2_eval(x):
            e = np.exp(-2.0 * np.abs(np.asarray(x) / w))
            return -4.0 * s * e / (1.0 + e) ** 2

        return _sech2_eval
    if potential.family == "exponential_well":
        d, w = p["depth"], p.get("width", 1.0)
        return lambda x: -d * np.exp(-np.asarray(x) / w)
    if potential.family == "tabulated":
        spl, xend = potential._spline, potential.grid[-1]
        return lambda x: spl(np.clip(x, 0.0, xend))
    raise AssertionError(potential.family)


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PotentialMoments:
    faddeev: float
    halfline_integral: float
    power_integrals: dict
    origin_values: tuple
    singular: bool = False


def power_integral(potential: PotentialSpec, p: float) -> float:
    """integral_0^inf |V(x)|^p dx for real p > 0 (closed form where possible)."""
    if potential.singular:
        raise SingularPotential("delta potential has no power integrals")
    fam = potential.family
    if fam == "tabulated":
        f = evaluator(potential)
        val, err = quad(lambda x: abs(f(x)) ** p, 0.0, potential.x_max, limit=200)
        if err > 1e-9 * max(1.0, abs(val)):
            raise DivergentMoment(f"power integral p={p} did not converge")
        return val
    d, w = potential.depth, potential.width
    if fam == "gaussian_well":
        return d**p * 0.5 * w * math.sqrt(math.pi / p)
    if fam == "square_well":
        return d**p * w
    if fam == "sech2":
        # integral_0^inf sech^(2p) t dt = sqrt(pi) Gamma(p) / (2 Gamma(p + 1/2))
        return d**p * w * math.sqrt(math.pi) * _gamma(p) / (2.0 * _gamma(p + 0.5))
    if fam == "exponential_well":
        return d**p * w / p
    raise AssertionError(fam)


def origin_values(potential: PotentialSpec) -> tuple:
    """(V(0), V'(0), V''(0)); needs the potential smooth at the origin."""
    if potential.singular:
        raise SingularPotential("delta potential is not smooth at the origin")
    fam, d, w = potential.family, potential.depth, potential.width
    if fam == "gaussian_well":
        return (-d, 0.0, 2.0 * d / w**2)
    if fam == "square_well":
        return (-d, 0.0, 0.0)
    if fam == "sech2":
        return (-d, 0.0, 2.0 * d / w**2)
    if fam == "exponential_well":
        return (-d, d / w, -d / w**2)
    if fam == "tabulated":
        spl = potential._spline
        return (float(spl(0.0)), float(spl(0.0, 1)), float(spl(0.0, 2)))
    raise AssertionError(fam)


def moments(potential: PotentialSpec) -> PotentialMoments:
    """First absolute moment (admissibility gate), half-line integral,
    integer power integrals and origin derivatives."""
    if potential.singular:
        lam = potential.params["coupling"]
        return PotentialMoments(
            faddeev=lam,
            halfline_integral=-lam / 2.0,
            power_integrals={},
            origin_values=(),
            singular=True,
        )
    fam, d, w = potential.family, potential.depth, potential.width
    if fam == "gaussian_well":
        faddeev = d * (0.5 * w * math.sqrt(math.pi) + 0.5 * w**2)
        half = -d * 0.5 * w * math.sqrt(math.pi)
    elif fam == "square_well":
        faddeev = d * (w + 0.5 * w**2)
        half = -d * w
    elif fam == "sech2":
        faddeev = d * (w + w**2 * math.log(2.0))
        half = -d * w
    elif fam == "exponential_well":
        faddeev = d * (w + w**2)
        half = -d * w
    elif fam == "tabulated":
        f = evaluator(potential)
        faddeev, err1 = quad(lambda x: (1 + x) * abs(f(x)), 0.0, potential.x_max, limit=200)
        half, err2 = quad(f, 0.0, potential.x_max, limit=200)
        if max(err1, err2) > 1e-9 * max(1.0, abs(faddeev)):
            raise DivergentMoment("tabulated moment quadrature did not converge")
    else:
        raise AssertionError(fam)
    powers = {n: power_integral(potential, float(n)) for n in (1, 2, 3)}
    return PotentialMoments(
        faddeev=float(faddeev),
        halfline_integral=float(half),
        power_integrals=powers,
        origin_values=origin_values(potential),
    )


# ---------------------------------------------------------------------------
# closed-form reference data (oracles for the numerical pipeline)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReferenceData:
    """Exact scattering data for a solvable potential/channel pair.

    ``phase`` returns the continuous-branch phase shift, ``jost`` the
    channel Jost function (F for psi(0)=0, G for psi'(0)=0).  ``born_phase``
    is only populated where the Born terms have closed forms.
    """

    channel: Channel
    phase: Callable
    jost: Callable
    bound_kappas: tuple
    half_bound: bool = False
    born_phase: Callable | None = None


def _sech2_ell(potential: PotentialSpec) -> int | None:
    """Integer ell with strength = ell(ell+1) and unit width, if any."""
    if potential.family != "sech2" or abs(potential.width - 1.0) > 1e-12:
        return None
    s = potential.params["strength"]
    ell = round(0.5 * (math.sqrt(1.0 + 4.0 * s) - 1.0))
    if ell >= 1 and abs(ell * (ell + 1) - s) < 1e-9:
        return ell
    return None


def _reference_delta(lam: float, channel: Channel) -> ReferenceData:
    if channel == ANTISYM:
        return ReferenceData(
            channel=channel,
            phase=lambda k: np.zeros_like(np.asarray(k, dtype=float)),
            jost=lambda k: np.ones_like(np.asarray(k, dtype=complex)),
            bound_kappas=(),
            born_phase=lambda nu, k: np.zeros_like(np.asarray(k, dtype=float)),
        )

    def phase(k):
        return np.arctan(lam / (2.0 * np.asarray(k, dtype=float)))

    def jost_g(k):
        return 1j * np.asarray(k, dtype=complex) + lam / 2.0

    def born_phase(nu, k):
        # phase expansion of arctan(lam/2k): odd orders only
        k = np.asarray(k, dtype=float)
        if nu % 2 == 0:
            return np.zeros_like(k)
        z = lam / (2.0 * k)
        return (-1.0) ** ((nu - 1) // 2) * z**nu / nu

    return ReferenceData(
        channel=channel,
        phase=phase,
        jost=jost_g,
        bound_kappas=(lam / 2.0,),
        born_phase=born_phase,
    )


def _reference_sech2(ell: int, channel: Channel) -> ReferenceData:
    if channel == ANTISYM:
        zeros = [j for j in range(ell - 1, -1, -2)]  # includes 0 when present
        poles = [j for j in range(ell, 0, -2)]
        prefactor = 1.0
    else:
        zeros = [j for j in range(ell, -1, -2)]
        poles = [j for j in range(ell - 1, 0, -2)]
        prefactor = 1j

    bound = tuple(float(j) for j in zeros if j > 0)
    half_bound = 0 in zeros

    def jost(k):
        k = np.asarray(k, dtype=complex)
        out = np.full_like(k, prefactor)
        for j in zeros:
            out = out * (k - 1j * j)
        for j in poles:
            out = out / (k + 1j * j)
        return out

    def phase(k):
        k = np.asarray(k, dtype=float)
        out = np.zeros_like(k)
        for j in range(1, ell + 1):
            out += np.arctan(j / k)
        return out

    return ReferenceData(
        channel=channel,
        phase=phase,
        jost=jost,
        bound_kappas=bound,
        half_bound=half_bound,
    )


def _reference_square(V0: float, a: float, channel: Channel) -> ReferenceData:
    sign = +1.0 if channel == ANTISYM else -1.0

    def phase(k):
        k = np.asarray(k, dtype=float)
        K = np.sqrt(k**2 + V0)
        bracket = (K + k) + sign * (K - k) * np.exp(-2j * K * a)
        return (K - k) * a + np.angle(bracket)

    if channel == ANTISYM:

        def jost(k):
            k = np.asarray(k, dtype=complex)
            K = np.sqrt(k**2 + V0)
            return np.exp(1j * k * a) * (np.cos(K * a) - 1j * (k / K) * np.sin(K * a))

        def match(kappa):
            # pole-free form of K cot(Ka) = -kappa
            Kt = math.sqrt(max(V0 - kappa**2, 0.0))
            return Kt * math.cos(Kt * a) + kappa * math.sin(Kt * a)

    else:

        def jost(k):
            k = np.asarray(k, dtype=complex)
            K = np.sqrt(k**2 + V0)
            return np.exp(1j * k * a) * (K * np.sin(K * a) + 1j * k * np.cos(K * a))

        def match(kappa):
            # pole-free form of K tan(Ka) = kappa
            Kt = math.sqrt(max(V0 - kappa**2, 0.0))
            return Kt * math.sin(Kt * a) - kappa * math.cos(Kt * a)

    bound = _square_well_kappas(V0, a, match)
    return ReferenceData(channel=channel, phase=phase, jost=jost, bound_kappas=bound)


def _square_well_kappas(V0: float, a: float, match: Callable) -> tuple:
    kap_hi = math.sqrt(V0) * (1 - 1e-12)
    grid = np.linspace(1e-9, kap_hi, 4000)
    vals = np.array([match(kap) for kap in grid])
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(brentq(match, grid[i], grid[i + 1], xtol=1e-13))
    return tuple(sorted(roots, reverse=True))


def closed_form_reference(potential: PotentialSpec, channel: Channel) -> ReferenceData | None:
    """Exact (phase, Jost, bound-state) record for the solvable cases,
    used as an oracle against the numerical pipeline.  Returns None for
    families without closed forms."""
    if not channel.is_1d:
        return None
    if potential.family == "delta_function":
        return _reference_delta(potential.params["coupling"], channel)
    if potential.family == "square_well":
        return _reference_square(potential.depth, potential.width, channel)
    ell = _sech2_ell(potential)
    if ell is not None:
        return _reference_sech2(ell, channel)
    return None
