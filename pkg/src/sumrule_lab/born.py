"""Born terms of the Jost exponent, in 1D and for partial waves.

The order-nu profiles obey the linear hierarchy

    u1(x) = i * Int_x^inf e^{2ik(y-x)} V(y) dy
    u2(x) = i * Int_x^inf e^{2ik(y-x)} u1(y)^2 dy
    u3(x) = i * Int_x^inf e^{2ik(y-x)} 2 u1(y) u2(y) dy
    ...
    beta_nu(x) = -Int_x^inf u_nu(y) dy,

with the radial analogue obtained by replacing the exponential kernel by
(w_ell(k r2)/w_ell(k r1))^2; since w_ell(z) = e^{iz} P_ell(1/z), that
kernel is handled exactly by pre-multiplying the source with P_ell^2 and
dividing it back out of the result.

Quadrature scheme
-----------------
Functions are held as values on Chebyshev-Lobatto nodes of panels sized so
that the phase 2|k|h per panel stays below THETA_MAX; the suffix integrals
are then evaluated with matrices

    W_ij(theta) = Int_{s_i}^1 L_j(s) e^{i theta s} ds
                = sum_m (i theta)^m / m!  *  Int_{s_i}^1 L_j(s) s^m ds,

exact for (panel polynomial) x e^{2iky} products.  Because the panel
width shrinks like 1/|k|, the representation resolves every frequency
produced by the quadratic source terms, uniformly in k -- including the
persistent edge oscillations of discontinuous wells.  Suffix constants
are transported with unit-modulus relative phase factors only, so the
scheme remains stable for complex k in the upper half plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .backends.common import eta_poly_coeffs
from .channels import ANTISYM, SYM, Channel
from .errors import ConvergenceFailure, SingularPotential
from .potentials import PotentialSpec, evaluator

NODES = 14
THETA_MAX = 0.6
_M_TERMS = 20
_SMOOTH_PANELS_PER_WIDTH = 6.0
DEFAULT_M_MAX = 3

# Chebyshev-Lobatto nodes mapped to [0, 1]
S_NODES = 0.5 * (1.0 - np.cos(np.pi * np.arange(NODES) / (NODES - 1)))
_BARY_W = np.array([(-1.0) ** j * (0.5 if j in (0, NODES - 1) else 1.0) for j in range(NODES)])


def _build_a_stack() -> np.ndarray:
    """A[m, i, j] = Int_{s_i}^1 L_j(s) s^m ds via exact Gauss-Legendre."""
    ng = 40
    gx, gw = roots_legendre(ng)
    stack = np.zeros((_M_TERMS, NODES, NODES))
    for i in range(NODES):
        a = S_NODES[i]
        if a >= 1.0:
            continue
        x = 0.5 * (1 - a) * gx + 0.5 * (1 + a)
        w = 0.5 * (1 - a) * gw
        # Lagrange basis at the quadrature points, barycentric form
        diff = x[:, None] - S_NODES[None, :]
        tiny = np.abs(diff) < 1e-300
        diff[tiny] = 1.0
        terms = _BARY_W[None, :] / diff
        L = terms / terms.sum(axis=1, keepdims=True)
        L[np.any(tiny, axis=1)] = 0.0
        L[tiny] = 1.0
        pw = np.ones_like(x)
        for m in range(_M_TERMS):
            stack[m, i, :] = (L * (w * pw)[:, None]).sum(axis=0)
            pw = pw * x
    return stack


_A_STACK = _build_a_stack()
_CC_WEIGHTS = _A_STACK[0, 0, :].copy()  # Int_0^1 L_j


def _w_matrix(theta: complex) -> np.ndarray:
    """W(theta), exact for the degree-(NODES-1) interpolant; |theta| <= ~1."""
    out = np.zeros((NODES, NODES), dtype=complex)
    fac = 1.0 + 0j
    for m in range(_M_TERMS):
        out += fac * _A_STACK[m]
        fac *= 1j * theta / (m + 1)
    return out


def _interp_matrix(s_eval: np.ndarray) -> np.ndarray:
    """Barycentric interpolation matrix from the panel nodes to s_eval."""
    diff = s_eval[:, None] - S_NODES[None, :]
    exact = np.abs(diff) < 1e-14
    diff[exact] = 1.0
    terms = _BARY_W[None, :] / diff
    L = terms / terms.sum(axis=1, keepdims=True)
    rows = np.any(exact, axis=1)
    L[rows] = 0.0
    L[exact] = 1.0
    return L


@dataclass(frozen=True)
class BornTerm:
    """Origin value (and optional profile) of one Born order."""

    order: int
    channel: Channel
    k: complex
    value: complex
    profile: tuple | None = None  # (x nodes, beta'_nu values)


# evaluation abscissae nudged into the open panel so that a jump sitting
# exactly on a panel edge is sampled with its interior limit
_S_EVAL = S_NODES * (1.0 - 2e-13) + 1e-13


class _PanelGrid:
    """Panel edges plus node coordinates; panels grouped by width."""

    def __init__(self, edges: np.ndarray):
        self.edges = edges
        self.h = np.diff(edges)
        self.n = len(self.h)
        self.nodes = edges[:-1, None] + self.h[:, None] * S_NODES[None, :]
        self.eval_nodes = edges[:-1, None] + self.h[:, None] * _S_EVAL[None, :]
        # group panels of (nearly) equal width for shared W matrices
        self.groups = []
        key = np.round(np.log(self.h) * 1e9)
        for val in np.unique(key):
            idx = np.nonzero(key == val)[0]
            self.groups.append((float(self.h[idx[0]]), idx))


def _grid_1d(x_max: float, width: float, k_abs: float) -> _PanelGrid:
    h = min(width / _SMOOTH_PANELS_PER_WIDTH, THETA_MAX / (2.0 * max(k_abs, 1e-9)))
    n = max(4, int(math.ceil(x_max / h)))
    return _PanelGrid(np.linspace(0.0, x_max, n + 1))


def _grid_radial(r_lo: float, r_max: float, width: float, k_abs: float) -> _PanelGrid:
    """Geometric panels from r_lo out to ~width, uniform beyond; node edges
    are placed exactly at 2*r_lo and 4*r_lo for the short-range cutoff
    extrapolation."""
    h_uni = min(width / _SMOOTH_PANELS_PER_WIDTH, THETA_MAX / (2.0 * max(k_abs, 1e-9)))
    edges = [r_lo, 2.0 * r_lo, 4.0 * r_lo]
    r = 4.0 * r_lo
    while True:
        step = min(max(0.6 * r, 4.0 * r_lo), h_uni)
        if r + step >= width / 2.0 or step >= h_uni * 0.999:
            break
        r += step
        edges.append(r)
    n = max(2, int(math.ceil((r_max - r) / h_uni)))
    edges.extend(np.linspace(r, r_max, n + 1)[1:])
    return _PanelGrid(np.asarray(edges))


class BornEngine:
    """Born profiles and origin values for one potential (and one ell)."""

    def __init__(self, potential: PotentialSpec, ell: int | None = None):
        if potential.singular:
            raise SingularPotential("Born engine rejects the delta potential")
        self.potential = potential
        self.ell = ell
        self._veval = evaluator(potential)
        self._x_max = potential.x_max
        self._width = potential.width
        if ell is not None and ell > 0:
            self._r_lo = 1e-4 * self._width / 4.0
            p, dp = eta_poly_coeffs(ell)
            self._p_coeffs = p
        else:
            self._r_lo = 0.0
            self._p_coeffs = None
        self._cache: dict = {}

    # -- core ----------------------------------------------------------------

    def _apply_suffix_operator(self, grid: _PanelGrid, k: complex, src: np.ndarray) -> np.ndarray:
        """u(x) = i * Int_x^xmax e^{2ik(y-x)} src(y) dy on the panel nodes."""
        n = grid.n
        partial = np.empty((n, NODES), dtype=complex)
        jloc = np.empty(n, dtype=complex)
        mod_in = np.empty((n, NODES), dtype=complex)
        for h, idx in grid.groups:
            theta = 2.0 * k * h
            W = _w_matrix(theta)
            partial[idx] = h * (src[idx] @ W.T)
            jloc[idx] = partial[idx, 0]
            mod_in[idx] = np.exp(-1j * theta * S_NODES)[None, :]
        # suffix constants with relative phases only
        phases = 2.0 * k * (grid.edges - grid.edges[0])
        zj = np.exp(1j * phases[:-1]) * jloc
        cum = np.cumsum(zj[::-1])[::-1]
        suffix_next = np.zeros(n, dtype=complex)
        suffix_next[:-1] = np.exp(-1j * phases[1:-1]) * cum[1:]
        out = np.empty((n, NODES), dtype=complex)
        for h, idx in grid.groups:
            theta = 2.0 * k * h
            out[idx] = 1j * (
                mod_in[idx] * partial[idx]
                + np.exp(1j * theta * (1.0 - S_NODES))[None, :] * suffix_next[idx, None]
            )
        return out

    def _p_squared(self, k: complex, nodes: np.ndarray) -> np.ndarray:
        s = 1.0 / (k * nodes)
        val = np.zeros_like(s, dtype=complex)
        for c in self._p_coeffs[::-1]:
            val = val * s + c
        return val * val

    def _solve(self, k: complex, m_max: int):
        key = (complex(k), m_max)
        if key in self._cache:
            return self._cache[key]
        k = complex(k)
        if self.ell is not None and self.ell > 0:
            grid = _grid_radial(self._r_lo, self._x_max, self._width, abs(k))
        else:
            grid = _grid_1d(self._x_max, self._width, abs(k))
        v = self._veval(grid.eval_nodes).astype(complex)
        if self._p_coeffs is not None:
            psq = self._p_squared(k, grid.nodes)
            inv_psq = 1.0 / psq
        else:
            psq = inv_psq = None

        us = []
        for nu in range(1, m_max + 1):
            if nu == 1:
                gam = v
            else:
                gam = np.zeros_like(v)
                for sig in range(1, nu):
                    gam = gam + us[sig - 1] * us[nu - sig - 1]
            src = gam if psq is None else gam * psq
            u = self._apply_suffix_operator(grid, k, src)
            if inv_psq is not None:
                u = u * inv_psq
            us.append(u)

        # beta_nu at the inner boundary: -Int u, Richardson-extrapolated to
        # r -> 0 for ell >= 1 (panels 0 and 1 end exactly at 2 r_lo, 4 r_lo)
        panel_ints = [grid.h[:, None] * (u * _CC_WEIGHTS[None, :]) for u in us]
        values = []
        uprime0 = []
        for nu, u in enumerate(us):
            pint = panel_ints[nu].sum(axis=1)
            total = pint.sum()
            if self.ell is not None and self.ell > 0:
                f1 = -total  # cutoff r_lo
                f2 = -(total - pint[0])  # cutoff 2 r_lo
                f4 = -(total - pint[0] - pint[1])  # cutoff 4 r_lo
                # u ~ O(r) near the origin: leading error r_cut^2, then r_cut^3
                r21 = (4.0 * f2 - f4) / 3.0
                r10 = (4.0 * f1 - f2) / 3.0
                values.append((8.0 * r10 - r21) / 7.0)
            else:
                values.append(-total)
            uprime0.append(u[0, 0])
        result = {
            "grid": grid,
            "profiles": us,
            "beta": np.array(values),
            "betaprime0": np.array(uprime0),
        }
        self._cache[key] = result
        if len(self._cache) > 512:
            self._cache.pop(next(iter(self._cache)))
        return result

    # -- public operations -----------------------------------------------------

    def born_beta_value(self, nu: int, k: complex) -> complex:
        """beta_nu(k) at the origin (r -> 0 limit for partial waves)."""
        res = self._solve(k, nu)
        return complex(res["beta"][nu - 1])

    def born_prime_origin(self, nu: int, k: complex) -> complex:
        res = self._solve(k, nu)
        return complex(res["betaprime0"][nu - 1])

    def born_prime_profile(self, nu: int, k: complex, x_grid) -> np.ndarray:
        """beta'_nu(k, x) sampled on x_grid."""
        res = self._solve(k, nu)
        grid, u = res["grid"], res["profiles"][nu - 1]
        xs = np.asarray(x_grid, dtype=float)
        out = np.zeros(xs.shape, dtype=complex)
        inside = (xs >= grid.edges[0]) & (xs <= grid.edges[-1])
        idx = np.clip(np.searchsorted(grid.edges, xs[inside], side="right") - 1, 0, grid.n - 1)
        s = (xs[inside] - grid.edges[idx]) / grid.h[idx]
        vals = np.empty(idx.shape, dtype=complex)
        for j, (p, sj) in enumerate(zip(idx, s)):
            vals[j] = _interp_matrix(np.array([sj]))[0] @ u[p]
        out[inside] = vals
        return out

    def born_beta_batch(self, nu: int, ks) -> np.ndarray:
        return np.array([self.born_beta_value(nu, k) for k in np.atleast_1d(ks)])

    def born_phase_batch(self, nu: int, ks, channel: Channel) -> np.ndarray:
        """Order-nu Born phase on a real k grid."""
        ks = np.atleast_1d(np.asarray(ks, dtype=float))
        m = nu
        betas = np.empty((m, ks.size), dtype=complex)
        primes = np.empty((m, ks.size), dtype=complex)
        for i, k in enumerate(ks):
            res = self._solve(complex(k), m)
            betas[:, i] = res["beta"][:m]
            primes[:, i] = res["betaprime0"][:m]
        if channel == SYM:
            log_terms = _ln1p_orders({p + 1: primes[p] / ks for p in range(m)}, m)
            return -betas[nu - 1].real - log_terms[nu].imag
        return -betas[nu - 1].real

    def series_crossover(self, k_lo: float = 0.2, k_hi: float = 400.0) -> float:
        """Smallest k above which |beta_2| < |beta_1|/2 holds, by log scan.

        Empirical stand-in for the (uncomputable) convergence radius of the
        Born series at large |k|."""
        ks = np.geomspace(k_lo * self.potential.k_scale, k_hi, 60)
        ok = np.array(
            [abs(self.born_beta_value(2, k)) < 0.5 * abs(self.born_beta_value(1, k)) for k in ks]
        )
        if not ok[-1]:
            raise ConvergenceFailure("no Born crossover found below k_hi")
        idx = np.nonzero(~ok)[0]
        if idx.size == 0:
            return float(ks[0])
        return float(ks[idx[-1] + 1])


def _ln1p_orders(z: dict[int, np.ndarray], m: int) -> dict[int, np.ndarray]:
    """Order-by-order expansion of ln(1 + z) when z = sum_nu z_nu with z_nu
    of order nu in the potential; returns orders 1..m."""
    shape = next(iter(z.values())).shape
    out = {nu: np.zeros(shape, dtype=complex) for nu in range(1, m + 1)}
    power = {nu: arr.copy() for nu, arr in z.items() if nu <= m}
    sign = 1.0
    for p in range(1, m + 1):
        for nu, arr in power.items():
            out[nu] += sign * arr / p
        if p < m:
            nxt: dict[int, np.ndarray] = {}
            for a, arr_a in power.items():
                for b, arr_b in z.items():
                    if a + b <= m:
                        nxt[a + b] = nxt.get(a + b, 0) + arr_a * arr_b
            power = nxt
            sign = -sign
    return out


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------


def _engine_for(potential: PotentialSpec, channel: Channel | None = None, ell: int | None = None) -> BornEngine:
    if channel is not None and not channel.is_1d:
        ell = channel.ell
    return BornEngine(potential, ell=ell)


def born_prime(potential: PotentialSpec, nu: int, k: complex, x_grid, ell: int | None = None) -> np.ndarray:
    """Profile beta'_nu(k, .) on x_grid (1D, or partial wave ell)."""
    if nu < 1:
        raise ValueError("Born order starts at 1")
    return _engine_for(potential, ell=ell).born_prime_profile(nu, k, x_grid)


def born_beta(potential: PotentialSpec, nu: int, k: complex, channel: Channel = ANTISYM) -> BornTerm:
    """Origin Born term beta_nu(k) as a BornTerm record."""
    if nu < 1:
        raise ValueError("Born order starts at 1")
    eng = _engine_for(potential, channel=channel)
    return BornTerm(order=nu, channel=channel, k=complex(k), value=eng.born_beta_value(nu, k))


def born_phase(potential: PotentialSpec, nu: int, k, channel: Channel = ANTISYM) -> float | np.ndarray:
    """Order-nu Born phase; the symmetric channel assembles the formal
    expansion of -Re beta - Im ln(1 + beta'/k) truncated at order nu."""
    if potential.singular:
        from .potentials import closed_form_reference

        ref = closed_form_reference(potential, channel)
        out = ref.born_phase(nu, k)
        return float(out) if np.isscalar(k) else out
    eng = _engine_for(potential, channel=channel)
    out = eng.born_phase_batch(nu, k, channel if channel.is_1d else ANTISYM)
    return float(out[0]) if np.isscalar(k) else out
