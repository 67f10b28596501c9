"""Acceptance suite: every release criterion at its stated tolerance.

Run with -s to see one PASS/FAIL line per criterion.  The per-channel
sweeps are shared across criteria, so the file runs the full corpus
once; expect a few minutes of wall time.
"""

import math
import time

import numpy as np
import pytest

from sumrule_lab import radial, sumrules, wkb
from sumrule_lab.backends import backend_name
from sumrule_lab.born import BornEngine
from sumrule_lab.channels import ANTISYM, SYM, partial_wave
from sumrule_lab.jost1d import solve_beta_batch
from sumrule_lab.potentials import (
    HALF_LINE,
    delta_function,
    gaussian_well,
    sech2,
    square_well,
)
from sumrule_lab.spectrum import bound_states
from sumrule_lab.sumrules import ChannelSweep, buslaev_faddeev, levinson, verify

CORPUS = [
    ("gaussian3", gaussian_well(3.0, 1.0)),
    ("gaussian10", gaussian_well(10.0, 1.0)),
    ("sech5", sech2(5.0)),
    ("sech12", sech2(12.0)),
    ("square4", square_well(4.0, 1.0)),
]

NM_LIST = [(0, 0), (1, 1), (2, 2)]
_swept: dict = {}
_timings: dict = {}


def _radial_clone(pot):
    doc = pot.to_json_dict()
    doc["geometry"] = HALF_LINE
    from sumrule_lab.potentials import PotentialSpec

    return PotentialSpec.from_json_dict(doc)


def _sweep(name: str, pot, channel) -> ChannelSweep:
    key = (name, channel.label)
    if key not in _swept:
        _swept[key] = ChannelSweep(pot, channel)
    return _swept[key]


def _line(num: int, ok: bool, text: str):
    tag = "PASS" if ok else "FAIL"
    print(f"[criterion {num:2d}] {tag}: {text}")


def test_criterion_1_sum_rule_suite():
    """Minimally subtracted identities across the corpus, 1D and 3D."""
    worst = 0.0
    worst_case = ""
    ok = True
    for name, pot in CORPUS:
        t0 = time.time()
        for channel in (ANTISYM, SYM):
            sweep = _sweep(name, pot, channel)
            for n, m in NM_LIST:
                rep = verify(pot, channel, n, m, sweep=sweep)
                rel = abs(rep.residual) / max(abs(rep.lhs), 1.0)
                if rel > worst:
                    worst, worst_case = rel, f"{name}/{channel.label}/(n={n},m={m})"
                ok &= rel < 1e-3
        rpot = _radial_clone(pot)
        for ell in (0, 1):
            sweep = _sweep(name + "r", rpot, partial_wave(ell))
            for n, m in NM_LIST:
                rep = verify(rpot, partial_wave(ell), n, m, sweep=sweep)
                rel = abs(rep.residual) / max(abs(rep.lhs), 1.0)
                if rel > worst:
                    worst, worst_case = rel, f"{name}/ell{ell}/(n={n},m={m})"
                ok &= rel < 1e-3
        _timings[name] = time.time() - t0
    _line(1, ok, f"worst relative residual {worst:.2e} at {worst_case}")
    assert ok


def test_criterion_1_runtime_target():
    slowest = max(_timings.values()) if _timings else 0.0
    text = f"slowest 1D+3D sweep set {slowest:.1f}s (backend: {backend_name()})"
    if backend_name() == "compiled":
        _line(1, slowest < 60.0, text + " against the 60 s target")
        assert slowest < 60.0
    else:
        _line(1, True, text + " (runtime target asserted only for the compiled backend)")


def test_criterion_2_levinson_endpoints():
    ok = True
    worst = 0.0
    for name, pot in CORPUS:
        for channel in (ANTISYM, SYM):
            rep = levinson(pot, channel, sweep=_sweep(name, pot, channel))
            worst = max(worst, abs(rep["residual"]))
            ok &= abs(rep["residual"]) < 1e-3 * math.pi
            if name == "sech12" and channel == ANTISYM:
                ok &= rep["half_bound"]  # flagged, checked against the modified value
    _line(2, ok, f"worst |delta(0) - expected| = {worst:.2e} (tol {1e-3 * math.pi:.2e})")
    assert ok


def test_criterion_3_anomalous_identity():
    ok = True
    texts = []
    for name, pot in (("gaussian3", gaussian_well(3.0, 1.0)), ("sech5", sech2(5.0))):
        rep = verify(pot, SYM, 1, 2, sweep=_sweep(name, pot, SYM))
        rel = abs(rep.residual) / max(abs(rep.lhs), 1.0)
        ok &= rel < 1e-3
        texts.append(f"{name}: rel={rel:.2e} anomaly={rep.anomaly:.6g}")
    _line(3, ok, "; ".join(texts))
    assert ok


def test_criterion_4_oversubtraction():
    ok = True
    worst = 0.0
    for name, pot in CORPUS:
        sweep = _sweep(name, pot, ANTISYM)
        val = sumrules.oversubtraction_check(pot, sweep=sweep)
        kap2 = sum(k**2 for k in sweep.bound.kappas)
        ratio = abs(val) / (1e-3 * kap2)
        worst = max(worst, ratio)
        ok &= abs(val) < 1e-3 * kap2
    _line(4, ok, f"worst |integral| at {worst:.2e} of its tolerance")
    assert ok


def test_criterion_5_delta_counterexample():
    lam = 2.0
    pot = delta_function(lam)
    rep = verify(pot, SYM, 1, 1)
    ok = abs(rep.lhs - lam**2 / 8.0) < 1e-10
    ok &= abs(rep.rhs_spectral - lam**2 / 4.0) < 1e-10
    ok &= rep.tail_fit["outside_scope"]
    _line(
        5,
        ok,
        f"I_11 = {rep.lhs} vs spectral {rep.rhs_spectral}; "
        f"fall-off exponent {rep.tail_fit['jost_level_exponent']:.3f} flagged out of scope",
    )
    assert ok


def test_criterion_6_born_decay_law():
    eng = BornEngine(gaussian_well(3.0, 1.0))
    ks = np.geomspace(20.0, 200.0, 9)
    ok = True
    slopes = []
    for nu in (1, 2, 3):
        vals = np.array([abs(eng.born_beta_value(nu, k)) for k in ks])
        slope = float(np.polyfit(np.log(ks), np.log(vals), 1)[0])
        slopes.append(slope)
        ok &= abs(slope - (1 - 2 * nu)) <= 0.2
    _line(6, ok, "fitted exponents " + ", ".join(f"{s:.3f}" for s in slopes) + " vs -1, -3, -5")
    assert ok


def test_criterion_7_3d_1d_consistency():
    ok = True
    worst = 0.0
    for pot1d, potr in (
        (gaussian_well(3.0, 1.0), gaussian_well(3.0, 1.0, geometry=HALF_LINE)),
        (sech2(12.0), sech2(12.0, geometry=HALF_LINE)),
    ):
        ks = np.geomspace(0.05, 50.0, 25)
        b1d, _, _ = solve_beta_batch(pot1d, ks)
        brad, _, _ = radial.solve_beta_radial_batch(potr, 0, ks)
        diff = float(np.max(np.abs(-b1d.real + brad.real)))
        worst = max(worst, diff)
        ok &= diff < 1e-8
    _line(7, ok, f"max |delta_0 - delta_minus| = {worst:.2e} over k in [0.05, 50]")
    assert ok


def test_criterion_8_wkb_figure():
    est = wkb.wkb_estimate(sech2(20.0), 1)
    closed = 20.0**1.5 / 3.0
    rel_exact = (closed - 30.0) / (closed + 30.0)
    ok = abs(est.value - closed) < 1e-6
    ok &= abs(est.relative_error - rel_exact) < 1e-6
    ok &= abs(abs(est.relative_error) - 3.1e-3) < 1e-4
    for n in (1, 2):
        errs = []
        for l in (2, 3, 4, 5, 6):
            errs.append(abs(wkb.wkb_estimate(sech2(float(l * (l + 1))), n).relative_error))
        ok &= all(b < a for a, b in zip(errs, errs[1:]))
    for n in (1, 2):
        ps, wm = wkb.semiclassical_check(gaussian_well(10.0, 1.0), n)
        ok &= abs(ps - wm) < 1e-8 * max(abs(wm), 1.0)
    _line(
        8,
        ok,
        f"l=4,n=1 moment {est.value:.9g} vs exact {est.exact:.9g}, "
        f"relative error {est.relative_error:.4e}; monotone for l >= 2; "
        "phase-space equality at 1e-8",
    )
    assert ok


def test_criterion_9_trace_identity():
    ok = True
    texts = []
    for name, pot in (
        ("gaussian3", gaussian_well(3.0, 1.0)),
        ("gaussian10", gaussian_well(10.0, 1.0)),
        ("sech5", sech2(5.0)),
        ("sech6", sech2(6.0)),
    ):
        sweep = _sweep(name, pot, ANTISYM)
        rep = buslaev_faddeev(pot, 1, sweep=sweep)
        v0 = rep["rhs"]
        scale = max(abs(v0), sum(k**2 for k in sweep.bound.kappas))
        ok &= abs(rep["residual"]) < 1e-3 * scale
        texts.append(f"{name}: {abs(rep['residual']) / scale:.1e}")
    _line(9, ok, "order-1 residual/scale " + ", ".join(texts))
    assert ok


def test_criterion_10_spectrum_cross_check():
    ok = True
    worst = 0.0
    for name, pot in CORPUS:
        for channel in (ANTISYM, SYM):
            bs = _sweep(name, pot, channel).bound
            worst = max(worst, bs.agreement)
            ok &= bs.agreement < 1e-6
        rpot = _radial_clone(pot)
        for ell in (0, 1):
            bs = _sweep(name + "r", rpot, partial_wave(ell)).bound
            worst = max(worst, bs.agreement)
            ok &= bs.agreement < 1e-6
    _line(10, ok, f"worst Jost-vs-shooting disagreement {worst:.2e} (tol 1e-6)")
    assert ok
