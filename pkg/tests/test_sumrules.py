import math

import numpy as np
import pytest

from sumrule_lab import sumrules
from sumrule_lab.channels import ANTISYM, SYM, partial_wave
from sumrule_lab.errors import ResidueInstability, TailFitFailure, UnsupportedSubtraction
from sumrule_lab.potentials import (
    HALF_LINE,
    delta_function,
    exponential_well,
    gaussian_well,
    moments,
    sech2,
)
from sumrule_lab.sumrules import (
    AnomalyTerm,
    ChannelSweep,
    anomaly,
    buslaev_faddeev,
    levinson,
    oversubtraction_check,
    sum_rule_lhs,
    sum_rule_lhs_direct,
    verify,
)


@pytest.fixture(scope="module")
def sweep_s5_anti():
    return ChannelSweep(sech2(5.0), ANTISYM)


@pytest.fixture(scope="module")
def sweep_s5_sym():
    return ChannelSweep(sech2(5.0), SYM)


@pytest.fixture(scope="module")
def sweep_g3_anti():
    return ChannelSweep(gaussian_well(3.0, 1.0), ANTISYM)


# -- anomaly -------------------------------------------------------------------


def test_anomaly_modes_and_values():
    pot = gaussian_well(3.0, 1.0)
    a = anomaly(pot, SYM, 0, 0)
    assert a.mode == "levinson_half" and a.value == 0.5
    a = anomaly(pot, SYM, 1, 1)
    assert a.mode == "zero_by_theorem" and a.value == 0.0
    a = anomaly(pot, SYM, 2, 3)  # n < m < 2n
    assert a.mode == "zero_by_theorem" and a.value == 0.0
    a = anomaly(pot, SYM, 1, 2)
    iv = moments(pot).halfline_integral
    assert a.mode == "closed_form_m_equals_2n"
    assert a.value == pytest.approx(-0.5 * iv**2, rel=1e-12)
    assert anomaly(pot, ANTISYM, 1, 2).value == 0.0


def test_anomaly_mode_table_total():
    # every (n, m) with m >= n maps to exactly one mode
    for n in range(0, 4):
        for m in range(n, 7):
            mode = sumrules._mode_for(n, m)
            assert mode in (
                "levinson_half",
                "zero_by_theorem",
                "closed_form_m_equals_2n",
                "numeric_residue",
            )
            theorem_zero = (2 * n > m) or (m == n and n > 0)
            assert (mode == "zero_by_theorem") == theorem_zero


def test_anomaly_residue_matches_closed_forms():
    # the Laurent-extraction path reproduces both printed special cases
    pot = sech2(5.0)
    assert sumrules._residue_value(pot, 0, 0, 0.1) == pytest.approx(0.5, abs=1e-10)
    iv = moments(pot).halfline_integral
    assert sumrules._residue_value(pot, 1, 2, 0.1) == pytest.approx(
        -0.5 * iv**2, rel=1e-8
    )
    assert sumrules._residue_value(pot, 1, 1, 0.1) == pytest.approx(0.0, abs=1e-9)


def test_anomaly_numeric_residue_radius_check():
    pot = gaussian_well(3.0, 1.0)
    a = anomaly(pot, SYM, 1, 3)  # m > 2n: numeric extraction
    assert a.mode == "numeric_residue"
    assert math.isfinite(a.value)


def test_anomaly_residue_delta_closed_form():
    # lam = 2: I_anom(1,2) = -(1/2)(lam/2)^2 = -1/2
    pot = delta_function(2.0)
    a = anomaly(pot, SYM, 1, 2)
    assert a.value == pytest.approx(-0.5, rel=1e-12)


# -- sum_rule_lhs and verify -----------------------------------------------------


def test_verify_examples_minimal_subtraction(sweep_s5_anti):
    pot = sech2(5.0)
    rep = verify(pot, ANTISYM, 1, 1, sweep=sweep_s5_anti)
    # lhs equals the spectral side within 1e-4 relative (oracle: spectrum)
    kappa = (math.sqrt(21.0) - 1.0) / 2.0 - 1.0  # antisym binding momentum
    assert rep.rhs_spectral == pytest.approx(kappa**2, rel=1e-9)
    assert abs(rep.residual) < 1e-4 * max(abs(rep.lhs), 1.0)


def test_verify_levinson_case(sweep_g3_anti):
    rep = verify(gaussian_well(3.0, 1.0), ANTISYM, 0, 0, sweep=sweep_g3_anti)
    assert abs(rep.residual) < 1e-3


def test_verify_symmetric_anomalous_case(sweep_s5_sym):
    rep = verify(sech2(5.0), SYM, 1, 2, sweep=sweep_s5_sym)
    assert rep.anomaly == pytest.approx(-12.5, rel=1e-10)
    assert abs(rep.residual) < 1e-3 * max(abs(rep.lhs), 1.0)


def test_verify_delta_documented_failure():
    rep = verify(delta_function(2.0), SYM, 1, 1)
    assert rep.lhs == pytest.approx(0.5, abs=1e-12)
    assert rep.rhs_spectral == pytest.approx(1.0, abs=1e-12)
    assert rep.residual == pytest.approx(-0.5, abs=1e-12)
    assert rep.tail_fit["outside_scope"]
    # Levinson for the same potential holds exactly
    rep0 = verify(delta_function(2.0), SYM, 0, 0)
    assert rep0.residual == pytest.approx(0.0, abs=1e-12)


def test_symmetric_oversubtraction_rejected():
    with pytest.raises(UnsupportedSubtraction):
        sum_rule_lhs(sech2(5.0), SYM, 1, 3)
    with pytest.raises(UnsupportedSubtraction):
        sum_rule_lhs(sech2(5.0), SYM, 0, 1)


def test_m_less_than_n_rejected():
    with pytest.raises(ValueError):
        sum_rule_lhs(sech2(5.0), ANTISYM, 2, 1)


def test_by_parts_vs_direct_derivative(sweep_s5_anti):
    pot = sech2(5.0)
    for n, m in [(1, 1), (2, 2)]:
        by_parts, _, err = sum_rule_lhs(pot, ANTISYM, n, m, sweep=sweep_s5_anti)
        direct = sum_rule_lhs_direct(pot, ANTISYM, n, m, sweep=sweep_s5_anti)
        assert direct == pytest.approx(by_parts, abs=max(5e-4, 10 * err))


def test_residual_shrinks_with_k_cut(sweep_g3_anti):
    pot = gaussian_well(3.0, 1.0)
    r1 = verify(pot, ANTISYM, 2, 2, sweep=sweep_g3_anti)
    r2 = verify(pot, ANTISYM, 2, 2, k_max=2 * sweep_g3_anti.K)
    assert abs(r2.residual) <= abs(r1.residual) + r1.quadrature_error


def test_half_bound_correction_in_counting_rule():
    # strength-12 well: zero-energy resonance in the psi(0)=0 channel adds
    # the extra half unit to the n = 0 identity
    pot = sech2(12.0)
    sweep = ChannelSweep(pot, ANTISYM)
    rep = verify(pot, ANTISYM, 0, 0, sweep=sweep)
    assert rep.half_bound_correction == -0.5
    assert abs(rep.residual) < 1e-3
    rep1 = verify(pot, ANTISYM, 1, 1, sweep=sweep)
    assert rep1.half_bound_correction == 0.0
    assert abs(rep1.residual) < 1e-3 * max(abs(rep1.lhs), 1.0)


# -- levinson -------------------------------------------------------------------


def test_levinson_examples(sweep_s5_anti, sweep_s5_sym):
    rep = levinson(sech2(5.0), ANTISYM, sweep=sweep_s5_anti)
    assert rep["expected"] == pytest.approx(math.pi)
    assert abs(rep["residual"]) < 1e-3 * math.pi
    rep = levinson(sech2(5.0), SYM, sweep=sweep_s5_sym)
    assert rep["expected"] == pytest.approx(math.pi / 2)
    assert abs(rep["residual"]) < 1e-3 * math.pi


def test_levinson_delta():
    rep = levinson(delta_function(2.0), SYM)
    assert rep["delta0"] == pytest.approx(math.pi / 2)
    assert rep["residual"] == pytest.approx(0.0, abs=1e-12)


def test_levinson_half_bound_flagged():
    rep = levinson(sech2(2.0), ANTISYM)
    assert rep["half_bound"]
    assert rep["n_bound"] == 0
    assert rep["expected"] == pytest.approx(math.pi / 2)
    assert abs(rep["residual"]) < 1e-3 * math.pi


def test_levinson_free():
    rep = levinson(gaussian_well(0.0, 1.0), ANTISYM)
    assert rep["delta0"] == pytest.approx(0.0, abs=1e-9)
    assert rep["expected"] == 0.0


# -- oversubtraction & trace identities ------------------------------------------


def test_oversubtraction_zero(sweep_g3_anti, sweep_s5_anti):
    val = oversubtraction_check(gaussian_well(3.0, 1.0), sweep=sweep_g3_anti)
    kap2 = sum(k**2 for k in sweep_g3_anti.bound.kappas)
    assert abs(val) < 1e-3 * kap2
    val = oversubtraction_check(sech2(5.0), sweep=sweep_s5_anti)
    kap2 = sum(k**2 for k in sweep_s5_anti.bound.kappas)
    assert abs(val) < 1e-3 * kap2


def test_oversubtraction_symmetric_rejected():
    with pytest.raises(UnsupportedSubtraction):
        oversubtraction_check(sech2(5.0), SYM)


def test_trace_identity_exact_case():
    # strength-2 well, psi(0)=0 channel: no bound states and
    # (2/pi) Int k (atan(1/k) - 1/k) dk = -1/2 = V(0)/4 exactly
    sweep = ChannelSweep(sech2(2.0), ANTISYM)
    rep = buslaev_faddeev(sech2(2.0), 1, sweep=sweep)
    assert rep["rhs"] == pytest.approx(-0.5)
    assert abs(rep["residual"]) < 1e-4


def test_trace_identity_order2_exact_case():
    # same well: the order-2 identity closes with V''(0) = 2 s
    sweep = ChannelSweep(sech2(2.0), ANTISYM)
    rep = buslaev_faddeev(sech2(2.0), 2, sweep=sweep)
    assert rep["rhs"] == pytest.approx(0.5)  # (2 V0^2 - V''(0))/8 = (8-4)/8
    assert abs(rep["residual"]) < 1e-3


def test_trace_identities_gaussian(sweep_g3_anti):
    pot = gaussian_well(3.0, 1.0)
    rep1 = buslaev_faddeev(pot, 1, sweep=sweep_g3_anti)
    scale1 = max(abs(rep1["rhs"]), sum(k**2 for k in sweep_g3_anti.bound.kappas))
    assert abs(rep1["residual"]) < 1e-3 * scale1
    rep2 = buslaev_faddeev(pot, 2, sweep=sweep_g3_anti)
    scale2 = max(abs(rep2["rhs"]), 1.0)
    assert abs(rep2["residual"]) < 1e-3 * scale2


def test_trace_identity_with_odd_origin_slope():
    # exponential well has V'(0) != 0, exercising the order-2 boundary term
    pot = exponential_well(2.0, 1.0)
    sweep = ChannelSweep(pot, ANTISYM)
    rep = buslaev_faddeev(pot, 2, sweep=sweep)
    scale = max(abs(rep["rhs"]), 1.0)
    assert abs(rep["residual"]) < 2e-3 * scale


def test_trace_identity_order_guard():
    with pytest.raises(ValueError):
        buslaev_faddeev(sech2(5.0), 3)


# -- misc -----------------------------------------------------------------------


def test_report_serialization(sweep_s5_anti):
    rep = verify(sech2(5.0), ANTISYM, 1, 1, sweep=sweep_s5_anti)
    doc = rep.to_json_dict()
    assert doc["channel"] == "antisymmetric"
    assert doc["n"] == 1 and doc["m"] == 1


def test_radial_channel_sum_rule():
    pot = sech2(12.0, geometry=HALF_LINE)
    sweep = ChannelSweep(pot, partial_wave(0))
    rep = verify(pot, partial_wave(0), 1, 1, sweep=sweep)
    assert rep.rhs_spectral == pytest.approx(4.0, rel=1e-8)  # kappa = 2
    assert abs(rep.residual) < 1e-3 * max(abs(rep.lhs), 1.0)
