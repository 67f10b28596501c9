import json
import math

import numpy as np
import pytest
from scipy.integrate import quad

from sumrule_lab import potentials as P
from sumrule_lab.channels import ANTISYM, SYM
from sumrule_lab.errors import OutOfRange, SingularPotential


def test_evaluate_examples():
    assert P.evaluate(P.square_well(1.0, 1.0), 2.0) == 0.0
    assert P.evaluate(P.sech2(6.0), 0.0) == pytest.approx(-6.0, abs=1e-14)
    assert P.evaluate(P.gaussian_well(3.0, 1.0), 0.0) == pytest.approx(-3.0, abs=1e-14)


def test_evaluate_vectorized_and_continuous():
    pot = P.gaussian_well(5.0, 0.7)
    xs = np.linspace(0.0, pot.x_max, 400)
    vals = P.evaluate(pot, xs)
    assert vals.shape == xs.shape
    assert np.all(np.abs(np.diff(vals)) < 0.1)


def test_delta_is_data_only():
    pot = P.delta_function(2.0)
    with pytest.raises(SingularPotential):
        P.evaluate(pot, 0.5)
    with pytest.raises(SingularPotential):
        P.evaluator(pot)


def test_tabulated_out_of_range():
    xs = np.linspace(0.0, 4.0, 60)
    pot = P.tabulated(xs, -np.exp(-xs**2))
    with pytest.raises(OutOfRange):
        P.evaluate(pot, 5.0)


@pytest.mark.parametrize(
    "pot, faddeev",
    [
        (P.square_well(1.0, 1.0), 1.5),
        (P.sech2(6.0), 6.0 * (1.0 + math.log(2.0))),
        (P.gaussian_well(3.0, 1.0), 3.0 * (math.sqrt(math.pi) / 2 + 0.5)),
        (P.exponential_well(2.0, 1.5), 2.0 * (1.5 + 1.5**2)),
    ],
)
def test_moments_closed_forms(pot, faddeev):
    mom = P.moments(pot)
    assert mom.faddeev == pytest.approx(faddeev, rel=1e-12)
    # oracle: direct quadrature of the defining integrals
    f = P.evaluator(pot)
    ref, _ = quad(lambda x: (1 + x) * abs(f(x)), 0, pot.x_max, limit=300)
    assert mom.faddeev == pytest.approx(ref, rel=1e-9)
    ref_half, _ = quad(f, 0, pot.x_max, limit=300)
    assert mom.halfline_integral == pytest.approx(ref_half, rel=1e-9)
    for n in (1, 2, 3):
        ref_n, _ = quad(lambda x: abs(f(x)) ** n, 0, pot.x_max, limit=300)
        assert mom.power_integrals[n] == pytest.approx(ref_n, rel=1e-9)


def test_moments_delta():
    mom = P.moments(P.delta_function(2.0))
    assert mom.halfline_integral == -1.0
    assert mom.faddeev == 2.0
    assert mom.singular


def test_origin_values_against_spline_oracle():
    for pot in (P.gaussian_well(3.0), P.sech2(5.0), P.exponential_well(2.0, 0.5)):
        v0, vp0, vpp0 = P.origin_values(pot)
        f = P.evaluator(pot)
        h = 1e-4
        assert v0 == pytest.approx(float(f(0.0)), abs=1e-12)
        # one-sided stencils (potential only defined for x >= 0)
        fd1 = (-3 * f(0.0) + 4 * f(h) - f(2 * h)) / (2 * h)
        fd2 = (2 * f(0.0) - 5 * f(h) + 4 * f(2 * h) - f(3 * h)) / h**2
        assert vp0 == pytest.approx(float(fd1), abs=2e-4 * (1 + abs(vp0)))
        assert vpp0 == pytest.approx(float(fd2), abs=5e-3 * (1 + abs(vpp0)))


def test_power_integral_fractional():
    pot = P.sech2(20.0)
    # integral of sech^3 over the half line is pi/4
    assert P.power_integral(pot, 1.5) == pytest.approx(20.0**1.5 * math.pi / 4.0, rel=1e-12)


def test_faddeev_finite_for_all_families():
    for pot in (
        P.gaussian_well(10.0),
        P.square_well(4.0),
        P.sech2(12.0),
        P.exponential_well(3.0, 2.0),
    ):
        assert math.isfinite(P.moments(pot).faddeev)


def test_x_max_is_tail_cut():
    for pot in (P.gaussian_well(10.0), P.sech2(12.0), P.exponential_well(3.0, 2.0)):
        assert abs(P.evaluate(pot, pot.x_max)) <= 2e-12
        assert abs(P.evaluate(pot, 0.9 * pot.x_max)) > 1e-13


def test_json_round_trip():
    doc = {"family": "sech2", "params": {"strength": 6}, "geometry": "full_line_symmetric"}
    pot = P.PotentialSpec.from_json(json.dumps(doc))
    assert pot.params["strength"] == 6.0
    again = P.PotentialSpec.from_json_dict(pot.to_json_dict())
    assert again == pot


def test_json_aliases_and_tabulated():
    pot = P.PotentialSpec.from_json_dict(
        {"family": "gaussian_well", "params": {"V0": 3, "a": 2}}
    )
    assert pot.params == {"depth": 3.0, "width": 2.0}
    xs = np.linspace(0.0, 5.0, 40)
    doc = {"family": "tabulated", "grid": list(xs), "values": list(-np.exp(-xs))}
    pot = P.PotentialSpec.from_json_dict(doc)
    assert pot.x_max == 5.0


# -- closed-form reference records -------------------------------------------


def test_reference_delta():
    ref_s = P.closed_form_reference(P.delta_function(2.0), SYM)
    assert float(ref_s.phase(1.0)) == pytest.approx(math.pi / 4)
    assert complex(ref_s.jost(1.0)) == pytest.approx(1j + 1.0)
    assert ref_s.bound_kappas == (1.0,)
    ref_a = P.closed_form_reference(P.delta_function(2.0), ANTISYM)
    assert float(ref_a.phase(3.0)) == 0.0
    assert ref_a.bound_kappas == ()


def test_reference_sech2_ell1():
    pot = P.sech2(2.0)
    ref = P.closed_form_reference(pot, ANTISYM)
    k = 1.7
    assert complex(ref.jost(k)) == pytest.approx(k / (k + 1j), rel=1e-14)
    assert float(ref.phase(k)) == pytest.approx(math.atan(1 / k), rel=1e-14)
    assert ref.half_bound
    ref_s = P.closed_form_reference(pot, SYM)
    assert complex(ref_s.jost(1.0)) == pytest.approx(1j * (1.0 - 1j), rel=1e-14)
    assert ref_s.bound_kappas == (1.0,)


def test_reference_sech2_jost_solves_the_wave_equation():
    # independent check that e^{ikx}(k + i tanh x)/(k + i) solves the
    # scattering equation for the strength-2 well, then F = value at 0
    k = 1.3
    f = lambda x: np.exp(1j * k * x) * (k + 1j * np.tanh(x)) / (k + 1j)
    h = 1e-4
    for x in (0.3, 1.1, 2.5):
        fpp = (f(x + h) - 2 * f(x) + f(x - h)) / h**2
        resid = -fpp + (-2.0 / np.cosh(x) ** 2) * f(x) - k**2 * f(x)
        assert abs(resid) < 1e-6
    ref = P.closed_form_reference(P.sech2(2.0), ANTISYM)
    assert complex(ref.jost(k)) == pytest.approx(f(0.0), rel=1e-12)


def test_reference_sech2_bound_sets_by_parity():
    for ell, sym_set, anti_set in [
        (1, (1.0,), ()),
        (2, (2.0,), (1.0,)),
        (3, (3.0, 1.0), (2.0,)),
        (4, (4.0, 2.0), (3.0, 1.0)),
    ]:
        pot = P.sech2_from_ell(ell)
        assert P.closed_form_reference(pot, SYM).bound_kappas == sym_set
        assert P.closed_form_reference(pot, ANTISYM).bound_kappas == anti_set


def test_reference_square_well_bound_states_match_transcendental():
    ref = P.closed_form_reference(P.square_well(4.0, 1.0), ANTISYM)
    (kap,) = ref.bound_kappas
    Kt = math.sqrt(4.0 - kap**2)
    assert Kt / math.tan(Kt) == pytest.approx(-kap, abs=1e-9)
    ref = P.closed_form_reference(P.square_well(4.0, 1.0), SYM)
    (kap,) = ref.bound_kappas
    Kt = math.sqrt(4.0 - kap**2)
    assert Kt * math.tan(Kt) == pytest.approx(kap, abs=1e-9)


def test_reference_absent_for_generic_families():
    assert P.closed_form_reference(P.gaussian_well(3.0), SYM) is None
    assert P.closed_form_reference(P.sech2(5.0), SYM) is None


def test_sech2_from_ell_squared_variant():
    assert P.sech2_from_ell(2).params["strength"] == 6.0
    assert P.sech2_from_ell(2, squared=True).params["strength"] == 18.0
