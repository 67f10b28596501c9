import math

import numpy as np
import pytest

from sumrule_lab import wkb
from sumrule_lab.errors import PositivePotential
from sumrule_lab.potentials import gaussian_well, sech2, square_well, tabulated


def test_coefficient_identity_exact():
    # moment prefactor == phase-space prefactor, n = 0..4
    for n in range(5):
        assert wkb._moment_coefficient(n) == pytest.approx(
            wkb.phase_space_coefficient(n), rel=1e-14
        )
    assert wkb._moment_coefficient(0) == pytest.approx(2 / math.pi, rel=1e-14)
    assert wkb._moment_coefficient(1) == pytest.approx(4 / (3 * math.pi), rel=1e-14)


def test_phase_free_and_square_well():
    assert wkb.wkb_phase(gaussian_well(0.0, 1.0), 1.0) == pytest.approx(0.0, abs=1e-12)
    # constant integrand on [0, 1]: sqrt(k^2 + V0) - k
    assert wkb.wkb_phase(square_well(4.0, 1.0), 1.0) == pytest.approx(
        math.sqrt(5.0) - 1.0, rel=1e-10
    )


def test_phase_close_to_exact_at_strong_coupling():
    from sumrule_lab.jost1d import phase_shift
    from sumrule_lab.channels import SYM

    pot = sech2(20.0)
    approx = wkb.wkb_phase(pot, 2.0)
    exact = phase_shift(pot, 2.0, SYM)
    assert abs(approx - exact) / exact < 0.02


def test_positive_potential_rejected():
    xs = np.linspace(0.0, 3.0, 50)
    bump = tabulated(xs, np.exp(-xs) * 0.5)
    with pytest.raises(PositivePotential):
        wkb.wkb_phase(bump, 1.0)


def test_moment_l4_closed_form():
    pot = sech2(20.0)
    assert wkb.wkb_moment(pot, 1) == pytest.approx(20.0**1.5 / 3.0, rel=1e-12)
    # Levinson estimate: (2/pi) Int sqrt(U) = sqrt(20)
    assert wkb.wkb_moment(pot, 0) == pytest.approx(math.sqrt(20.0), rel=1e-12)


def test_semiclassical_check_equality():
    for pot, n in [(gaussian_well(10.0, 1.0), 1), (gaussian_well(10.0, 1.0), 2), (sech2(5.0), 1)]:
        ps, wm = wkb.semiclassical_check(pot, n)
        assert ps == pytest.approx(wm, rel=1e-8)
    ps, wm = wkb.semiclassical_check(gaussian_well(0.0, 1.0), 1)
    assert ps == 0.0 and wm == 0.0


def test_estimate_l4_n1():
    est = wkb.wkb_estimate(sech2(20.0), 1)
    assert est.exact == pytest.approx(30.0, abs=1e-6)
    rel_exact = (20.0**1.5 / 3.0 - 30.0) / (20.0**1.5 / 3.0 + 30.0)
    assert est.relative_error == pytest.approx(rel_exact, abs=1e-6)
    assert abs(est.relative_error) == pytest.approx(3.1e-3, abs=1e-4)


def test_figure1_rows_and_trend():
    rows = wkb.figure1_data(n_list=(1,), l_range=range(1, 5))
    assert len(rows) == 4
    errs = {r["l"]: abs(r["relative_error"]) for r in rows}
    assert errs[4] < errs[1]
    csv = wkb.figure1_csv(rows)
    assert csv.splitlines()[0] == "l,n,wkb,exact,relative_error"
    assert len(csv.splitlines()) == 5
