import math

import numpy as np
import pytest

from conedelta import circle, effective, report


@pytest.fixture(scope="module")
def c():
    return effective.model_constants()


def test_choose_rho(c):
    rho = effective.choose_rho()
    assert 0 < rho < c.xi0
    R = np.linspace(0.01, rho, 500)
    assert np.all(effective.potential(R) > -0.25)
    assert effective.choose_rho() == rho


def test_build_problem():
    p = effective.build_problem(math.pi / 4)
    assert p.h == pytest.approx(1.0) and p.scale == pytest.approx(1.0)
    assert p.ess_threshold == pytest.approx(-0.25)
    p = effective.build_problem(0.1)
    assert p.h == pytest.approx(0.10033467208545055)
    assert p.hbar == pytest.approx(p.h * math.sqrt(1 + math.sqrt(p.h)))
    assert p.hbar > p.h and 0.5 < p.scale < 1
    assert -0.5 < p.ess_threshold < 0
    for bad in (0.0, math.pi / 2, -0.1):
        with pytest.raises(ValueError):
            effective.build_problem(bad)


def test_ess_threshold():
    assert effective.ess_threshold(0.3) == pytest.approx(-1 / (2 * 1.09))


def test_bounds_near_harmonic(c):
    pred = effective.eigen_bounds(effective.from_h(0.01, n_max=1), 1)[0]
    assert abs(pred.upper - pred.lower) <= 0.01
    assert pred.harmonic == pytest.approx(-2 * c.a0 + 2 * c.a1 * 0.01)
    assert abs(pred.upper - pred.harmonic) < 1e-3
    assert pred.cone_upper == pytest.approx(pred.upper * (1 + 0.01**2) / 2)


def test_gap_shrinks():
    gaps = [abs(effective.eigen_bounds(effective.from_h(h, n_max=1), 1)[0].gap) for h in (0.02, 0.01)]
    assert math.log(gaps[0] / gaps[1]) / math.log(2) >= 1


def test_sandwich_with_single_slack():
    rows = {h: effective.eigen_bounds(effective.from_h(h, n_max=5), 5) for h in (0.04, 0.02, 0.01)}
    preds = [p for v in rows.values() for p in v]
    # one constant covering both sides of the harmonic value across the run
    slack = max(max(p.harmonic - p.upper, p.lower - p.harmonic, 0.0) / p.h**1.5 for p in preds)
    assert slack < 5.0
    for p in preds:
        assert p.lower - slack * p.h**1.5 <= p.harmonic <= p.upper + slack * p.h**1.5 + 1e-15


def test_cone_harmonic_formula(c):
    p = effective.eigen_bounds(effective.build_problem(0.1, n_max=2), 2)
    assert p[0].cone_harmonic == pytest.approx(-0.27207, abs=5e-5)
    assert p[1].cone_harmonic == pytest.approx(-c.a0 + 3 * c.a1 * 0.1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cone_slope(c, n):
    # small apertures keep the -a0 theta^2 part of the scale factor out of the slope
    thetas = [0.004, 0.002, 0.001]
    vals = [effective.eigen_bounds(effective.build_problem(t, n_max=3), 3)[n - 1].cone_upper for t in thetas]
    fit = report.linear_fit(list(zip(thetas, vals)))
    assert fit.slope == pytest.approx(c.a1 * (2 * n - 1), rel=0.05)
    assert fit.intercept == pytest.approx(-c.a0, abs=1e-3)


def test_increasing_in_theta():
    vals = [effective.eigen_bounds(effective.build_problem(t, n_max=1), 1)[0].cone_upper
            for t in (0.02, 0.05, 0.1, 0.2)]
    assert np.all(np.diff(vals) > 0)


def test_counting_monotone_in_threshold():
    p = effective.from_h(0.02)
    n1, w1 = effective.counting_Q(p, 1.0, 1.0)
    n2, w2 = effective.counting_Q(p, 1.0, 1.2)
    assert n2 >= n1
    assert w1 == pytest.approx(15.565, abs=1e-3)


def test_counting_validation():
    p = effective.from_h(0.02)
    with pytest.raises(ValueError):
        effective.counting_Q(p, 1.0, 1.6)
    with pytest.raises(ValueError):
        effective.counting_Q(p, -1.0, 1.0)
    with pytest.raises(ValueError):
        effective.count_reduced(0.02, 1.0, 2.0)
    assert effective.count_reduced(0.02, 1.0, 1.7)[0] >= 0


def test_counting_cone():
    n, w = effective.counting_cone(0.01, 1.0, 1.0)
    assert n > 0 and w == pytest.approx(36.647, abs=1e-3)


def test_potential_v_check():
    chk = effective.potential_v_check()
    assert chk.ok and chk.decreasing
    assert abs(chk.v[0]) < 1e-3
    assert chk.sup_abs_v < 5.0
