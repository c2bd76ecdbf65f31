import math
import time

import pytest

from conedelta import constants, specfun

PUBLISHED = {"A": 1.0750, "a0": 0.2845, "a1": 0.1241, "xi0": 1.4252}


@pytest.fixture(scope="module")
def c():
    return constants.solve_model_constants()


def test_published_values(c):
    for k, v in PUBLISHED.items():
        assert abs(getattr(c, k) - v) <= 5e-4


def test_frozen_digits(c):
    # regression values from the converged solve
    assert c.A == pytest.approx(1.0750267725697544, rel=1e-13)
    assert c.a0 == pytest.approx(0.284475687096501, rel=1e-13)
    assert c.a1 == pytest.approx(0.12408626111029544, rel=1e-12)
    assert c.xi0 == pytest.approx(1.4252193324987237, rel=1e-13)


def test_a_is_a_maximum(c):
    F, F1, F2 = specfun.f_and_derivatives(c.A)
    assert abs(F1) <= 1e-12 and F2 < 0
    assert c.residual <= 1e-12
    assert F == pytest.approx(math.sqrt(c.a0), rel=1e-14)


def test_algebraic_relations(c):
    assert c.xi0 == pytest.approx(c.A / math.sqrt(2 * c.a0), rel=1e-14)
    assert c.a1 == pytest.approx(c.a0 * math.sqrt(1 / (2 * c.A**2) + 1 / (2 * c.a0) - 2), rel=1e-14)


def test_runtime():
    t0 = time.perf_counter()
    constants.solve_model_constants()
    assert time.perf_counter() - t0 < 0.1


def test_curvature_identity(c):
    loc, val, curv = constants.curvature_identity(math.sqrt(2), c)
    assert loc == pytest.approx(c.xi0)
    assert val == pytest.approx(-2 * c.a0)
    assert curv == pytest.approx(8 * c.a1**2)
    with pytest.raises(ValueError):
        constants.curvature_identity(0.0)


def test_as_dict(c):
    assert list(c.as_dict()) == ["A", "a0", "a1", "xi0", "residual"]
