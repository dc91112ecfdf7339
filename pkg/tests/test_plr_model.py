import math

import numpy as np
import pytest
from scipy.optimize import brentq

from plrsim.errors import DomainError
from plrsim.plr import model as m


def test_moon_spencer_values():
    assert m.moon_spencer_diameter(10 ** 0.5) == pytest.approx(4.9, abs=1e-12)
    # 40-digit mpmath evaluations
    assert m.moon_spencer_diameter(1e-5) == pytest.approx(7.8272293901, abs=1e-9)
    assert abs(m.moon_spencer_diameter(1e-5) - 7.8272) < 1e-4
    assert abs(m.moon_spencer_diameter(1e5) - 2.0596) < 1e-4


@pytest.mark.parametrize("bad", [0.9e-5, 1.1e5, 0.0, -1.0])
def test_moon_spencer_domain(bad):
    with pytest.raises(DomainError):
        m.moon_spencer_diameter(bad)


def test_invert_moon_spencer():
    assert m.invert_moon_spencer(4.9) == pytest.approx(10 ** 0.5, rel=1e-14)
    assert m.invert_moon_spencer(7.8272) == pytest.approx(1e-5, rel=0.01)
    for D in (3.0, 5.0, 7.0):
        assert abs(m.moon_spencer_diameter(m.invert_moon_spencer(D)) - D) < 1e-9


@pytest.mark.parametrize("bad", [1.9, 7.9, 8.5, 1.0])
def test_invert_moon_spencer_domain(bad):
    with pytest.raises(DomainError):
        m.invert_moon_spencer(bad)


def test_latency():
    assert m.latency(1.0, 0.0) == 253.0
    assert m.latency(1.0, 0.4) == pytest.approx(281.0, abs=1e-12)
    # mpmath: 253 - 14 ln 10 + 28 - 11.6 ln 10 = 222.05382...
    assert m.latency(10.0, 0.4) == pytest.approx(222.06, abs=0.01)
    assert m.latency(10.0, 0.4) == pytest.approx(222.0538216193524, abs=1e-10)
    with pytest.raises(DomainError):
        m.latency(0.0, 0.4)
    with pytest.raises(DomainError):
        m.latency(1.0, -0.1)


def test_muscular_activity():
    assert m.muscular_activity(4.9) == 0.0
    assert m.muscular_activity(6.4) == pytest.approx(0.549306, abs=1e-6)
    assert m.muscular_activity(7.9 - 1e-12) > 10
    for bad in (7.9, 8.0, 1.9):
        with pytest.raises(DomainError):
            m.muscular_activity(bad)


@pytest.mark.parametrize("D", [3.0, 4.9, 7.0])
def test_activity_slope_matches_finite_difference(D):
    h = 1e-5
    fd = (m.muscular_activity(D + h) - m.muscular_activity(D - h)) / (2 * h)
    assert m.muscular_activity_slope(D) == pytest.approx(fd, rel=1e-6)


def _brentq_equilibrium(L):
    # independent root-finder on the same balance equation
    def f(D):
        phi = L * 1e-6 * math.pi * D * D / 4
        return 2.3026 * math.atanh((D - 4.9) / 3) - (5.2 - 0.45 * math.log(phi / 4.8118e-10))
    return brentq(f, 1.9 + 1e-12, 7.9 - 1e-12, xtol=1e-14)


@pytest.mark.parametrize("L", [1e-5, 1e-3, 10 ** -0.5, 1.0, 10 ** 0.5, 10 ** 1.1, 1e3, 1e5])
def test_equilibrium_matches_independent_solver(L):
    assert m.equilibrium_raw_diameter(L) == pytest.approx(_brentq_equilibrium(L), abs=1e-9)
    coarse = m.equilibrium_raw_diameter(L, tol=1e-6)
    assert abs(coarse - _brentq_equilibrium(L)) <= 1e-6


@pytest.mark.parametrize("L, reference", [(1e-5, 7.8272), (10 ** 0.5, 4.9), (1e5, 2.0596)])
def test_equilibrium_close_to_moon_spencer_at_reference_points(L, reference):
    D = m.equilibrium_raw_diameter(L)
    assert abs(D - reference) / reference < 0.02


def test_equilibrium_strictly_decreasing():
    Ds = [m.equilibrium_raw_diameter(L) for L in np.logspace(-5, 5, 100)]
    assert all(b < a for a, b in zip(Ds, Ds[1:]))
    assert all(1.9 < D < 7.9 for D in Ds)


def test_equilibrium_domain():
    with pytest.raises(DomainError):
        m.equilibrium_raw_diameter(2e5)


def test_rate_zero_at_equilibrium():
    L = 10 ** 1.1
    D = m.equilibrium_raw_diameter(L, tol=1e-13)
    phi = L * 1e-6 * math.pi * D * D / 4
    assert abs(m.diameter_rate(D, phi)) < 1e-10
    # more light than the balance flux drives constriction
    assert m.diameter_rate(D, 2 * phi) < 0
    assert m.diameter_rate(D, 0.5 * phi) > 0
