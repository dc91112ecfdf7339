import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plrsim.errors import DomainError
from plrsim.plr import isocurves as iso
from plrsim.plr.model import equilibrium_raw_diameter

diameters = st.floats(min_value=1.95, max_value=7.85)
indices = st.floats(min_value=0.0, max_value=1.0)


def power_sum(coeffs, x):
    n = len(coeffs) - 1
    return sum(c * x ** (n - i) for i, c in enumerate(coeffs))


def test_top_curve_coefficient_sum():
    assert iso.horner(iso.TOP_COEFFS, 1.0) == pytest.approx(3.700, abs=1e-3)


def test_curves_at_4_9_match_exact_rational_evaluation():
    # exact Fraction arithmetic on the printed coefficients
    assert iso.isocurve_top(4.9) == pytest.approx(6.49875583, abs=1e-9)
    assert iso.isocurve_bottom(4.9) == pytest.approx(-14586.64386888, abs=1e-9)
    assert iso.isocurve_top(4.9) == pytest.approx(np.polyval(iso.TOP_COEFFS, 4.9), abs=1e-9)


def test_coefficient_order_matters():
    assert iso.horner(iso.TOP_COEFFS[::-1], 4.9) != pytest.approx(iso.isocurve_top(4.9))
    assert iso.horner(iso.BOTTOM_COEFFS[::-1], 4.9) != pytest.approx(iso.isocurve_bottom(4.9))


def test_curves_domain():
    for f in (iso.isocurve_top, iso.isocurve_bottom):
        with pytest.raises(DomainError):
            f(1.0)


@given(diameters)
def test_horner_matches_power_sum(D):
    for coeffs in (iso.TOP_COEFFS, iso.BOTTOM_COEFFS):
        assert iso.horner(coeffs, D) == pytest.approx(power_sum(coeffs, D), rel=1e-9, abs=1e-9)


def test_apply_individuality_endpoints():
    D = 5.3
    assert iso.apply_individuality(D, 0.0) == iso.isocurve_bottom(D)
    # bottom is ~ -2e4 here, so cancellation costs a few 1e-12 mm
    assert iso.apply_individuality(D, 1.0) == pytest.approx(iso.isocurve_top(D), abs=1e-9)
    mid = 0.5 * (iso.isocurve_top(D) + iso.isocurve_bottom(D))
    assert iso.apply_individuality(D, 0.5) == pytest.approx(mid, rel=1e-14)
    with pytest.raises(DomainError):
        iso.apply_individuality(D, 1.01)


@given(diameters, indices, indices)
def test_apply_individuality_monotone_in_index(D, r1, r2):
    if iso.isocurve_top(D) > iso.isocurve_bottom(D) and r1 < r2:
        assert iso.apply_individuality(D, r1) <= iso.apply_individuality(D, r2)


def test_estimate_r_index_bottom_is_zero():
    L = 10 ** 1.1
    D = equilibrium_raw_diameter(L)
    assert iso.estimate_r_index([(L, iso.isocurve_bottom(D))]) == 0.0


@pytest.mark.parametrize("r", [0.03, 0.4, 0.92])
def test_estimate_r_index_round_trip(r):
    samples = [(L, iso.apply_individuality(equilibrium_raw_diameter(L), r))
               for L in (10 ** 1.1, 10 ** -0.5)]
    assert iso.estimate_r_index(samples) == pytest.approx(r, abs=1e-6)


@given(indices)
def test_estimate_inverts_apply(r):
    L = 10 ** 0.2
    D = iso.apply_individuality(equilibrium_raw_diameter(L), r)
    assert abs(iso.estimate_r_index([(L, D)]) - r) <= 1e-6


def test_estimate_clamps_and_averages():
    L = 10 ** 1.1
    D = equilibrium_raw_diameter(L)
    above = iso.isocurve_top(D) + 1.0
    below = iso.isocurve_bottom(D) - 1.0
    assert iso.estimate_r_index([(L, above)]) == 1.0
    assert iso.estimate_r_index([(L, above), (L, below)]) == 0.5


def test_estimate_errors():
    with pytest.raises(ValueError):
        iso.estimate_r_index([])
    with pytest.raises(DomainError):
        iso.estimate_r_index([(1e6, 4.0)])


def test_estimate_degenerate_envelope(monkeypatch):
    monkeypatch.setattr(iso, "BOTTOM_COEFFS", iso.TOP_COEFFS)
    with pytest.raises(ArithmeticError):
        iso.estimate_r_index([(1.0, 5.0)])


def test_envelope_ordering_range_reported():
    lo, hi = iso.envelope_ordering_range()
    # with the printed bottom coefficients the ordering holds everywhere
    assert lo == pytest.approx(1.901) and hi == pytest.approx(7.899)
