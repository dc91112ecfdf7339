"""Individual variability via top/bottom isocurves of pupil diameter.

Each subject carries an index r in [0, 1] that interpolates between the
bottom envelope C_bD and the top envelope C_tD, both expressed as degree-5
polynomials of the raw (average-subject) diameter.
"""

import math

from ..errors import DomainError
from .model import check_diameter, equilibrium_raw_diameter

# highest degree first
TOP_COEFFS = (-0.013, 0.322, -3.096, 13.655, -25.347, 18.179)
BOTTOM_COEFFS = (-5.442, 1.387, -1.343, 6.219, -1.317, 1.219)

DEGENERATE_SPAN = 1e-9


def horner(coeffs, x):
    """Evaluate a polynomial given highest-degree-first coefficients."""
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


def isocurve_top(D):
    check_diameter(D)
    return horner(TOP_COEFFS, D)


def isocurve_bottom(D):
    check_diameter(D)
    return horner(BOTTOM_COEFFS, D)


def _check_index(r):
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"r_index must lie in [0, 1], got {r}")


def apply_individuality(D_raw, r_index):
    """Final diameter ``C_bD(D) + (C_tD(D) - C_bD(D)) * r_index``."""
    _check_index(r_index)
    bottom = isocurve_bottom(D_raw)
    top = isocurve_top(D_raw)
    return bottom + (top - bottom) * r_index


def estimate_r_index(samples):
    """Recover a subject's index from equilibrium observations.

    Parameters
    ----------
    samples : iterable of (float, float)
        ``(luminance_blondels, observed_diameter_mm)`` pairs, typically one
        for the light-on state and one for light-off.

    Returns
    -------
    float
        Mean of the per-sample indices, each clamped to [0, 1].
    """
    samples = list(samples)
    if not samples:
        raise ValueError("estimate_r_index needs at least one sample")
    total = 0.0
    for L, D_obs in samples:
        # observations are not range-checked: with these envelope
        # coefficients, synthetic finals for r < 1 fall far below 1.9 mm
        if not math.isfinite(D_obs):
            raise DomainError(f"observed diameter must be finite, got {D_obs}")
        D_raw = equilibrium_raw_diameter(L)
        bottom = isocurve_bottom(D_raw)
        span = isocurve_top(D_raw) - bottom
        if abs(span) <= DEGENERATE_SPAN:
            raise ArithmeticError(
                f"degenerate isocurve envelope at D={D_raw:.6f} mm")
        total += min(1.0, max(0.0, (D_obs - bottom) / span))
    return total / len(samples)


def envelope_ordering_range(lo=1.901, hi=7.899, n=601):
    """Sub-range of raw diameters where C_bD < C_tD holds on a uniform grid.

    Returns ``(first, last)`` grid points of the ordered region, or None when
    the ordering fails everywhere. Only the contiguous run containing the
    first ordered point is reported.
    """
    step = (hi - lo) / (n - 1)
    first = last = None
    for i in range(n):
        D = lo + i * step
        ok = isocurve_bottom(D) < isocurve_top(D)
        if ok and first is None:
            first = D
        if ok and first is not None:
            last = D
        if not ok and first is not None:
            break
    return None if first is None else (first, last)
