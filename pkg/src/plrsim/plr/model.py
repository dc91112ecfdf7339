"""Static pupil model: Moon-Spencer curve, latency, and the equilibrium solver.

The equilibrium equation balances scaled muscular activity against the log of
retinal flux relative to the response threshold::

    2.3026 * M(D) = 5.2 - 0.45 * ln(phi(D) / PHI_THRESHOLD)

where M(D) = atanh((D - 4.9) / 3) and phi(D) is the flux through a pupil of
diameter D. Diameters are in mm, luminance in blondels, times in ms.
"""

import math

from .. import photometry
from ..errors import DomainError

LUMINANCE_MIN = 1e-5
LUMINANCE_MAX = 1e5

DIAMETER_MIN = 1.9
DIAMETER_MAX = 7.9

# flux through the Moon-Spencer pupil at 1e-5 B
PHI_THRESHOLD = 4.8118e-10

LN10 = 2.3026
FLUX_GAIN = 0.45
ACTIVITY_OFFSET = 5.2

_REL_EPS = 1e-12


def check_luminance(L):
    if not (LUMINANCE_MIN * (1 - _REL_EPS) <= L <= LUMINANCE_MAX * (1 + _REL_EPS)):
        raise DomainError(
            f"luminance {L} B outside [{LUMINANCE_MIN}, {LUMINANCE_MAX}]")


def check_diameter(D):
    if not (DIAMETER_MIN < D < DIAMETER_MAX):
        raise DomainError(
            f"diameter {D} mm outside ({DIAMETER_MIN}, {DIAMETER_MAX})")


def moon_spencer_diameter(L):
    """Average-subject equilibrium pupil diameter (mm) at `L` blondels."""
    check_luminance(L)
    return 4.9 - 3.0 * math.tanh(0.4 * (math.log10(L) - 0.5))


def invert_moon_spencer(D):
    """Luminance (blondels) at which the Moon-Spencer pupil has diameter `D`."""
    check_diameter(D)
    return 10.0 ** (0.5 + math.atanh((4.9 - D) / 3.0) / 0.4)


def latency(L_fl, R):
    """Pupillary latency in ms.

    Parameters
    ----------
    L_fl : float
        Stimulus luminance in foot-Lamberts.
    R : float
        Stimulus frequency in Hz.
    """
    if not L_fl > 0:
        raise DomainError(f"luminance must be positive, got {L_fl}")
    if not R >= 0:
        raise DomainError(f"frequency must be non-negative, got {R}")
    lnL = math.log(L_fl)
    return 253.0 - 14.0 * lnL + 70.0 * R - 29.0 * R * lnL


def muscular_activity(D):
    """M(D) = atanh((D - 4.9) / 3); diverges at the ends of (1.9, 7.9)."""
    check_diameter(D)
    return math.atanh((D - 4.9) / 3.0)


def muscular_activity_slope(D):
    """Analytic dM/dD = 3 / (9 - (D - 4.9)**2)."""
    check_diameter(D)
    return 3.0 / (9.0 - (D - 4.9) ** 2)


def activity_target(flux):
    """Right-hand side 5.2 - 0.45 ln(flux / threshold)."""
    return ACTIVITY_OFFSET - FLUX_GAIN * math.log(flux / PHI_THRESHOLD)


def equilibrium_residual(D, L):
    """LHS minus RHS of the equilibrium equation; increasing in D."""
    flux = photometry.retinal_flux(photometry.blondels_to_illuminance(L), D)
    return LN10 * muscular_activity(D) - activity_target(flux)


def equilibrium_raw_diameter(L, tol=1e-10):
    """Solve the equilibrium equation for the pupil diameter by bisection.

    The residual is strictly increasing in D (atanh grows, the flux term
    shrinks), so the root in (1.9, 7.9) is unique.

    Parameters
    ----------
    L : float
        Luminance in blondels, within [1e-5, 1e5].
    tol : float
        Bracket width at which bisection stops (mm).
    """
    check_luminance(L)
    lo = DIAMETER_MIN + 1e-9
    hi = DIAMETER_MAX - 1e-9
    f_lo = equilibrium_residual(lo, L)
    f_hi = equilibrium_residual(hi, L)
    if not (f_lo < 0 < f_hi):
        raise RuntimeError(f"equilibrium root not bracketed at L={L}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = equilibrium_residual(mid, L)
        if f_mid == 0.0:
            return mid
        if f_mid < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def diameter_rate(D, delayed_flux):
    """Tentative dD/dt for raw diameter `D` driven by the delayed flux.

    This is the equilibrium balance with the time derivative restored:
    ``(target - 2.3026 M(D)) / (2.3026 dM/dD)``. The result is in mm per unit
    of scaled simulation time (see :func:`plrsim.plr.dynamics.simulate`).
    """
    return ((activity_target(delayed_flux) - LN10 * muscular_activity(D))
            / (LN10 * muscular_activity_slope(D)))
