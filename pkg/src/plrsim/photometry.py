"""Photometric unit conversions used by the pupil model.

All quantities are plain floats (double precision). Luminance is carried in
blondels throughout the model; the latency formula wants foot-Lamberts, and
retinal flux is illuminance (lumens/mm^2) times pupil area (mm^2).

A blondel (apostilb) is (1/pi) cd/m^2 and a foot-Lambert is (1/pi) cd/ft^2,
so 1 fL = 10.764 B. For a lossless Lambertian screen 1 B = 1e-6 lm/mm^2.
"""

import math
from dataclasses import dataclass

from .errors import DomainError

BLONDELS_PER_FOOT_LAMBERT = 10.764
LUMENS_PER_MM2_PER_BLONDEL = 1e-6
LUMENS_PER_MM2_PER_LUX = 1e-6


@dataclass(frozen=True)
class Luminance:
    """Luminance in blondels."""

    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise DomainError(f"luminance must be positive, got {self.value}")


@dataclass(frozen=True)
class LuminanceFootLambert:
    """Luminance in foot-Lamberts."""

    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise DomainError(f"luminance must be positive, got {self.value}")


@dataclass(frozen=True)
class Illuminance:
    """Illuminance in lumens per square millimetre."""

    value: float

    def __post_init__(self):
        if not self.value >= 0:
            raise DomainError(f"illuminance must be non-negative, got {self.value}")


@dataclass(frozen=True)
class LuminousFlux:
    """Luminous flux in lumens."""

    value: float

    def __post_init__(self):
        if not self.value >= 0:
            raise DomainError(f"flux must be non-negative, got {self.value}")


def _raw(x):
    return x.value if hasattr(x, "value") else float(x)


def blondels_to_illuminance(luminance):
    """Illuminance (lm/mm^2) produced by a Lambertian screen of `luminance` blondels."""
    L = _raw(luminance)
    if not L > 0:
        raise DomainError(f"luminance must be positive, got {L}")
    return L * LUMENS_PER_MM2_PER_BLONDEL


def illuminance_to_blondels(illuminance):
    """Inverse of :func:`blondels_to_illuminance`."""
    E = _raw(illuminance)
    if not E > 0:
        raise DomainError(f"illuminance must be positive, got {E}")
    return E / LUMENS_PER_MM2_PER_BLONDEL


def retinal_flux(illuminance, diameter):
    """Light flux entering a circular pupil.

    Parameters
    ----------
    illuminance : float or Illuminance
        Lumens per mm^2 at the eye.
    diameter : float
        Pupil diameter in mm.

    Returns
    -------
    float
        Flux in lumens, ``illuminance * pi * (diameter / 2)**2``.
    """
    E = _raw(illuminance)
    if E < 0:
        raise DomainError(f"illuminance must be non-negative, got {E}")
    if not diameter >= 0:
        raise DomainError(f"pupil diameter must be non-negative, got {diameter}")
    return E * math.pi * (diameter / 2.0) ** 2


def blondels_to_foot_lamberts(luminance):
    L = _raw(luminance)
    if not L > 0:
        raise DomainError(f"luminance must be positive, got {L}")
    return L / BLONDELS_PER_FOOT_LAMBERT


def foot_lamberts_to_blondels(luminance):
    L = _raw(luminance)
    if not L > 0:
        raise DomainError(f"luminance must be positive, got {L}")
    return L * BLONDELS_PER_FOOT_LAMBERT


def lux_to_illuminance(lux):
    """Lux (lm/m^2) to lm/mm^2."""
    v = _raw(lux)
    if not v >= 0:
        raise DomainError(f"lux must be non-negative, got {v}")
    return v * LUMENS_PER_MM2_PER_LUX
