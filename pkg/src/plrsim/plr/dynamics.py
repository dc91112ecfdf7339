"""Time-stepping of the delayed pupil light reflex.

Each frame advances from the previous time T_p to T_c = T_p + frame_interval.
The diameter moves with an explicit Euler step whose size is frame-scaled:
``(T_c - T_p) / S`` while constricting and a third of that while dilating.
The driving flux is read from a history buffer ``latency`` ms in the past.
"""

import bisect
import logging
import math
from dataclasses import dataclass

import numpy as np

from .. import photometry
from ..errors import DomainError
from ..traceio import SimTrace
from .hippus import hippus_perturbation
from .isocurves import apply_individuality
from .model import (
    LUMINANCE_MAX,
    LUMINANCE_MIN,
    PHI_THRESHOLD,
    check_luminance,
    diameter_rate,
    equilibrium_raw_diameter,
    latency,
)

logger = logging.getLogger(__name__)

# keeps atanh finite
CLAMP_LO = 1.901
CLAMP_HI = 7.899

DILATION_SLOWDOWN = 3.0


@dataclass(frozen=True)
class SubjectProfile:
    """Per-individual reflex parameters.

    ``velocity_constant`` (S) divides the frame interval to get the
    integration step; larger values give a slower pupil.
    ``stimulus_frequency`` (R, Hz) enters the latency formula.
    """

    r_index: float
    velocity_constant: float = 600.0
    stimulus_frequency: float = 0.4

    def __post_init__(self):
        if not 0.0 <= self.r_index <= 1.0:
            raise DomainError(f"r_index must lie in [0, 1], got {self.r_index}")
        if not self.velocity_constant > 0:
            raise DomainError("velocity_constant must be positive")
        if not self.stimulus_frequency >= 0:
            raise DomainError("stimulus_frequency must be non-negative")


@dataclass(frozen=True)
class LightSchedule:
    """Piecewise-constant luminance: ``segments`` of (start_ms, blondels)."""

    segments: tuple

    def __post_init__(self):
        segs = tuple((float(t), float(L)) for t, L in self.segments)
        if not segs:
            raise ValueError("light schedule is empty")
        if segs[0][0] != 0.0:
            raise ValueError("first schedule entry must start at t = 0")
        for (t0, _), (t1, _) in zip(segs, segs[1:]):
            if not t1 > t0:
                raise ValueError("schedule start times must be strictly increasing")
        for _, L in segs:
            check_luminance(L)
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "_starts", [t for t, _ in segs])

    @classmethod
    def constant(cls, luminance):
        return cls(((0.0, luminance),))

    def luminance_at(self, t_ms):
        i = bisect.bisect_right(self._starts, t_ms) - 1
        return self.segments[max(i, 0)][1]


class FluxHistory:
    """Time-indexed retinal flux with delayed lookup.

    Lookups use the most recent sample at or before the query time (the
    flux is held constant between frames); queries earlier than the first
    sample return the first sample. When `horizon_ms` is set, samples older
    than that window are dropped, keeping one sample at the window edge.
    """

    def __init__(self, threshold_flux=PHI_THRESHOLD, horizon_ms=None):
        if not threshold_flux > 0:
            raise ValueError("threshold flux must be positive")
        self.threshold_flux = threshold_flux
        self.horizon_ms = horizon_ms
        self._times = []
        self._fluxes = []

    def __len__(self):
        return len(self._times)

    def append(self, t_ms, flux):
        if self._times and not t_ms > self._times[-1]:
            raise ValueError("flux history timestamps must be strictly increasing")
        if not flux > 0:
            raise ValueError(f"flux must be positive, got {flux}")
        self._times.append(t_ms)
        self._fluxes.append(flux)
        if self.horizon_ms is not None:
            cut = bisect.bisect_right(self._times, t_ms - self.horizon_ms) - 1
            if cut > 0:
                del self._times[:cut]
                del self._fluxes[:cut]

    def at(self, t_ms):
        if not self._times:
            raise LookupError("flux history is empty")
        i = bisect.bisect_right(self._times, t_ms) - 1
        return self._fluxes[max(i, 0)]

    @property
    def start(self):
        return self._times[0]


def _flux(L, D):
    return photometry.retinal_flux(photometry.blondels_to_illuminance(L), D)


def simulate(schedule, profile, frame_interval=33.3, duration=10_000.0,
             hippus=None):
    """Integrate the delayed reflex over a light schedule.

    Parameters
    ----------
    schedule : LightSchedule
    profile : SubjectProfile
    frame_interval : float
        Wall-clock spacing of frames in ms.
    duration : float
        Simulated span in ms; frames are emitted at ``k * frame_interval``
        for every k with that time inside ``[0, duration]``.
    hippus : HippusGenerator, optional
        When given, its perturbation is added to the scheduled luminance.

    Returns
    -------
    SimTrace
        One row per frame, starting with the adapted state at t = 0.
    """
    if not frame_interval > 0:
        raise ValueError("frame_interval must be positive")
    if not duration > 0:
        raise ValueError("duration must be positive")

    clamped = 0

    def effective_luminance(t):
        nonlocal clamped
        L = schedule.luminance_at(t)
        if hippus is not None:
            L += hippus_perturbation(hippus, t)
            if L < LUMINANCE_MIN or L > LUMINANCE_MAX:
                clamped += 1
                logger.debug("luminance %.4g B clamped at t=%.1f ms", L, t)
                L = min(max(L, LUMINANCE_MIN), LUMINANCE_MAX)
        return L

    S = profile.velocity_constant
    R = profile.stimulus_frequency
    r = profile.r_index

    n_frames = int(math.floor(duration / frame_interval + 1e-9)) + 1
    times = np.empty(n_frames)
    lums = np.empty(n_frames)
    fluxes = np.empty(n_frames)
    raw = np.empty(n_frames)
    final = np.empty(n_frames)

    # adapted to the first scheduled luminance since forever
    D = equilibrium_raw_diameter(schedule.segments[0][1], tol=1e-13)
    L = effective_luminance(0.0)
    history = FluxHistory()
    phi = _flux(L, D)
    history.append(0.0, phi)
    times[0], lums[0], fluxes[0], raw[0] = 0.0, L, phi, D
    final[0] = apply_individuality(D, r)

    t_prev = 0.0
    for k in range(1, n_frames):
        t_cur = k * frame_interval
        L = effective_luminance(t_cur)
        tau = latency(photometry.blondels_to_foot_lamberts(L), R)
        rate = diameter_rate(D, history.at(t_cur - tau))
        step = (t_cur - t_prev) / S
        if rate >= 0:
            step /= DILATION_SLOWDOWN
        D = min(max(D + step * rate, CLAMP_LO), CLAMP_HI)
        phi = _flux(L, D)
        history.append(t_cur, phi)
        times[k], lums[k], fluxes[k], raw[k] = t_cur, L, phi, D
        final[k] = apply_individuality(D, r)
        t_prev = t_cur

    if clamped:
        logger.info("hippus pushed luminance out of range on %d frames", clamped)
    return SimTrace(times, lums, fluxes, raw, final)
