from .dynamics import FluxHistory, LightSchedule, SubjectProfile, simulate
from .hippus import HippusGenerator, hippus_perturbation
from .isocurves import (
    apply_individuality,
    estimate_r_index,
    isocurve_bottom,
    isocurve_top,
)
from .model import (
    PHI_THRESHOLD,
    equilibrium_raw_diameter,
    invert_moon_spencer,
    latency,
    moon_spencer_diameter,
    muscular_activity,
    muscular_activity_slope,
)

__all__ = [
    "FluxHistory", "HippusGenerator", "LightSchedule", "PHI_THRESHOLD",
    "SubjectProfile", "apply_individuality", "equilibrium_raw_diameter",
    "estimate_r_index", "hippus_perturbation", "invert_moon_spencer",
    "isocurve_bottom", "isocurve_top", "latency", "moon_spencer_diameter",
    "muscular_activity", "muscular_activity_slope", "simulate",
]
