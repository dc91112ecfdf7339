"""CSV formats for schedules, traces and measurements; pixel-area pupil sizing.

Files are UTF-8 CSV with a header row. Times are ms, luminance blondels,
flux lumens, diameters mm. Floats are written with ``repr`` so a write/parse
round trip is exact.
"""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import MeasurementError, TraceFormatError

SCHEDULE_HEADER = ("time_ms", "luminance_blondels")
TRACE_HEADER = ("time_ms", "luminance_blondels", "flux_lumens",
                "diameter_raw_mm", "diameter_final_mm")
MEASURED_HEADER = ("time_ms", "diameter_mm")

TYPICAL_IRIS_DIAMETER_MM = 12.0


def _strictly_increasing(t):
    return bool(np.all(np.diff(t) > 0))


@dataclass
class SimTrace:
    """Per-frame simulation output, one numpy column per quantity."""

    time_ms: np.ndarray
    luminance: np.ndarray
    flux: np.ndarray
    diameter_raw: np.ndarray
    diameter_final: np.ndarray

    def __post_init__(self):
        cols = [np.asarray(c, dtype=float) for c in
                (self.time_ms, self.luminance, self.flux,
                 self.diameter_raw, self.diameter_final)]
        if len({len(c) for c in cols}) != 1:
            raise ValueError("trace columns differ in length")
        (self.time_ms, self.luminance, self.flux,
         self.diameter_raw, self.diameter_final) = cols
        if not _strictly_increasing(self.time_ms):
            raise ValueError("trace times must be strictly increasing")
        if not all(np.all(np.isfinite(c)) for c in cols):
            raise ValueError("trace contains non-finite values")

    def __len__(self):
        return len(self.time_ms)

    def rows(self):
        return zip(self.time_ms, self.luminance, self.flux,
                   self.diameter_raw, self.diameter_final)


@dataclass
class MeasuredSeries:
    """Pupil diameters measured from video frames."""

    time_ms: np.ndarray
    diameter: np.ndarray
    iris_px_diameter: float = None
    frame_rate: float = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.time_ms = np.asarray(self.time_ms, dtype=float)
        self.diameter = np.asarray(self.diameter, dtype=float)
        if len(self.time_ms) != len(self.diameter):
            raise ValueError("time and diameter columns differ in length")
        if not _strictly_increasing(self.time_ms):
            raise ValueError("measured times must be strictly increasing")
        if np.any((self.diameter <= 0) | (self.diameter >= 12)):
            raise ValueError("measured diameters must lie in (0, 12) mm")

    def __len__(self):
        return len(self.time_ms)


def _read_rows(path, header):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise TraceFormatError(f"{path}: empty file, expected header", 1)
        if tuple(h.strip() for h in first) != header:
            raise TraceFormatError(
                f"{path}: expected header {','.join(header)}", 1)
        rows = []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise TraceFormatError(
                    f"expected {len(header)} fields, got {len(row)}", line)
            try:
                vals = tuple(float(c) for c in row)
            except ValueError as exc:
                raise TraceFormatError(str(exc), line) from None
            if not all(math.isfinite(v) for v in vals):
                raise TraceFormatError("non-finite value", line)
            if rows and not vals[0] > rows[-1][1][0]:
                raise TraceFormatError("time is not strictly increasing", line)
            rows.append((line, vals))
    return rows


def _write_rows(path, header, rows):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])


def parse_schedule(path):
    """Read ``time_ms,luminance_blondels`` rows into a LightSchedule."""
    from .plr.dynamics import LightSchedule

    rows = _read_rows(path, SCHEDULE_HEADER)
    if not rows:
        raise TraceFormatError(f"{path}: schedule has no segments")
    try:
        return LightSchedule(tuple(vals for _, vals in rows))
    except ValueError as exc:
        raise TraceFormatError(f"{path}: {exc}") from None


def write_schedule(path, schedule):
    _write_rows(path, SCHEDULE_HEADER, schedule.segments)


def write_trace(path, trace):
    _write_rows(path, TRACE_HEADER, trace.rows())


def parse_trace(path):
    rows = _read_rows(path, TRACE_HEADER)
    cols = np.array([vals for _, vals in rows], dtype=float).reshape(-1, 5)
    return SimTrace(*cols.T)


def write_measured(path, series):
    _write_rows(path, MEASURED_HEADER, zip(series.time_ms, series.diameter))


def parse_measured(path):
    rows = _read_rows(path, MEASURED_HEADER)
    for line, (_, d) in rows:
        if not 0 < d < 12:
            raise TraceFormatError(f"diameter {d} outside (0, 12) mm", line)
    cols = np.array([vals for _, vals in rows], dtype=float).reshape(-1, 2)
    return MeasuredSeries(cols[:, 0], cols[:, 1])


def measure_pupil(frame, roi, dark_threshold, iris_px_diameter):
    """Pupil diameter in mm from the dark-pixel area inside a rectangle.

    Parameters
    ----------
    frame : array_like
        2-D grayscale image (0-255).
    roi : tuple of int
        ``(x, y, width, height)`` in pixels; must lie inside the frame.
    dark_threshold : int
        Pixels strictly below this value count as pupil.
    iris_px_diameter : float
        Iris diameter in pixels, taken to span 12 mm.
    """
    img = np.asarray(frame)
    if img.ndim != 2:
        raise ValueError("frame must be a 2-D grayscale image")
    x, y, w, h = (int(v) for v in roi)
    if w <= 0 or h <= 0 or x < 0 or y < 0 or x + w > img.shape[1] or y + h > img.shape[0]:
        raise ValueError(f"roi {roi} outside frame of shape {img.shape}")
    if not iris_px_diameter > 0:
        raise ValueError("iris_px_diameter must be positive")
    area = int(np.count_nonzero(img[y:y + h, x:x + w] < dark_threshold))
    if area == 0:
        raise MeasurementError("no pupil found: no dark pixels in roi")
    d_px = 2.0 * math.sqrt(area / math.pi)
    return d_px * TYPICAL_IRIS_DIAMETER_MM / iris_px_diameter


def trace_error(sim, meas):
    """Mean absolute diameter difference, aligning each measurement to the
    nearest simulated frame. Measurements outside the simulated time span
    are ignored. Compares against ``diameter_final``.
    """
    t_sim = sim.time_ms
    inside = (meas.time_ms >= t_sim[0]) & (meas.time_ms <= t_sim[-1])
    if len(t_sim) == 0 or not np.any(inside):
        raise ValueError("simulated and measured series do not overlap")
    t = meas.time_ms[inside]
    if len(t_sim) == 1:
        j = np.zeros(len(t), dtype=int)
    else:
        j = np.clip(np.searchsorted(t_sim, t), 1, len(t_sim) - 1)
        left_closer = (t - t_sim[j - 1]) <= (t_sim[j] - t)
        j = np.where(left_closer, j - 1, j)
    return float(np.mean(np.abs(sim.diameter_final[j] - meas.diameter[inside])))
