import math

import numpy as np
import pytest

from plrsim.errors import MeasurementError, TraceFormatError
from plrsim.plr import LightSchedule, SubjectProfile, simulate
from plrsim.traceio import (
    MeasuredSeries,
    SimTrace,
    measure_pupil,
    parse_measured,
    parse_schedule,
    parse_trace,
    trace_error,
    write_measured,
    write_schedule,
    write_trace,
)
from plrsim.validation import disc_frame


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_parse_schedule_on_off(tmp_path):
    p = write(tmp_path / "s.csv", "time_ms,luminance_blondels\n0,0.316228\n3000,12.589\n")
    s = parse_schedule(p)
    assert s.segments == ((0.0, 0.316228), (3000.0, 12.589))
    assert math.log10(s.segments[0][1]) == pytest.approx(-0.5, abs=1e-5)
    assert math.log10(s.segments[1][1]) == pytest.approx(1.1, abs=1e-5)


def test_schedule_round_trip(tmp_path):
    s = LightSchedule(((0, 10 ** -0.5), (1234.5, 10 ** 1.1)))
    write_schedule(tmp_path / "s.csv", s)
    assert parse_schedule(tmp_path / "s.csv") == s


def test_header_only_files(tmp_path):
    t = parse_trace(write(tmp_path / "t.csv",
                          "time_ms,luminance_blondels,flux_lumens,diameter_raw_mm,diameter_final_mm\n"))
    assert len(t) == 0
    assert len(parse_measured(write(tmp_path / "m.csv", "time_ms,diameter_mm\n"))) == 0
    with pytest.raises(TraceFormatError):
        parse_schedule(write(tmp_path / "s.csv", "time_ms,luminance_blondels\n"))


def test_trace_round_trip_1000_rows(tmp_path):
    rng = np.random.default_rng(0)
    t = np.cumsum(rng.uniform(1, 50, 1000))
    cols = [rng.uniform(1e-5, 1e5, 1000), rng.uniform(0, 1e-3, 1000),
            rng.uniform(2, 7.8, 1000), rng.uniform(-2e4, 7, 1000)]
    trace = SimTrace(t, *cols)
    write_trace(tmp_path / "t.csv", trace)
    back = parse_trace(tmp_path / "t.csv")
    for a, b in zip((trace.time_ms, *cols), (back.time_ms, back.luminance, back.flux,
                                              back.diameter_raw, back.diameter_final)):
        assert np.allclose(a, b, rtol=0, atol=1e-9)


def test_measured_round_trip(tmp_path):
    m = MeasuredSeries([0.0, 33.3, 66.6], [5.1, 5.0, 4.2])
    write_measured(tmp_path / "m.csv", m)
    back = parse_measured(tmp_path / "m.csv")
    assert np.array_equal(back.time_ms, m.time_ms)
    assert np.array_equal(back.diameter, m.diameter)


@pytest.mark.parametrize("body, line", [
    ("0,1\n5,x\n", 3),
    ("0,1\n5\n", 3),
    ("0,1\n5,2\n5,3\n", 4),
    ("0,1\n5,2\n4,3\n", 4),
])
def test_malformed_rows_report_line(tmp_path, body, line):
    p = write(tmp_path / "m.csv", "time_ms,diameter_mm\n" + body)
    with pytest.raises(TraceFormatError) as exc:
        parse_measured(p)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_bad_header(tmp_path):
    with pytest.raises(TraceFormatError):
        parse_measured(write(tmp_path / "m.csv", "t,d\n0,1\n"))


def test_measured_diameter_range(tmp_path):
    with pytest.raises(TraceFormatError):
        parse_measured(write(tmp_path / "m.csv", "time_ms,diameter_mm\n0,13\n"))


@pytest.mark.parametrize("radius, expected", [(50, 4.0), (100, 8.0)])
def test_measure_disc(radius, expected):
    d = measure_pupil(disc_frame(radius), (0, 0, 400, 400), 128, 300)
    assert d == pytest.approx(expected, rel=0.02)


def test_measure_no_pupil():
    with pytest.raises(MeasurementError, match="no pupil found"):
        measure_pupil(np.full((50, 50), 255, np.uint8), (0, 0, 50, 50), 100, 300)


def test_measure_roi_out_of_bounds():
    with pytest.raises(ValueError):
        measure_pupil(disc_frame(20, size=100), (50, 50, 60, 10), 128, 300)


def test_measure_only_counts_roi():
    img = disc_frame(30, size=200)
    img[0:10, 0:10] = 0
    inner = measure_pupil(img, (50, 50, 100, 100), 128, 300)
    assert inner == pytest.approx(60 * 12 / 300, rel=0.02)


def test_measure_rotation_invariant_and_monotone():
    base = measure_pupil(disc_frame(60, center=(200, 200)), (0, 0, 400, 400), 128, 300)
    moved = measure_pupil(disc_frame(60, center=(170.3, 231.7)), (0, 0, 400, 400), 128, 300)
    assert moved == pytest.approx(base, rel=0.01)
    sizes = [measure_pupil(disc_frame(r), (0, 0, 400, 400), 128, 300) for r in range(20, 150, 10)]
    assert all(b > a for a, b in zip(sizes, sizes[1:]))


def _trace():
    sched = LightSchedule(((0, 10 ** -0.5), (3000, 10 ** 1.1)))
    return simulate(sched, SubjectProfile(1.0), 33.3, 6000)


def test_trace_error_identity_and_offset():
    tr = _trace()
    meas = MeasuredSeries(tr.time_ms, tr.diameter_final)
    assert trace_error(tr, meas) == 0.0
    shifted = MeasuredSeries(tr.time_ms + 5.0, tr.diameter_final + 0.5)
    assert trace_error(tr, shifted) == pytest.approx(0.5, abs=1e-3)


def test_trace_error_uniform_noise():
    tr = _trace()
    noise = np.random.default_rng(42).uniform(-0.1, 0.1, len(tr))
    err = trace_error(tr, MeasuredSeries(tr.time_ms, tr.diameter_final + noise))
    # E|U(-0.1, 0.1)| = 0.05
    assert err == pytest.approx(0.05, abs=0.02)


def test_trace_error_no_overlap():
    tr = _trace()
    with pytest.raises(ValueError):
        trace_error(tr, MeasuredSeries([1e6, 2e6], [5.0, 5.0]))
