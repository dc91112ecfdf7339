"""Quantitative checks of the model's headline claims.

Each ``criterion_N`` function runs one check and returns a
:class:`CriterionResult`; :func:`run_all` runs them in order. Tolerances are
fixed here and are not tunable from the outside.
"""

import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from . import photometry
from .iris import IrisGeometry, build_mesh, deform_mesh, map_point, radial_ratio, synthetic_texture
from .plr import (
    HippusGenerator,
    LightSchedule,
    SubjectProfile,
    apply_individuality,
    equilibrium_raw_diameter,
    estimate_r_index,
    hippus_perturbation,
    latency,
    moon_spencer_diameter,
    simulate,
)
from .traceio import MeasuredSeries, measure_pupil, trace_error

logger = logging.getLogger(__name__)

FRAME_MS = 33.3
OFF_LUMINANCE = 10 ** -0.5
ON_LUMINANCE = 10 ** 1.1
PAPER_R_INDICES = (0.03, 0.4, 0.54, 0.9, 0.92, 1.0)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.name}: {self.detail}"


def criterion_1():
    start = time.perf_counter()
    Ls = np.logspace(-5, 5, 101)
    rel = np.array([abs(equilibrium_raw_diameter(L) - moon_spencer_diameter(L))
                    / moon_spencer_diameter(L) for L in Ls])
    elapsed = time.perf_counter() - start
    worst = int(np.argmax(rel))
    passed = bool(np.all(rel < 0.02)) and elapsed < 1.0
    n_bad = int(np.count_nonzero(rel >= 0.02))
    return CriterionResult(
        1, "equilibrium within 2% of Moon-Spencer", passed,
        f"max rel diff {rel[worst]:.4%} at L={Ls[worst]:.3g} B, "
        f"{n_bad}/101 points >= 2%, {elapsed:.3f} s")


def criterion_2():
    E = photometry.blondels_to_illuminance(1e-5)
    phi = photometry.retinal_flux(E, 7.8272)
    err = abs(phi - 4.8118e-10)
    return CriterionResult(2, "threshold flux", err <= 1e-13,
                           f"flux {phi:.6e} lm, |err| {err:.2e}")


def latency_step_response(frame_ms=FRAME_MS, t_step=10_000.0):
    """Simulate the off->on step and locate onset of constriction.

    Returns ``(i_on, i_change, tau, trace)``: i_on indexes the first frame
    seeing the new luminance, i_change the first frame whose diameter
    differs from the adapted value.
    """
    sched = LightSchedule(((0.0, OFF_LUMINANCE), (t_step, ON_LUMINANCE)))
    tr = simulate(sched, SubjectProfile(1.0), frame_ms, t_step + 20_000.0)
    D = tr.diameter_raw
    i_on = int(np.argmax(tr.luminance > OFF_LUMINANCE * 1.5))
    moved = np.abs(D - D[i_on - 1]) > 1e-9
    i_change = int(np.argmax(moved))
    tau = latency(photometry.blondels_to_foot_lamberts(ON_LUMINANCE), 0.4)
    return i_on, i_change, tau, tr


def criterion_3():
    lat0 = latency(1.0, 0.0)
    lat4 = latency(1.0, 0.4)
    formula_ok = lat0 == 253.0 and abs(lat4 - 281.0) <= 1e-9
    i_on, i_change, tau, tr = latency_step_response()
    t, D = tr.time_ms, tr.diameter_raw
    delay = t[i_change] - t[i_on]
    flat = bool(np.all(np.abs(D[i_on - 1:i_change] - D[i_on - 1]) <= 1e-9))
    delay_ok = abs(delay - tau) <= FRAME_MS
    # strictly decreasing until 90% of the way to the new equilibrium
    target = equilibrium_raw_diameter(ON_LUMINANCE)
    level = D[i_on - 1] + 0.9 * (target - D[i_on - 1])
    j = i_change + int(np.argmax(D[i_change:] <= level))
    mono = bool(np.all(np.diff(D[i_change - 1:j + 1]) < 0))
    return CriterionResult(
        3, "latency", formula_ok and flat and delay_ok and mono,
        f"tau(1fL,0Hz)={lat0:g} ms, tau(1fL,0.4Hz)={lat4:.6g} ms; "
        f"step response delay {delay:.1f} ms vs tau {tau:.1f} ms, "
        f"flat={flat}, monotone after={mono}")


CONVERGENCE_CASES = ((1e-5, 1e5), (1e5, 1e-5), (OFF_LUMINANCE, ON_LUMINANCE),
                     (ON_LUMINANCE, OFF_LUMINANCE), (1.0, 1e-3))


def criterion_4():
    worst = 0.0
    slowest = 0.0
    ok = True
    for L_from, L_to in CONVERGENCE_CASES:
        sched = LightSchedule(((0.0, L_from), (1000.0, L_to)))
        start = time.perf_counter()
        tr = simulate(sched, SubjectProfile(1.0), FRAME_MS, 61_000.0)
        slowest = max(slowest, time.perf_counter() - start)
        target = equilibrium_raw_diameter(L_to)
        # stays within band over the final 10 s of the 60 s hold
        tail = tr.diameter_raw[tr.time_ms >= 51_000.0]
        dev = float(np.max(np.abs(tail - target)))
        worst = max(worst, dev)
        ok &= dev <= 0.05
    ok &= slowest < 1.0
    return CriterionResult(
        4, "constant-light convergence", ok,
        f"max |D - D_eq| over last 10 s {worst:.2e} mm across "
        f"{len(CONVERGENCE_CASES)} steps; slowest run {slowest:.3f} s")


def _crossing(t, D, level):
    s = np.sign(D - level)
    k = int(np.argmax(s != s[0]))
    if s[k] == s[0]:
        raise RuntimeError("level never crossed")
    return t[k - 1] + (level - D[k - 1]) / (D[k] - D[k - 1]) * (t[k] - t[k - 1])


def asymmetry_ratio(low=OFF_LUMINANCE, high=ON_LUMINANCE, frame_ms=FRAME_MS):
    """Dilation / constriction 10-90% traversal-time ratio for a
    low -> high -> low step pair."""
    t_up, t_down, t_end = 10_000.0, 40_000.0, 80_000.0
    sched = LightSchedule(((0.0, low), (t_up, high), (t_down, low)))
    tr = simulate(sched, SubjectProfile(1.0), frame_ms, t_end)
    t, D = tr.time_ms, tr.diameter_raw
    d_lo = D[t < t_up][-1]
    d_hi = D[t < t_down][-1]
    a = d_lo + 0.1 * (d_hi - d_lo)
    b = d_lo + 0.9 * (d_hi - d_lo)
    up = (t >= t_up) & (t < t_down)
    down = t >= t_down
    constrict = _crossing(t[up], D[up], b) - _crossing(t[up], D[up], a)
    dilate = _crossing(t[down], D[down], a) - _crossing(t[down], D[down], b)
    return dilate / constrict, constrict, dilate


def criterion_5():
    ratio, c, d = asymmetry_ratio()
    return CriterionResult(
        5, "dilation/constriction asymmetry", 2.5 <= ratio <= 3.5,
        f"constriction {c:.0f} ms, dilation {d:.0f} ms, ratio {ratio:.3f}")


def criterion_6():
    worst = 0.0
    for r in PAPER_R_INDICES:
        samples = [(L, apply_individuality(equilibrium_raw_diameter(L), r))
                   for L in (ON_LUMINANCE, OFF_LUMINANCE)]
        worst = max(worst, abs(estimate_r_index(samples) - r))
    return CriterionResult(6, "r_I round trip", worst <= 1e-6,
                           f"max |r_hat - r*| {worst:.2e} over {PAPER_R_INDICES}")


HIPPUS_BASE_LUMINANCE = 10 ** 0.5
HIPPUS_SEEDS = range(5)


def hippus_amplitudes(base=HIPPUS_BASE_LUMINANCE, seeds=HIPPUS_SEEDS):
    """Peak-to-peak raw diameter under constant light with hippus on,
    after 20 s of settling, over 120 s."""
    out = []
    for seed in seeds:
        tr = simulate(LightSchedule.constant(base), SubjectProfile(1.0),
                      FRAME_MS, 140_000.0, hippus=HippusGenerator(seed))
        D = tr.diameter_raw[tr.time_ms >= 20_000.0]
        out.append(float(np.ptp(D)))
    return out


def hippus_spectral_peak(seed=0, duration_s=300.0, rate_hz=30.0):
    t = np.arange(0.0, duration_s * 1000.0, 1000.0 / rate_hz)
    x = hippus_perturbation(HippusGenerator(seed), t)
    spec = np.abs(np.fft.rfft(x - x.mean()))
    freqs = np.fft.rfftfreq(len(x), 1.0 / rate_hz)
    return float(freqs[np.argmax(spec)]), float(np.max(np.abs(x)))


def criterion_7():
    amps = hippus_amplitudes()
    amp_ok = all(0.05 <= a <= 0.5 for a in amps)
    peaks, maxes = zip(*(hippus_spectral_peak(s) for s in HIPPUS_SEEDS))
    bound = 10 ** 0.3
    bound_ok = max(maxes) <= bound
    band_ok = all(0.05 <= f <= 0.3 for f in peaks)
    return CriterionResult(
        7, "hippus", amp_ok and bound_ok and band_ok,
        f"peak-to-peak D at {HIPPUS_BASE_LUMINANCE:.3g} B: "
        f"{min(amps):.3f}-{max(amps):.3f} mm; max |dL| {max(maxes):.4f} B "
        f"(bound {bound:.4f}); spectral peaks {min(peaks):.3f}-{max(peaks):.3f} Hz")


def random_geometry(rng, iris_radius=6.0):
    """Iris geometry with a random pupil offset of up to 20% of the radius."""
    off = rng.uniform(0, 0.2 * iris_radius)
    ang = rng.uniform(0, 2 * math.pi)
    center = (off * math.cos(ang), off * math.sin(ang))
    d_max = min(7.9, 2 * (iris_radius - off)) - 1e-6
    D = rng.uniform(1.9 + 1e-6, d_max)
    return IrisGeometry((0.0, 0.0), iris_radius, center, D), d_max


def criterion_8(n_cases=10_000, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_cases):
        g, d_max = random_geometry(rng)
        g2 = g.with_pupil_diameter(rng.uniform(1.9 + 1e-6, d_max))
        th = rng.uniform(0, 2 * math.pi)
        u = np.array([math.cos(th), math.sin(th)])
        exit_ = float(g.iris_exit(u))
        r = g.pupil_diameter / 2
        p = np.asarray(g.pupil_center) + (r + rng.uniform(0, 1) * (exit_ - r)) * u
        rho = radial_ratio(p, g)
        worst = max(worst, abs(radial_ratio(map_point(p, g, g2), g2) - rho))
    tex = synthetic_texture(64)
    uv_ok = True
    for _ in range(50):
        g, d_max = random_geometry(rng)
        m = build_mesh(g, tex)
        m2 = deform_mesh(m, g, rng.uniform(1.9 + 1e-6, d_max))
        uv_ok &= m2.uv.tobytes() == m.uv.tobytes()
    return CriterionResult(
        8, "deformation invariance", worst <= 1e-9 and uv_ok,
        f"max rho drift {worst:.2e} over {n_cases} cases; uv bitwise invariant={uv_ok}")


def disc_frame(radius_px, size=400, center=None, dark=10, bright=200):
    """Grayscale frame with a dark filled disc on a bright background."""
    c = (size / 2, size / 2) if center is None else center
    y, x = np.mgrid[0:size, 0:size] + 0.5
    img = np.full((size, size), bright, dtype=np.uint8)
    img[(x - c[0]) ** 2 + (y - c[1]) ** 2 <= radius_px ** 2] = dark
    return img


def criterion_9(seed=0):
    iris_px = 300.0
    worst = 0.0
    for radius in (25, 50, 75, 100, 125):
        d = measure_pupil(disc_frame(radius), (0, 0, 400, 400), 128, iris_px)
        expected = 2 * radius * 12.0 / iris_px
        worst = max(worst, abs(d - expected) / expected)
    sched = LightSchedule(((0.0, OFF_LUMINANCE), (3000.0, ON_LUMINANCE),
                           (6000.0, OFF_LUMINANCE)))
    tr = simulate(sched, SubjectProfile(1.0), FRAME_MS, 9000.0)
    rng = np.random.default_rng(seed)
    noisy = tr.diameter_final + rng.uniform(-0.1, 0.1, len(tr))
    err = trace_error(tr, MeasuredSeries(tr.time_ms, noisy))
    return CriterionResult(
        9, "pupil measurement", worst <= 0.02 and abs(err - 0.05) <= 0.02,
        f"max disc rel err {worst:.3%}; trace_error with +-0.1 mm noise {err:.4f} mm")


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9)


def run_all():
    return [c() for c in CRITERIA]
