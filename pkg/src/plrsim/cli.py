"""Command-line entry point: ``plrsim <subcommand> [options]``.

Exit codes: 0 success, 1 validation/data failure, 2 usage error.
"""

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import photometry
from .errors import DomainError, MeasurementError, TraceFormatError
from .iris import IrisGeometry, IrisTexture, build_mesh, deform_mesh, read_image, render_frame, write_ppm
from .plr import (
    HippusGenerator,
    SubjectProfile,
    apply_individuality,
    equilibrium_raw_diameter,
    estimate_r_index,
    moon_spencer_diameter,
    simulate,
)
from .traceio import MeasuredSeries, measure_pupil, parse_schedule, write_measured, write_trace

logger = logging.getLogger("plrsim")


class UsageError(Exception):
    pass


def _add_profile(p):
    p.add_argument("--r-index", type=float, default=1.0,
                   help="individual variability index in [0, 1]")
    p.add_argument("--velocity-s", type=float, default=600.0,
                   help="velocity constant S (larger = slower pupil)")
    p.add_argument("--freq-r", type=float, default=0.4,
                   help="stimulus frequency R in Hz for the latency formula")


def _add_texture(p, required):
    p.add_argument("--texture", type=Path, required=required,
                   help="iris photograph (PPM/PGM), iris centred in the image")
    p.add_argument("--texture-pupil-mm", type=float, default=2.5,
                   help="pupil diameter as photographed")
    p.add_argument("--texture-iris-px", type=float, default=None,
                   help="iris diameter in texture pixels (default: shorter side)")
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--mm-per-px", type=float, default=0.05)


def build_parser():
    parser = argparse.ArgumentParser(prog="plrsim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("equilibrium", help="tabulate equilibrium diameter vs luminance")
    _add_profile(p)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--out", type=Path, help="CSV path (default: stdout)")

    p = sub.add_parser("simulate", help="run a light schedule through the reflex model")
    _add_profile(p)
    p.add_argument("--schedule", type=Path, required=True)
    p.add_argument("--duration-ms", type=float, default=None,
                   help="default: last schedule start + 10 s")
    p.add_argument("--frame-interval-ms", type=float, default=33.3)
    p.add_argument("--hippus", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True, help="trace CSV")
    p.add_argument("--frames", type=Path, help="directory for rendered PPM frames")
    _add_texture(p, required=False)

    p = sub.add_parser("fit-rindex", help="estimate r_I from on/off equilibria")
    p.add_argument("--samples", type=Path, required=True,
                   help="CSV with header luminance,diameter_mm")
    p.add_argument("--unit", choices=("blondels", "lux"), default="blondels",
                   help="unit of the luminance column")

    p = sub.add_parser("measure", help="measure pupil diameter in PGM frames")
    p.add_argument("frames", nargs="+", type=Path)
    p.add_argument("--roi", required=True, help="x,y,width,height in pixels")
    p.add_argument("--threshold", type=int, required=True,
                   help="pixels darker than this count as pupil")
    p.add_argument("--iris-px", type=float, required=True,
                   help="iris diameter in pixels (taken as 12 mm)")
    p.add_argument("--frame-rate", type=float, default=30.0)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("deform", help="render the iris texture at a pupil diameter")
    _add_texture(p, required=True)
    p.add_argument("--diameter", type=float, required=True)
    p.add_argument("--out", type=Path, required=True)

    sub.add_parser("validate", help="run the acceptance checks")
    return parser


def _cmd_equilibrium(args):
    profile = SubjectProfile(args.r_index, args.velocity_s, args.freq_r)
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    fh = args.out.open("w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["luminance_blondels", "diameter_raw_mm", "diameter_final_mm",
                    "moon_spencer_mm"])
        for e in np.linspace(-5.0, 5.0, args.points):
            L = float(10.0 ** e)
            D = equilibrium_raw_diameter(L)
            w.writerow([repr(L), repr(D), repr(apply_individuality(D, profile.r_index)),
                        repr(moon_spencer_diameter(L))])
    finally:
        if args.out:
            fh.close()
    return 0


def _load_texture(args):
    if args.texture is None:
        raise UsageError("--texture is required to render frames")
    return IrisTexture.load(args.texture, args.texture_pupil_mm, args.texture_iris_px)


def _cmd_simulate(args):
    profile = SubjectProfile(args.r_index, args.velocity_s, args.freq_r)
    schedule = parse_schedule(args.schedule)
    duration = args.duration_ms
    if duration is None:
        duration = schedule.segments[-1][0] + 10_000.0
    hippus = HippusGenerator(args.seed) if args.hippus else None
    trace = simulate(schedule, profile, args.frame_interval_ms, duration, hippus)
    write_trace(args.out, trace)
    if args.frames:
        tex = _load_texture(args)
        geom = IrisGeometry(pupil_diameter=tex.reference.pupil_diameter)
        mesh = build_mesh(geom, tex)
        args.frames.mkdir(parents=True, exist_ok=True)
        for k, d in enumerate(trace.diameter_final):
            # the final diameter can leave the renderable range for r < 1
            d = float(np.clip(d, 1.901, 7.899))
            img = render_frame(deform_mesh(mesh, geom, d), tex,
                               args.width, args.height, args.mm_per_px)
            write_ppm(args.frames / f"frame_{k:05d}.ppm", img)
    logger.info("wrote %d frames of trace to %s", len(trace), args.out)
    return 0


def _cmd_fit_rindex(args):
    samples = []
    with args.samples.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader, None)
        for row in reader:
            if not row:
                continue
            try:
                value, d = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                raise TraceFormatError("expected two numeric fields", reader.line_num) from None
            if args.unit == "lux":
                value = photometry.illuminance_to_blondels(photometry.lux_to_illuminance(value))
            samples.append((value, d))
    if not samples:
        raise UsageError("no samples in input")
    print(f"{estimate_r_index(samples):.6f}")
    return 0


def _cmd_measure(args):
    try:
        roi = tuple(int(v) for v in args.roi.split(","))
    except ValueError:
        raise UsageError("--roi must be x,y,width,height") from None
    if len(roi) != 4:
        raise UsageError("--roi must be x,y,width,height")
    diam = [measure_pupil(read_image(f, "L"), roi, args.threshold, args.iris_px)
            for f in args.frames]
    times = np.arange(len(diam)) * 1000.0 / args.frame_rate
    write_measured(args.out, MeasuredSeries(times, diam, args.iris_px, args.frame_rate))
    return 0


def _cmd_deform(args):
    tex = _load_texture(args)
    geom = IrisGeometry(pupil_diameter=tex.reference.pupil_diameter)
    mesh = deform_mesh(build_mesh(geom, tex), geom, args.diameter)
    write_ppm(args.out, render_frame(mesh, tex, args.width, args.height, args.mm_per_px))
    return 0


def _cmd_validate(args):
    from .validation import CRITERIA

    ok = True
    for criterion in CRITERIA:
        result = criterion()
        print(result.line(), flush=True)
        ok &= result.passed
    return 0 if ok else 1


COMMANDS = {
    "equilibrium": _cmd_equilibrium,
    "simulate": _cmd_simulate,
    "fit-rindex": _cmd_fit_rindex,
    "measure": _cmd_measure,
    "deform": _cmd_deform,
    "validate": _cmd_validate,
}


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, DomainError, OSError) as exc:
        print(f"plrsim {args.command}: {exc}", file=sys.stderr)
        return 2
    except (TraceFormatError, MeasurementError, ArithmeticError, ValueError) as exc:
        print(f"plrsim {args.command}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
