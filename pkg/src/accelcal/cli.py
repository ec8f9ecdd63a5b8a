"""Command-line interface.

Raw and pose files are CSV with header ``ax,ay,az`` in sensor units.
Corrected recordings use the same header, in m/s^2. Calibration parameters
are stored as JSON.

Exit codes: 0 success, 1 usage, 2 malformed input, 3 ill-posed dataset,
4 fit did not converge.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import analysis, calibration, fileio, geometry, synthetic
from .exceptions import DomainError, IllPosedDatasetError, InputError, ParameterError
from .params import DEFAULT_ANGLE_TOL, REFERENCE_ANGLES, STANDARD_GRAVITY, AxisAngles, CalibrationParams

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MALFORMED = 2
EXIT_ILL_POSED = 3
EXIT_NOT_CONVERGED = 4

log = logging.getLogger("accelcal")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _angles(values) -> AxisAngles:
    if values is None:
        return REFERENCE_ANGLES
    if len(values) == 1:
        key = values[0].lower()
        if key == "orthogonal":
            return AxisAngles.orthogonal()
        if key == "reference":
            return REFERENCE_ANGLES
    if len(values) != 3:
        raise UsageError("--angles takes three radian values, 'orthogonal' or 'reference'")
    try:
        return AxisAngles.from_array([float(v) for v in values])
    except ValueError:
        raise UsageError(f"--angles: not numbers: {values}") from None


def _emit(text: str, output) -> None:
    if output:
        fileio.atomic_write_text(output, text)
    else:
        sys.stdout.write(text)


def _vec(v) -> list[float]:
    return [float(x) for x in v]


def cmd_calibrate(args) -> int:
    samples = fileio.read_vectors(args.poses)
    if len(samples) == 0:
        raise InputError(f"{args.poses}: no data rows")
    if len(samples) < calibration.MIN_POSES:
        raise UsageError(f"need at least {calibration.MIN_POSES} poses, got {len(samples)}")
    opts = calibration.FitOptions(max_iterations=args.max_iterations, tolerance=args.tolerance,
                                  restarts=args.restarts, seed=args.seed, angle_tol=args.angle_tol)
    report = calibration.fit(calibration.PoseDataset(samples), g=args.g, options=opts)
    meta = {"residual_rms": report.residual_rms, "pose_count": report.pose_count,
            "iterations": report.iterations, "converged": report.converged}
    fileio.write_params(args.output, report.params, args.g, meta)

    if args.format == "json":
        doc = fileio.params_to_document(report.params, args.g, meta)
        doc["residuals"] = _vec(report.residuals)
        print(json.dumps(doc))
    else:
        p = report.params
        print(f"shifts s: {', '.join(map(fileio.fmt, p.s))}")
        print(f"scales b: {', '.join(map(fileio.fmt, p.b))}")
        print(f"angles (rad): phi={fileio.fmt(p.angles.phi)} psi={fileio.fmt(p.angles.psi)} "
              f"theta={fileio.fmt(p.angles.theta)}")
        print(f"residual RMS: {fileio.fmt(report.residual_rms)} m/s^2 over {report.pose_count} poses")
        print(f"iterations: {report.iterations}  converged: {report.converged}")
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_correct(args) -> int:
    params, _ = fileio.read_params(args.params)
    try:
        params.check_scales()
        raw = fileio.read_vectors(args.recording)
        corrected = geometry.correct_sample(raw, params) if len(raw) else raw
    except (ParameterError, DomainError) as exc:
        raise InputError(f"{args.params}: {exc}") from exc
    text = fileio.render_csv(fileio.VECTOR_HEADER, (map(float, row) for row in corrected))
    _emit(text, args.output)
    return EXIT_OK


def _result_doc(result: analysis.ErrorProblemResult) -> dict:
    a = result.angles
    return {"problem": result.problem, "max_value": result.max_value, "argmax_a": _vec(result.a),
            "argmax_angles_rad": {"phi": a.phi, "psi": a.psi, "theta": a.theta},
            "evaluations": result.evaluations}


def cmd_analyze(args) -> int:
    if args.problem == "max-error":
        result = analysis.solve_problem1(args.g, args.angle_tol, args.grid_points)
        value_line = f"max error: {fileio.fmt(result.max_value)} m/s^2"
    else:
        result = analysis.solve_problem2(args.range_g * args.g, args.angle_tol, args.grid_points)
        value_line = (f"max relative error: {fileio.fmt(result.max_value)} "
                      f"({result.max_value * 100:.4f}%)")
    if args.format == "json":
        text = json.dumps(_result_doc(result)) + "\n"
    else:
        a = result.angles
        text = (f"{value_line}\n"
                f"argmax a: {', '.join(map(fileio.fmt, result.a))}\n"
                f"argmax angles (rad): phi={fileio.fmt(a.phi)} psi={fileio.fmt(a.psi)} "
                f"theta={fileio.fmt(a.theta)}\n"
                f"evaluations: {result.evaluations}\n")
    _emit(text, args.output)
    return EXIT_OK


def _sampling_spec(args) -> analysis.HistogramSpec:
    return analysis.HistogramSpec(angles=_angles(args.angles), half_width=args.half_width,
                                  samples=args.samples, bins=getattr(args, "bins", 60), seed=args.seed,
                                  value_range=tuple(args.range) if getattr(args, "range", None) else None)


def cmd_histogram(args) -> int:
    hist = analysis.histogram(_sampling_spec(args))
    rows = ((float(lo), float(hi), int(n)) for lo, hi, n in zip(hist.edges[:-1], hist.edges[1:], hist.counts))
    _emit(fileio.render_csv(("bin_low", "bin_high", "count"), rows), args.output)
    return EXIT_OK


def cmd_domains(args) -> int:
    cloud = analysis.domain_cloud(args.threshold, args.comparison, _sampling_spec(args), args.max_points)
    rows = ((*map(float, p), float(e)) for p, e in zip(cloud.points, cloud.rel_errors))
    _emit(fileio.render_csv(("x", "y", "z", "rel_error"), rows), args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    truth = CalibrationParams(tuple(args.s), tuple(args.b), _angles(args.angles))
    scenario = synthetic.TruthScenario(truth, synthetic.fibonacci_directions(args.poses),
                                       g=args.g, noise_std=args.noise, seed=args.seed)
    dataset = synthetic.generate(scenario)
    fileio.write_vectors(args.output, dataset.samples)
    if args.truth:
        fileio.write_params(args.truth, truth, args.g)
    return EXIT_OK


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--g", type=float, default=STANDARD_GRAVITY, help="gravity in m/s^2 (default %(default)s)")
    shared.add_argument("--angle-tol", type=float, default=DEFAULT_ANGLE_TOL,
                        help="allowed relative deviation of axis angles from 90 deg (default %(default)s)")
    shared.add_argument("--seed", type=int, default=42, help="random seed (default %(default)s)")
    shared.add_argument("--format", choices=("text", "json"), default="text")
    shared.add_argument("--output", "-o", help="output path (stdout if omitted, where allowed)")
    shared.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="accelcal",
                     description="Calibrate three-axis accelerometers with non-orthogonal axes "
                                 "and analyse the error of assuming orthogonality.",
                     epilog="Exit codes: 0 success, 1 usage, 2 malformed input, 3 ill-posed dataset, "
                            "4 fit did not converge.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("calibrate", parents=[shared], help="fit calibration parameters from static poses",
                       description="Fit shifts, scales and axis angles. POSES is an ax,ay,az CSV in "
                                   "raw sensor units, one row per static pose.")
    p.add_argument("poses")
    p.add_argument("--max-iterations", type=_positive_int, default=200)
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--restarts", type=int, default=0)
    p.set_defaults(func=cmd_calibrate, output_required=True)

    p = sub.add_parser("correct", parents=[shared], help="apply calibration to a raw recording",
                       description="Map raw readings (sensor units) to orthonormal-frame "
                                   "acceleration in m/s^2.")
    p.add_argument("params")
    p.add_argument("recording")
    p.set_defaults(func=cmd_correct)

    p = sub.add_parser("analyze", help="worst-case error of assuming orthogonal axes")
    asub = p.add_subparsers(dest="problem", required=True, parser_class=_Parser)
    for name, text in (("max-error", "largest absolute error at |a| = g"),
                       ("relative-error", "largest relative error over a box")):
        q = asub.add_parser(name, parents=[shared], help=text)
        q.add_argument("--grid-points", type=_positive_int, default=analysis.GRID_POINTS)
        q.add_argument("--range-g", type=float, default=16.0,
                       help="box half-width in multiples of g (relative-error only)")
        q.set_defaults(func=cmd_analyze)

    for name, func, text in (("histogram", cmd_histogram, "relative-error histogram CSV"),
                             ("domains", cmd_domains, "points on one side of a relative-error threshold")):
        q = sub.add_parser(name, parents=[shared], help=text)
        q.add_argument("--angles", nargs="+", metavar="RAD",
                       help="phi psi theta in radians, or 'orthogonal'/'reference' (default reference)")
        q.add_argument("--half-width", type=float, default=20.0, help="sample cube half-width in m/s^2")
        q.add_argument("--samples", type=_positive_int, default=1_000_000)
        if name == "histogram":
            q.add_argument("--bins", type=_positive_int, default=60)
            q.add_argument("--range", type=float, nargs=2, metavar=("LOW", "HIGH"))
        else:
            q.add_argument("--threshold", type=float, required=True)
            q.add_argument("--comparison", choices=("le", "ge"), default="le")
            q.add_argument("--max-points", type=_positive_int, default=None)
        q.set_defaults(func=func)

    p = sub.add_parser("simulate", parents=[shared], help="synthetic static-pose dataset",
                       description="Write raw readings (sensor units) for Fibonacci-spread poses.")
    p.add_argument("--poses", type=_positive_int, default=24)
    p.add_argument("--noise", type=float, default=0.0, help="raw noise std in sensor units")
    p.add_argument("--s", type=float, nargs=3, default=[0.0, 0.0, 0.0])
    p.add_argument("--b", type=float, nargs=3, default=[1.0, 1.0, 1.0])
    p.add_argument("--angles", nargs="+", metavar="RAD", default=["orthogonal"])
    p.add_argument("--truth", help="also write the truth parameters as JSON")
    p.set_defaults(func=cmd_simulate, output_required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "output_required", False) and not args.output:
        print(f"accelcal {args.command}: error: --output is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"accelcal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, ParameterError, DomainError, OSError, ValueError) as exc:
        print(f"accelcal: error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except IllPosedDatasetError as exc:
        print(f"accelcal: ill-posed dataset: {exc}", file=sys.stderr)
        return EXIT_ILL_POSED


if __name__ == "__main__":
    sys.exit(main())
