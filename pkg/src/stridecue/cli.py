"""
Command-line front end.

Subcommands: calibrate, generate, analyze, schedule, simulate, bench. Single
file outputs go to stdout unless ``-o`` is given. Relative output paths are
resolved against ``--out-dir``, which defaults to ``$STRIDECUE_OUTPUT_DIR``
when that is set.

Exit codes: 0 on success, 2 on usage errors, 1 on runtime errors. With
``--json-errors`` the diagnostic is a JSON object on stderr.
"""
import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import analysis, companion, noise, perf, retime, sync_sim
from .exceptions import ParameterError, StrideCueError

OUTPUT_DIR_ENV = "STRIDECUE_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _out_path(args, name):
    if name is None or name == "-":
        return None
    p = Path(name)
    base = args.out_dir or os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _emit(args, text):
    path = _out_path(args, args.output)
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _load_series(path):
    values = noise.read_series_csv(path)
    try:
        return noise.StrideSeries(values, source=str(path))
    except StrideCueError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def _safe(fn, *a):
    try:
        return fn(*a), None
    except StrideCueError as exc:
        return None, str(exc)


def cmd_calibrate(args):
    values = noise.read_series_csv(args.trial)
    cal = noise.calibrate(values)
    params = cal.to_params(args.kind, args.n, args.seed, clamp=not args.no_clamp)
    _emit(args, params.to_json(indent=2) + "\n")


def _params_from_args(args):
    d = {}
    if args.params:
        try:
            d = json.loads(Path(args.params).read_text())
        except OSError as exc:
            raise StrideCueError(f"{args.params}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise StrideCueError(f"{args.params}: invalid JSON ({exc.msg}, line {exc.lineno})") from None
    flags = {
        "kind": args.kind,
        "n": args.n,
        "mu_s": args.mu if args.value is None else args.value,
        "sigma_s": args.sigma,
        "seed": args.seed,
        "clamp_min_s": args.clamp_min,
        "clamp_max_s": args.clamp_max,
    }
    d.update({k: v for k, v in flags.items() if v is not None})
    d.setdefault("kind", "pink")
    d.setdefault("n", 5000)
    d.setdefault("mu_s", 1.15)
    d.setdefault("sigma_s", 0.02)
    return noise.NoiseParams.from_dict(d)


def cmd_generate(args):
    params = _params_from_args(args)
    series = noise.generate(params)
    _emit(args, series.to_csv())


def analyze_series(series, spectrum_csv=None):
    """Stats and exponents as a JSON-ready dict; failures become ``*_error`` fields."""
    st = analysis.summary_stats(series)
    report = {"mean_s": st.mean, "sd_s": st.sd, "min_s": st.min, "max_s": st.max, "n": st.n}
    for key, fn in (("psd_slope", analysis.psd_slope), ("dfa_alpha", analysis.dfa_alpha)):
        value, err = _safe(fn, series)
        report[key] = value
        if err is not None:
            report[f"{key}_error"] = err
    if spectrum_csv is not None:
        spec, err = _safe(analysis.periodogram, series)
        if spec is not None:
            analysis.write_spectrum_csv(spec, spectrum_csv)
        else:
            report["spectrum_error"] = err
    return report


def cmd_analyze(args):
    series = _load_series(args.series)
    report = analyze_series(series, _out_path(args, args.spectrum_csv))
    _emit(args, json.dumps(report, indent=2) + "\n")


def cmd_schedule(args):
    baseline = retime.BaselineCycle(args.baseline)
    schedule = retime.build_schedule(baseline, _load_series(args.series))
    _emit(args, schedule.to_csv())


def cmd_simulate(args):
    cfg = companion.CompanionConfig(
        follow_distance=args.follow_distance,
        smoothing_tau=args.smoothing_tau,
        speed_on=args.speed_on,
        speed_off=args.speed_off,
    )
    if args.poses:
        poses = companion.read_pose_csv(args.poses)
    elif args.turn_at is not None:
        poses = companion.turn_walk(args.walk_speed, args.duration, args.turn_at, math.radians(args.turn_deg), args.rate)
    else:
        poses = companion.straight_walk(args.walk_speed, args.duration, args.rate)

    cue = _load_series(args.cue) if args.cue else None
    clock = retime.AnimationClock(retime.build_schedule(args.baseline, cue)) if cue is not None else None
    trace, final = companion.replay(poses, cfg, clock)
    base = Path(args.out_dir or os.environ.get(OUTPUT_DIR_ENV) or ".")
    base.mkdir(parents=True, exist_ok=True)
    companion.write_trace_csv(trace, base / args.trace)

    report = {
        "final_mode": final.mode.value,
        "final_separation_m": final.separation,
        "final_bearing_offset_rad": final.bearing_offset,
        "walking_fraction": sum(r.mode is companion.Mode.WALKING for r in trace) / len(trace),
    }
    if cue is not None:
        model = sync_sim.FollowerModel(args.coupling, args.intrinsic_mu, args.intrinsic_sigma, args.seed)
        follower = sync_sim.simulate_follow(cue, model)
        follower.to_csv(base / args.follower)
        f_alpha, f_err = _safe(analysis.dfa_alpha, follower)
        c_alpha, c_err = _safe(analysis.dfa_alpha, cue)
        report.update(coupling=model.coupling, follower_dfa_alpha=f_alpha, cue_dfa_alpha=c_alpha)
        if f_err or c_err:
            report["dfa_error"] = f_err or c_err
        report["cycles_completed"] = clock.current_index
    (base / args.report).write_text(json.dumps(report, indent=2) + "\n")


def cmd_bench(args):
    kinds = [k for k in args.kinds.split(",") if k.strip()]
    for k in kinds:
        noise.NoiseKind.parse(k)
    raw, records = perf.run_benchmark(
        kinds, n=args.n, repeats=args.repeats, mu=args.mu, sigma=args.sigma, seed=args.seed, workers=args.workers
    )
    rows = perf.aggregate(raw, kinds)
    if args.raw:
        perf.write_benchmark_csv(raw, _out_path(args, args.raw))
    if args.trace:
        perf.export_trace_csv(records, _out_path(args, args.trace))
    _emit(args, perf.write_benchmark_csv(rows.values()))


def _positive_int(text):
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="output file (default: stdout)")
    common.add_argument("--out-dir", help=f"directory for relative outputs (default: ${OUTPUT_DIR_ENV})")
    common.add_argument("--json-errors", action="store_true", help="report errors as JSON on stderr")

    p = _Parser(prog="stridecue", description=__doc__.strip().splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    c = sub.add_parser("calibrate", parents=[common], help="noise parameters from a self-paced trial CSV")
    c.add_argument("trial")
    c.add_argument("--kind", default="pink")
    c.add_argument("--n", type=_positive_int, default=5000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--no-clamp", action="store_true", help="omit the observed range")
    c.set_defaults(func=cmd_calibrate)

    g = sub.add_parser("generate", parents=[common], help="stride series CSV")
    g.add_argument("--params", help="NoiseParams JSON file; flags override its keys")
    g.add_argument("--kind")
    g.add_argument("--n", type=_positive_int)
    g.add_argument("--mu", type=float)
    g.add_argument("--sigma", type=float)
    g.add_argument("--value", type=float, help="constant for --kind iso (same as --mu)")
    g.add_argument("--seed", type=int)
    g.add_argument("--clamp-min", type=float)
    g.add_argument("--clamp-max", type=float)
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", parents=[common], help="stats and spectral exponents JSON")
    a.add_argument("series")
    a.add_argument("--spectrum-csv", help="also write the periodogram as freq,power")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("schedule", parents=[common], help="playback-speed schedule CSV")
    s.add_argument("series")
    s.add_argument("--baseline", type=float, default=retime.DEFAULT_BASELINE_S)
    s.set_defaults(func=cmd_schedule)

    m = sub.add_parser("simulate", parents=[common], help="companion replay and follower simulation")
    m.add_argument("--poses", help="pose CSV t_s,x_m,y_m,heading_rad")
    m.add_argument("--walk-speed", type=float, default=1.0)
    m.add_argument("--duration", type=float, default=30.0)
    m.add_argument("--rate", type=float, default=60.0)
    m.add_argument("--turn-at", type=float, help="insert an instantaneous turn at this time (s)")
    m.add_argument("--turn-deg", type=float, default=90.0)
    m.add_argument("--cue", help="cue stride series CSV")
    m.add_argument("--baseline", type=float, default=retime.DEFAULT_BASELINE_S)
    m.add_argument("--coupling", type=float, default=0.5)
    m.add_argument("--intrinsic-mu", type=float, default=1.15)
    m.add_argument("--intrinsic-sigma", type=float, default=0.02)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--follow-distance", type=float, default=2.0)
    m.add_argument("--smoothing-tau", type=float, default=0.3)
    m.add_argument("--speed-on", type=float, default=0.2)
    m.add_argument("--speed-off", type=float, default=0.1)
    m.add_argument("--trace", default="trace.csv")
    m.add_argument("--follower", default="follower.csv")
    m.add_argument("--report", default="report.json")
    m.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bench", parents=[common], help="per-noise-type benchmark CSV")
    b.add_argument("--kinds", default="pink,white,iso")
    b.add_argument("--n", type=_positive_int, default=5000)
    b.add_argument("--repeats", type=_positive_int, default=5)
    b.add_argument("--mu", type=float, default=1.15)
    b.add_argument("--sigma", type=float, default=0.02)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--workers", type=_positive_int, default=1)
    b.add_argument("--raw", help="also write one row per measurement")
    b.add_argument("--trace", help="also write the trace CSV")
    b.set_defaults(func=cmd_bench)
    return p


def _report(exc, code, as_json):
    if as_json:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}) + "\n")
    else:
        sys.stderr.write(f"stridecue: error: {exc}\n")
    return code


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    as_json = "--json-errors" in argv
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _report(exc, 2, as_json)
    try:
        args.func(args)
    except ParameterError as exc:
        return _report(exc, 2, as_json)
    except (StrideCueError, OSError, ValueError) as exc:
        return _report(exc, 1, as_json)
    return 0


if __name__ == "__main__":
    sys.exit(main())
