"""Command-line front end: instance file I/O and the decide / gen /
oracle / bench subcommands.

Instance files are canonical JSON with field order (dim, lambda, v) and
floats rendered with 17 significant digits, so serialization round-trips
bit-exactly and identical seeds yield byte-identical files.  Verdicts are
data, not exit codes: both coverage answers exit 0, while degenerate
inputs, unsolvable requests, and malformed files exit 2.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import statistics
import sys
import time

import numpy as np

from .engine import decide_instance
from .errors import BallCoverError
from .geometry import Ball, Tolerances
from .instances import GenConfig, generate, grid_oracle, hit_and_run_oracle
from .sequential import add_ball, initial_state


class InstanceFormatError(ValueError):
    pass


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def serialize_instance(lam, v) -> str:
    """Canonical instance text: stable field order, round-trip floats."""
    dim = lam[0].dim

    def ball_text(ball):
        coords = ", ".join(_fmt(c) for c in ball.center)
        return f'{{"center": [{coords}], "radius": {_fmt(ball.radius)}}}'

    lam_text = ", ".join(ball_text(b) for b in lam)
    v_text = ", ".join(ball_text(b) for b in v)
    return f'{{"dim": {dim}, "lambda": [{lam_text}], "v": [{v_text}]}}\n'


def parse_instance(text: str):
    """Parse an instance file into ball lists, with field-level diagnostics."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InstanceFormatError("top level must be an object")
    for key in ("dim", "lambda", "v"):
        if key not in data:
            raise InstanceFormatError(f"missing field {key!r}")
    dim = data["dim"]
    if not isinstance(dim, int) or dim < 2:
        raise InstanceFormatError(f"dim must be an integer >= 2, got {dim!r}")

    def parse_family(name):
        family = data[name]
        if not isinstance(family, list) or not family:
            raise InstanceFormatError(f"{name} must be a nonempty list of balls")
        balls = []
        for idx, entry in enumerate(family):
            where = f"{name}[{idx}]"
            if not isinstance(entry, dict) or "center" not in entry or "radius" not in entry:
                raise InstanceFormatError(f"{where} must have center and radius")
            center = entry["center"]
            if not isinstance(center, list) or len(center) != dim \
                    or not all(isinstance(c, (int, float)) for c in center):
                raise InstanceFormatError(f"center of {where} must be a list of {dim} numbers")
            radius = entry["radius"]
            if not isinstance(radius, (int, float)) or not radius > 0:
                raise InstanceFormatError(f"radius of {where} must be positive, got {radius!r}")
            balls.append(Ball(np.array(center, dtype=float), float(radius)))
        return balls

    return parse_family("lambda"), parse_family("v")


def load_instance(path: str):
    try:
        with open(path, encoding="utf-8") as handle:
            return parse_instance(handle.read())
    except OSError as exc:
        raise InstanceFormatError(f"cannot read {path}: {exc}") from exc


def _json_value(value):
    if value is None:
        return None
    if isinstance(value, np.ndarray):
        return [float(c) for c in value]
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def report_to_dict(report, echo=None) -> dict:
    payload = {
        "covered": report.covered,
        "witness": _json_value(report.witness),
        "i_empty": report.i_empty,
        "trivial_reason": report.trivial_reason,
        "certificates": [
            {
                "ref_index": cert.ref_index,
                "case": cert.case.value,
                "min_value": _json_value(cert.min_value),
                "max_value": _json_value(cert.max_value),
            }
            for cert in report.certificates
        ],
        "timings_ms": {key: 1000.0 * val for key, val in report.timings.items()},
    }
    if echo is not None:
        payload["config"] = echo
    return payload


def fit_power_law(ns, times):
    """Least-squares fit of t = a * n^b in log-log space.

    Returns (a, b, r_squared)."""
    ln_n = np.log(np.asarray(ns, dtype=float))
    ln_t = np.log(np.asarray(times, dtype=float))
    b, ln_a = np.polyfit(ln_n, ln_t, 1)
    predicted = ln_a + b * ln_n
    ss_res = float(np.sum((ln_t - predicted) ** 2))
    ss_tot = float(np.sum((ln_t - np.mean(ln_t)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(np.exp(ln_a)), float(b), r2


def _tolerances(args) -> Tolerances:
    base = None
    env = os.environ.get("BALLCOVER_TOL")
    if env is not None:
        base = float(env)
    if getattr(args, "tol", None) is not None:       # flag wins over env
        base = args.tol
    return Tolerances() if base is None else Tolerances(base=base)


def _decide_sequentially(lam, v, tol):
    """Replay the intersection balls one at a time through the incremental
    engine; steps it cannot certify fall back to the batch decision
    internally."""
    from .engine import DecisionReport
    from .geometry import TrivialVerdict, preprocess

    t0 = time.perf_counter()
    first = preprocess([lam[0]], v, tol)
    if isinstance(first, TrivialVerdict):
        # the single-ball start is already settled; hand over to batch mode
        return decide_instance(lam, v, tol)
    state = initial_state(first, tol)
    for ball in lam[1:]:
        state, _ = add_ball(state, ball, tol)
    elapsed = time.perf_counter() - t0
    return DecisionReport(state.witness is None, witness=state.witness,
                          timings={"total": elapsed})


def cmd_decide(args) -> int:
    tol = _tolerances(args)
    lam, v = load_instance(args.path)
    if args.sequential:
        report = _decide_sequentially(lam, v, tol)
    else:
        report = decide_instance(lam, v, tol, use_shortcuts=not args.no_shortcuts)
    if args.json:
        print(json.dumps(report_to_dict(report), indent=2))
    else:
        print(f"covered: {'true' if report.covered else 'false'}")
        if report.trivial_reason:
            print(f"settled in preprocessing: {report.trivial_reason}")
        if report.witness is not None:
            coords = ", ".join(_fmt(c) for c in report.witness)
            print(f"witness: [{coords}]")
        total = report.timings.get("total")
        if total is not None:
            print(f"time: {1000.0 * total:.3f} ms")
    return 0


def cmd_gen(args) -> int:
    config = GenConfig(dim=args.n, p=args.p, q=args.q, sigma=args.sigma,
                       epsilon=args.epsilon, seed=args.seed)
    system = generate(config)
    text = serialize_instance(system.lam, system.v)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_oracle(args) -> int:
    tol = _tolerances(args)
    lam, v = load_instance(args.path)
    from .geometry import BallSystem

    system = BallSystem(lam[0].dim, tuple(lam), tuple(v))
    verdict = None
    if args.step is not None:
        verdict = grid_oracle(system, args.step, tol)
    if (verdict is None or not verdict.conclusive) and args.samples is not None:
        h_verdict = hit_and_run_oracle(system, args.samples, seed=args.seed, tol=tol)
        if verdict is None or h_verdict.conclusive:
            verdict = h_verdict
    if verdict is None:
        print("nothing to do: pass --step and/or --samples", file=sys.stderr)
        return 2
    payload = {
        "found": verdict.conclusive,
        "witness": _json_value(verdict.found_witness),
        "samples_used": verdict.samples_used,
        "conclusive": verdict.conclusive,
    }
    print(json.dumps(payload, indent=2))
    return 0


def cmd_bench(args) -> int:
    tol = _tolerances(args)
    dims = [int(part) for part in args.dims.split(",") if part]
    lines = ["n,mean_ms,sd_ms"]
    means = []
    for n in dims:
        times_ms = []
        attempt = 0
        while len(times_ms) < args.reps:
            seed = args.seed + 7919 * n + attempt
            attempt += 1
            if attempt > 200 * args.reps:
                print(f"n={n}: could not find enough uncovered instances",
                      file=sys.stderr)
                return 2
            system = generate(GenConfig(dim=n, p=3, q=3, seed=seed), tol)
            t0 = time.perf_counter()
            report = decide_instance(list(system.lam), list(system.v), tol)
            elapsed = time.perf_counter() - t0
            if not report.covered:
                times_ms.append(1000.0 * elapsed)
        mean = statistics.fmean(times_ms)
        sd = statistics.stdev(times_ms) if len(times_ms) > 1 else 0.0
        means.append(mean)
        lines.append(f"{n},{_fmt(mean)},{_fmt(sd)}")
    text = "\n".join(lines) + "\n"
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    if len(dims) >= 2:
        a, b, r2 = fit_power_law(dims, [m / 1000.0 for m in means])
        print(f"fit: t = a*n^b with a={a:.3e}, b={b:.3f}, log-log R^2={r2:.3f}",
              file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ballcover",
        description="Decide whether an intersection of open balls is covered "
                    "by a union of closed balls.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_decide = sub.add_parser("decide", help="decide coverage for an instance file")
    p_decide.add_argument("path")
    p_decide.add_argument("--tol", type=float, default=None,
                          help="base strictness tolerance (overrides BALLCOVER_TOL)")
    p_decide.add_argument("--no-shortcuts", action="store_true",
                          help="disable the unboundedness shortcuts (differential testing)")
    p_decide.add_argument("--sequential", action="store_true",
                          help="replay the intersection balls through the incremental engine")
    p_decide.add_argument("--json", action="store_true", help="machine-readable report")
    p_decide.set_defaults(func=cmd_decide)

    p_gen = sub.add_parser("gen", help="generate a random instance")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--p", type=int, required=True)
    p_gen.add_argument("--q", type=int, required=True)
    p_gen.add_argument("--sigma", type=float, default=10.0)
    p_gen.add_argument("--epsilon", type=float, default=5.0)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", default=None)
    p_gen.set_defaults(func=cmd_gen)

    p_oracle = sub.add_parser("oracle", help="solver-free search for an uncovered point")
    p_oracle.add_argument("path")
    p_oracle.add_argument("--step", type=float, default=None, help="grid step (dim <= 3)")
    p_oracle.add_argument("--samples", type=int, default=None, help="hit-and-run samples")
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.add_argument("--tol", type=float, default=None)
    p_oracle.set_defaults(func=cmd_oracle)

    p_bench = sub.add_parser("bench", help="timing scan over dimensions with power-law fit")
    p_bench.add_argument("--dims", default="10,20,50,100,200,400",
                         help="comma-separated dimensions")
    p_bench.add_argument("--reps", type=int, default=10)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--csv", default=None, help="write the table here instead of stdout")
    p_bench.add_argument("--tol", type=float, default=None)
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceFormatError, BallCoverError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
