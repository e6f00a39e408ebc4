"""Command-line front end: graph export, simulation runs, sweeps, oracle
cross-checks, and amplitude calibration.

Batch tool: plain CSV/JSON outputs with embedded parameter metadata, no
interactive mode.  Exit codes: 0 success, 2 usage, 3 numerical contract
violation, 4 resource cap.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import NumericalContractError, ResourceCapError
from .fidelity import SweepSpec, average_fidelity, run_sweep, sweep_csv, transfer_read_time
from .flux import (DEFAULT_STEPS_PER_PI, default_steps, information_flux, max_alpha,
                   propagate, series_csv, summary)
from .graph import build_graph, export_dot, generator_matrices, graph_json
from .oracle import (SiteAssignment, dump_state_json, ghz_compare, heisenberg_expectation,
                     monte_carlo_average_fidelity, product_state)
from .pulses import ideal_schedule, schedule_from_json, sin_power_hump, boxcar_shape, \
    calibrate_amplitude, sin_power_schedule, square_schedule, step_grid


def _write(text: str, path: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _meta_lines(command: str, params: dict) -> str:
    pairs = " ".join(f"{k}={v}" for k, v in params.items())
    return f"# spinkick {command} version={__version__}\n# {pairs}\n"


def _schedule_params(schedule) -> dict:
    d = schedule.to_json()
    d.pop("slots", None)
    return d


def _make_schedule(args) -> object:
    chosen = [x for x in ("scheme", "sin_m", "square_delta", "schedule") if getattr(args, x, None)]
    if len(chosen) != 1:
        raise ValueError("choose exactly one of --scheme, --sin-m, --square-delta, --schedule")
    if args.schedule:
        schedule = schedule_from_json(json.loads(Path(args.schedule).read_text()))
        if args.n_sites and args.n_sites != schedule.n_sites:
            raise ValueError(f"--n-sites {args.n_sites} conflicts with schedule file "
                             f"(N={schedule.n_sites})")
        return schedule
    if not args.n_sites:
        raise ValueError("--n-sites is required")
    if args.scheme:
        return ideal_schedule(args.n_sites, args.scheme, args.kick_duration)
    if args.sin_m:
        return sin_power_schedule(args.n_sites, args.sin_m)
    return square_schedule(args.n_sites, args.square_delta)


def _steps_for(args, schedule) -> int:
    if args.steps:
        return args.steps
    if args.steps_per_pi:
        return max(1, math.ceil(args.steps_per_pi * schedule.total_time / math.pi))
    return default_steps(schedule)


def _add_schedule_flags(p: argparse.ArgumentParser, with_n: bool = True):
    if with_n:
        p.add_argument("--n-sites", type=int, help="chain length N")
    p.add_argument("--scheme", choices=["JxJy", "JxB"], help="ideal kick scheme")
    p.add_argument("--kick-duration", type=float, default=1.0)
    p.add_argument("--sin-m", type=int, help="sin^m/cos^m schedule with this even m")
    p.add_argument("--square-delta", type=float, help="square-pulse schedule sharpness")
    p.add_argument("--schedule", help="JSON schedule file")
    p.add_argument("--steps", type=int, help="explicit step count")
    p.add_argument("--steps-per-pi", type=int, help="steps per pi of total time")


def cmd_graph(args) -> int:
    channels = tuple(args.channels.split(","))
    g = build_graph(args.n_sites, channels)
    if args.format == "dot":
        _write(export_dot(g), args.out)
    else:
        _write(json.dumps(graph_json(g), indent=2) + "\n", args.out)
    return 0


def cmd_simulate(args) -> int:
    schedule = _make_schedule(args)
    n = schedule.n_sites
    n_steps = _steps_for(args, schedule)
    seed = 1 if args.seed_node == "X" else n + 1
    k = generator_matrices(build_graph(n))
    result = propagate(k, schedule, n_steps, seed=seed)
    meta = {"n_steps": n_steps, "seed_node": args.seed_node, **_schedule_params(schedule)}
    csv_text = _meta_lines("simulate", meta) + series_csv(result)
    _write(csv_text, args.out)
    report = {"meta": meta, **summary(result)}
    text = json.dumps(report, indent=2) + "\n"
    if args.summary:
        _write(text, args.summary)
    elif args.out != "-":
        sys.stdout.write(text)
    return 0


def _parse_sweep_file(path: str) -> SweepSpec:
    raw = Path(path).read_text()
    if raw.lstrip().startswith("{"):
        data = json.loads(raw)
    else:
        data = {"fixed": {}}
        for line in raw.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key == "values":
                data["values"] = [float(v) for v in val.split(",") if v.strip()]
            elif key.startswith("fixed."):
                num = float(val)
                data["fixed"][key[6:]] = int(num) if num.is_integer() else num
            elif key == "steps_per_pi":
                data["steps_per_pi"] = int(val)
            else:
                data[key] = val
    return SweepSpec(
        schedule_family=data.get("schedule_family", data.get("family", "")),
        swept_parameter=data.get("swept_parameter", data.get("sweep", "")),
        values=tuple(data.get("values", ())),
        fixed=dict(data.get("fixed", {})),
        steps_per_pi=int(data.get("steps_per_pi", DEFAULT_STEPS_PER_PI)),
    )


def cmd_sweep(args) -> int:
    spec = _parse_sweep_file(args.spec_file)
    rows = run_sweep(spec)
    meta = {"family": spec.schedule_family, "sweep": spec.swept_parameter,
            "fixed": json.dumps(spec.fixed, sort_keys=True),
            "steps_per_pi": spec.steps_per_pi}
    text = _meta_lines("sweep", meta) + sweep_csv(rows)
    failures = [r for r in rows if r.error]
    for r in failures:
        text += f"# row {r.param_value:g} failed: {r.error}\n"
    _write(text, args.out)
    return 0


def cmd_oracle_compare(args) -> int:
    schedule = _make_schedule(args)
    n = schedule.n_sites
    n_steps = _steps_for(args, schedule)
    k = generator_matrices(build_graph(n))
    result = propagate(k, schedule, n_steps)
    rest = SiteAssignment.uniform(n - 1, "Z", 1)
    predicted = information_flux(result, rest)[("X", "X")]
    psi0 = product_state(SiteAssignment([("X", 1)] + [("Z", 1)] * (n - 1)))
    times, measured = heisenberg_expectation("X", psi0, schedule, n_steps)
    if len(times) != len(result.times) or np.max(np.abs(times - result.times)) > 1e-12:
        raise NumericalContractError("flux and oracle grids do not match")
    deviation = float(np.max(np.abs(predicted - measured)))
    report = {
        "meta": {"n_steps": n_steps, **_schedule_params(schedule)},
        "max_deviation": deviation,
        "grid_points": len(times),
    }
    _write(json.dumps(report, indent=2) + "\n", args.out)
    return 0


def cmd_oracle_fidelity(args) -> int:
    schedule = _make_schedule(args)
    n = schedule.n_sites
    n_steps = _steps_for(args, schedule)
    k = generator_matrices(build_graph(n))
    result = propagate(k, schedule, n_steps)
    if args.read_time == "end":
        read_time = schedule.total_time
    elif args.read_time == "auto":
        # best joint-transfer time per the flux prediction
        read_time, _, _ = transfer_read_time(schedule, n_steps)
    else:
        read_time = float(args.read_time)
    alpha_at_read = float(np.interp(read_time, result.times, result.alpha_series(n)))
    closed_form = average_fidelity(alpha_at_read)
    mean, stderr = monte_carlo_average_fidelity(
        schedule, args.samples, args.seed, read_time=read_time, n_steps=n_steps)
    report = {
        "meta": {"n_steps": n_steps, "samples": args.samples, "seed": args.seed,
                 **_schedule_params(schedule)},
        "read_time": read_time,
        "monte_carlo_mean": mean,
        "monte_carlo_stderr": stderr,
        "closed_form": closed_form,
        "difference": mean - closed_form,
    }
    _write(json.dumps(report, indent=2) + "\n", args.out)
    return 0


def cmd_oracle_ghz(args) -> int:
    assignment = SiteAssignment.parse(" ".join(args.sites))
    schedule = ideal_schedule(assignment.n_sites, args.scheme, args.kick_duration)
    report = ghz_compare(assignment, schedule)
    out = {
        "meta": {"sites": str(assignment), "scheme": args.scheme},
        "n_sites": assignment.n_sites,
        "phase_index": report.phase_index,
        "fidelity": report.fidelity,
    }
    if args.dump_state:
        _write(dump_state_json(report.evolved) + "\n", args.dump_state)
    _write(json.dumps(out, indent=2) + "\n", args.out)
    return 0


def cmd_calibrate(args) -> int:
    if (args.sin_m is None) == (args.boxcar_width is None):
        raise ValueError("choose exactly one of --sin-m, --boxcar-width")
    if args.sin_m is not None:
        shape, window = sin_power_hump(args.sin_m)
        name = f"sin^{args.sin_m}"
    else:
        shape, window = boxcar_shape(args.boxcar_width)
        name = f"boxcar({args.boxcar_width:g})"
    amplitude = calibrate_amplitude(shape, window, args.target_area)
    report = {
        "meta": {"shape": name, "target_area": args.target_area},
        "amplitude": amplitude,
        "window": list(window),
    }
    _write(json.dumps(report, indent=2) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinkick",
        description="Kicked-coupling spin chain transfer toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("graph", help="export the operator graph")
    p.add_argument("n_sites", type=int)
    p.add_argument("--channels", default="Jx,Jy,B")
    p.add_argument("--format", choices=["dot", "json"], default="dot")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("simulate", help="propagate the coefficient vector")
    _add_schedule_flags(p)
    p.add_argument("--seed-node", choices=["X", "Y"], default="X")
    p.add_argument("--out", default="-", help="CSV destination ('-' for stdout)")
    p.add_argument("--summary", help="JSON summary destination")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run a parameter sweep from a spec file")
    p.add_argument("spec_file")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)

    po = sub.add_parser("oracle", help="exact state-vector cross-checks")
    osub = po.add_subparsers(dest="oracle_command", required=True)

    p = osub.add_parser("compare", help="flux prediction vs exact <X_N(t)>")
    _add_schedule_flags(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_oracle_compare)

    p = osub.add_parser("fidelity", help="Monte-Carlo average fidelity vs closed form")
    _add_schedule_flags(p)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=20260825)
    p.add_argument("--read-time", default="auto",
                   help="'auto' (best joint transfer), 'end', or a time")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_oracle_fidelity)

    p = osub.add_parser("ghz", help="verify entangled-state generation under ideal kicks")
    p.add_argument("--sites", required=True, nargs="+",
                   help="per-site tokens, e.g. X+ Z+ Z+ X+ (aliases 0,1,+,-)")
    p.add_argument("--scheme", choices=["JxJy", "JxB"], default="JxJy")
    p.add_argument("--kick-duration", type=float, default=1.0)
    p.add_argument("--dump-state", help="write the evolved state as JSON")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_oracle_ghz)

    p = sub.add_parser("calibrate", help="pulse amplitude for a target area")
    p.add_argument("--sin-m", type=int)
    p.add_argument("--boxcar-width", type=float)
    p.add_argument("--target-area", type=float, default=math.pi / 4)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_calibrate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except NumericalContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
