"""Command-line front end.

One verb per capability: bands, breakpoints, perturb, construct, ids,
check-homogeneity, lift-hull. Operators, spectra and certificates travel
as JSON (floats at full round-trip precision); grids dump as CSV. Exit
codes: 0 success, 2 validation/parse, 3 numeric failure, 4 search failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

from .errors import InvalidArgument, NumericFailure, SearchFailure
from .floquet import DEFAULT_MERGE_TOL, band_spectrum, break_points
from .gapopen import find_generic, perturb_last
from .homogenize import (
    ConstructionRun,
    ac_decay_certificate,
    cantor_certificate,
    construct,
    verify_step_homogeneity,
)
from .hull import HullSpec, lift_run
from .ids import band_length_check, hs_lower_bound, ids_density, phase_increment
from .intervals import IntervalSet, homogeneity_profile
from .jacobi import PeriodicJacobi

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3
EXIT_SEARCH = 4


def _thread_count():
    raw = os.environ.get("JACOBISPEC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InvalidArgument(f"JACOBISPEC_THREADS must be an integer, got {raw!r}")


def _dumps(data):
    return json.dumps(data, indent=2, allow_nan=False) + "\n"


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(data, path=None):
    text = _dumps(data)
    if path:
        _atomic_write(path, text)
    else:
        sys.stdout.write(text)


def _read_json(path):
    try:
        with open(path) as handle:
            return json.load(handle)
    except OSError as exc:
        raise InvalidArgument(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"malformed JSON in {path}: {exc}")


def _load_operator(path):
    data = _read_json(path)
    if not isinstance(data, dict):
        raise InvalidArgument(f"{path}: operator JSON must be an object")
    return PeriodicJacobi.from_json_dict(data)


def _spectrum_csv(spectrum):
    lines = ["band,lo,hi,length"]
    for i, (lo, hi) in enumerate(spectrum.bands):
        lines.append(f"{i},{lo!r},{hi!r},{(hi - lo)!r}")
    return "\n".join(lines) + "\n"


def cmd_bands(args):
    operator = _load_operator(args.operator)
    spectrum = band_spectrum(operator, merge_tol=args.merge_tol)
    if args.csv:
        _atomic_write(args.csv, _spectrum_csv(spectrum))
    _emit(spectrum.to_json_dict(), args.output)
    return EXIT_OK


def cmd_breakpoints(args):
    operator = _load_operator(args.operator)
    pts = break_points(operator, args.k, merge_tol=args.merge_tol)
    data = pts.to_json_dict()
    data["min_spacing_proper"] = pts.min_spacing(proper_only=True)
    _emit(data, args.output)
    return EXIT_OK


def cmd_perturb(args):
    operator = _load_operator(args.operator)
    if args.t is not None:
        potential = perturb_last(operator.b, args.k, args.t)
        shift = args.t
    else:
        if args.eps_budget is None:
            raise InvalidArgument("need either --t or --eps-budget")
        gap_tol = args.gap_tol
        if gap_tol is None:
            gap_tol = args.eps_budget / 1000.0
        potential, shift = find_generic(
            operator, args.k, args.eps_budget, gap_tol, merge_tol=args.merge_tol
        )
    perturbed = PeriodicJacobi(operator.a, potential)
    payload = {"t_used": shift, "operator": perturbed.to_json_dict()}
    _emit(payload, args.output)
    return EXIT_OK


def _validate_config(config):
    if not isinstance(config, dict):
        raise InvalidArgument("config must be a JSON object")
    required = {"b0", "a", "tau", "eps", "ks", "n_steps"}
    missing = required - config.keys()
    if missing:
        raise InvalidArgument(f"config missing keys: {sorted(missing)}")
    allowed = required | {"options"}
    unknown = config.keys() - allowed
    if unknown:
        raise InvalidArgument(f"config has unknown keys: {sorted(unknown)}")
    options = config.get("options", {})
    if not isinstance(options, dict):
        raise InvalidArgument("options must be an object")
    allowed_options = {
        "ac_term",
        "merge_tol",
        "max_candidates",
        "seed",
        "window_len",
        "n_delta",
        "n_interior",
    }
    unknown = options.keys() - allowed_options
    if unknown:
        raise InvalidArgument(f"options has unknown keys: {sorted(unknown)}")
    for key in ("b0", "a", "ks"):
        if not isinstance(config[key], list) or not config[key]:
            raise InvalidArgument(f"config key {key!r} must be a nonempty list")
    return options


def cmd_construct(args):
    config = _read_json(args.config)
    options = _validate_config(config)
    run = construct(
        config["b0"],
        config["a"],
        config["tau"],
        config["eps"],
        config["ks"],
        config["n_steps"],
        ac_term=bool(options.get("ac_term", True)),
        merge_tol=float(options.get("merge_tol", DEFAULT_MERGE_TOL)),
        max_candidates=int(options.get("max_candidates", 64)),
    )
    n_delta = int(options.get("n_delta", 64))
    n_interior = int(options.get("n_interior", 64))
    threads = _thread_count()

    def _verify(step_index):
        return verify_step_homogeneity(
            run, step_index, n_delta=n_delta, n_interior=n_interior
        )

    indices = range(len(run.steps))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            homogeneity = list(pool.map(_verify, indices))
    else:
        homogeneity = [_verify(i) for i in indices]

    window_len = options.get("window_len")
    if window_len is None:
        deepest = run.steps[-1]
        window_len = 1.25 * 4.0 * math.pi * run.coupling() ** 2 / deepest.period
    cantor = cantor_certificate(run, float(window_len))
    decay = ac_decay_certificate(run)

    payload = {
        "config": config,
        "status": run.status,
        "run": run.to_json_dict(),
        "certificates": {
            "homogeneity": [rep.to_json_dict() for rep in homogeneity],
            "cantor": cantor.to_json_dict(),
            "decay": decay.to_json_dict(),
        },
        "tolerances": {
            "merge_tol": float(options.get("merge_tol", DEFAULT_MERGE_TOL)),
            "slack_tol": 1e-12,
            "gap_tol_fraction": 1e-3,
            "saturation_rel": 1e-15,
        },
    }
    os.makedirs(args.outdir, exist_ok=True)
    _atomic_write(os.path.join(args.outdir, "run.json"), _dumps(payload))
    for step in run.steps:
        _atomic_write(
            os.path.join(args.outdir, f"spectrum_step_{step.index}.csv"),
            _spectrum_csv(step.spectrum),
        )
    summary = {
        "status": run.status,
        "steps_completed": run.refinement_count(),
        "final_period": run.steps[-1].period,
        "homogeneity_pass": all(rep.passed for rep in homogeneity),
        "cantor_status": cantor.status,
        "decay_pass": decay.passed,
        "outdir": args.outdir,
    }
    sys.stdout.write(_dumps(summary))
    return EXIT_OK


def cmd_ids(args):
    operator = _load_operator(args.operator)
    if args.grid < 1:
        raise InvalidArgument("--grid must be at least 1")
    spectrum = band_spectrum(operator, merge_tol=args.merge_tol)
    margin = args.edge_margin
    lines = ["E,dk_dE,hs_lower,band_index"]
    for idx, (lo, hi) in enumerate(spectrum.bands):
        pad = margin * (hi - lo)
        step = (hi - lo - 2 * pad) / (args.grid + 1)
        for i in range(args.grid):
            energy = lo + pad + step * (i + 1)
            density = ids_density(operator, energy, spectrum=spectrum, edge_margin=margin)
            lower = hs_lower_bound(operator, energy, spectrum=spectrum, edge_margin=margin)
            lines.append(f"{energy!r},{density!r},{lower!r},{idx}")
    csv_text = "\n".join(lines) + "\n"
    if args.csv:
        _atomic_write(args.csv, csv_text)
    else:
        sys.stdout.write(csv_text)
    summary = {
        "band_length": band_length_check(operator, spectrum=spectrum).to_json_dict(),
        "phase_increments": [
            phase_increment(operator, i, spectrum=spectrum)
            for i in range(spectrum.band_count)
        ],
    }
    _emit(summary, args.summary)
    return EXIT_OK


def cmd_check_homogeneity(args):
    data = _read_json(args.input)
    if isinstance(data, list):
        sets = IntervalSet.from_json(data)
    elif isinstance(data, dict):
        operator = PeriodicJacobi.from_json_dict(data)
        sets = band_spectrum(operator, merge_tol=args.merge_tol).interval_set()
    else:
        raise InvalidArgument("input must be an operator object or interval list")
    delta_max = args.delta_max
    if delta_max is None:
        delta_max = min(hi - lo for lo, hi in sets.intervals if hi > lo)
    report = homogeneity_profile(
        sets, args.tau, delta_max, n_delta=args.n_delta, n_points=args.n_points
    )
    _emit(report.to_json_dict(), args.output)
    return EXIT_OK


def cmd_lift_hull(args):
    payload = _read_json(args.run)
    run_data = payload.get("run", payload) if isinstance(payload, dict) else None
    if run_data is None or "steps" not in run_data:
        raise InvalidArgument("input does not look like a construction run")
    run = ConstructionRun.from_json_dict(run_data)
    if args.indices:
        try:
            indices = [int(tok) for tok in args.indices.split(",")]
        except ValueError:
            raise InvalidArgument(f"bad --indices list: {args.indices!r}")
        hull = HullSpec(indices=indices)
    elif args.padic:
        hull = HullSpec.padic(args.padic, args.depth)
    else:
        raise InvalidArgument("need --indices or --padic")
    functions = lift_run(run, hull, args.q0)
    payload = {
        "hull": {"indices": hull.indices, "label": hull.label},
        "q0": args.q0,
        "functions": [f.to_json_dict() for f in functions],
    }
    _emit(payload, args.output)
    return EXIT_OK


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="jacobispec",
        description=(
            "Band spectra, break points, gap opening, homogeneous Cantor "
            "spectrum constructions and density of states for periodic "
            "Jacobi operators"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_merge_tol(p):
        p.add_argument(
            "--merge-tol",
            type=float,
            default=DEFAULT_MERGE_TOL,
            help="relative closed-gap merge tolerance",
        )

    p = sub.add_parser("bands", help="band spectrum of an operator")
    p.add_argument("operator", help="operator JSON file {p, a, b}")
    p.add_argument("--output", help="write JSON here instead of stdout")
    p.add_argument("--csv", help="also write one band per row as CSV")
    add_merge_tol(p)
    p.set_defaults(func=cmd_bands)

    p = sub.add_parser("breakpoints", help="k-break points of an operator")
    p.add_argument("operator")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--output")
    add_merge_tol(p)
    p.set_defaults(func=cmd_breakpoints)

    p = sub.add_parser("perturb", help="tile k periods and shift the last entry")
    p.add_argument("operator")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=float, help="explicit shift; skips the search")
    p.add_argument("--eps-budget", type=float, help="search budget for a generic shift")
    p.add_argument("--gap-tol", type=float)
    p.add_argument("--output")
    add_merge_tol(p)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("construct", help="run the iterated refinement from a config")
    p.add_argument("config", help="config JSON {b0, a, tau, eps, ks, n_steps, options}")
    p.add_argument("--outdir", default="construct-out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("ids", help="density of states over band-interior grids")
    p.add_argument("operator")
    p.add_argument("--grid", type=int, default=100, help="points per band")
    p.add_argument("--csv", help="CSV output path (stdout otherwise)")
    p.add_argument("--summary", help="summary JSON path (stdout otherwise)")
    p.add_argument("--edge-margin", type=float, default=1e-6)
    add_merge_tol(p)
    p.set_defaults(func=cmd_ids)

    p = sub.add_parser(
        "check-homogeneity",
        help="worst-case ball density of a spectrum or interval set",
    )
    p.add_argument("input", help="operator JSON object or [[lo,hi],...] list")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--delta-max", type=float)
    p.add_argument("--n-delta", type=int, default=64)
    p.add_argument("--n-points", type=int, default=64)
    p.add_argument("--output")
    add_merge_tol(p)
    p.set_defaults(func=cmd_check_homogeneity)

    p = sub.add_parser("lift-hull", help="lift a run onto a quotient chain")
    p.add_argument("run", help="run JSON produced by construct")
    p.add_argument("--indices", help="comma-separated chain n1,n2,...")
    p.add_argument("--padic", type=int, help="base for a p-adic chain")
    p.add_argument("--depth", type=int, default=8, help="chain depth for --padic")
    p.add_argument("--q0", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_lift_hull)

    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidArgument as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SearchFailure as exc:
        print(f"search failure: {exc}", file=sys.stderr)
        return EXIT_SEARCH


if __name__ == "__main__":
    sys.exit(main())
