"""Command-line interface.

    dsmf run <scenario> --out <dir>      simulate + filter, write artifacts
    dsmf certify <scenario>              boundedness certificate as JSON
    dsmf verify <scenario> --kmax N --samples M [--inject-fault]

Exit codes: 0 success/pass, 1 verdict or verification failure, 2 input
error, 3 runtime error (empty belief or oracle cap).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import (
    boundedness_diagnostic,
    verify_decomposition_bound,
    verify_intersection_bound,
)
from .certify import certify_network
from .errors import (
    CertificationError,
    EmptyBeliefError,
    LPConditioningError,
    OracleCapError,
    ScenarioError,
)
from .filtering import STORE_FUSED, STORE_HULLS, run_dsmf
from .graph import source_components
from .scenario import load_scenario
from .sysmodel import Scenario, Tolerances, simulate_truth

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_INPUT = 2
EXIT_RUNTIME = 3


def _fmt(value) -> str:
    return repr(float(value))


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, data) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _apply_tolerances(scenario: Scenario, args) -> Scenario:
    tol = scenario.tolerances
    rank = args.tol_rank if args.tol_rank is not None else tol.rank
    eig = args.tol_eig if args.tol_eig is not None else tol.eig
    if rank == tol.rank and eig == tol.eig:
        return scenario
    return dataclasses.replace(scenario,
                               tolerances=Tolerances(rank=rank, eig=eig))


def cmd_run(args) -> int:
    scenario = _apply_tolerances(load_scenario(args.scenario), args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    trajectory = simulate_truth(scenario)
    try:
        history = run_dsmf(scenario, trajectory, store=STORE_HULLS)
    except EmptyBeliefError as err:
        _write_json(out_dir / "abort.json", {
            "error": "EMPTY_BELIEF",
            "step": err.step,
            "sensor": err.sensor,
            "phase": err.phase,
            "measurement": (None if err.measurement is None
                            else [float(v) for v in err.measurement]),
        })
        print(f"filter aborted: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    n = scenario.plant.dim
    K = scenario.horizon
    _write_csv(
        out_dir / "trajectory.csv",
        ["k"] + [f"x_{d}" for d in range(1, n + 1)],
        [[k] + [_fmt(v) for v in trajectory.state(k)] for k in range(K + 1)],
    )
    plots_dir = out_dir / "plots"
    plots_dir.mkdir(exist_ok=True)
    from .svgplot import error_band_svg

    for i in range(1, scenario.num_sensors + 1):
        rows = []
        bands = {d: ([], []) for d in range(1, n + 1)}
        for k in range(K + 1):
            hull = history.hull(i, k)
            x = trajectory.state(k)
            for d in range(n):
                lo, hi = hull.lower[d], hull.upper[d]
                rows.append([k, d + 1, _fmt(x[d]), _fmt(lo), _fmt(hi),
                             _fmt(lo - x[d]), _fmt(hi - x[d])])
                bands[d + 1][0].append(lo - x[d])
                bands[d + 1][1].append(hi - x[d])
        _write_csv(out_dir / f"sensor_{i:02d}.csv",
                   ["k", "dim", "true", "lower", "upper",
                    "err_lower", "err_upper"],
                   rows)
        steps = list(range(K + 1))
        for d in range(1, n + 1):
            svg = error_band_svg(steps, bands[d][0], bands[d][1],
                                 f"sensor {i}, dim {d}: error range")
            (plots_dir / f"sensor_{i:02d}_dim{d}.svg").write_text(svg)
    early = (K // 4, K // 2)
    tail = (3 * K // 4, K)
    diag = boundedness_diagnostic(history, early, tail)
    _write_json(out_dir / "summary.json", {
        "scenario": str(args.scenario),
        "horizon": K,
        "seed": scenario.seed,
        "reduction": {"max_gen": scenario.max_gen,
                      "max_con": scenario.max_con},
        "windows": {"early": list(early), "tail": list(tail)},
        "diagnostics": [dataclasses.asdict(entry) for entry in diag],
    })
    _write_csv(out_dir / "diagnostics.csv",
               ["sensor", "dim", "early_max", "tail_max", "ratio", "flag"],
               [[e.sensor, e.dim, _fmt(e.early_max), _fmt(e.tail_max),
                 _fmt(e.ratio), e.flag] for e in diag])
    return EXIT_OK


def cmd_certify(args) -> int:
    scenario = _apply_tolerances(load_scenario(args.scenario), args)
    report = certify_network(scenario)
    print(report.to_json_text())
    return EXIT_OK if report.certified else EXIT_VERDICT


def cmd_verify(args) -> int:
    scenario = _apply_tolerances(load_scenario(args.scenario), args)
    kmax = args.kmax
    if kmax < 0:
        raise ScenarioError(ScenarioError.BAD_VALUE, "--kmax",
                            "must be non-negative")
    scenario = dataclasses.replace(scenario, horizon=kmax)
    trajectory = simulate_truth(scenario)
    history = run_dsmf(scenario, trajectory, store=STORE_FUSED)
    reports = []
    for comp in source_components(scenario.graph):
        eccs = comp.member_eccentricities
        reps = sorted({min(comp.vertices),
                       max(comp.vertices, key=lambda v: (eccs[v], v))})
        for i in reps:
            for k in sorted({0, kmax}):
                rep = verify_intersection_bound(
                    scenario, trajectory, history, k, i,
                    samples=args.samples, inject_fault=args.inject_fault,
                )
                reports.append(rep)
        if kmax > comp.rho_tilde:
            rep = verify_decomposition_bound(
                scenario, trajectory, history, comp, min(comp.vertices),
                kmax, samples=args.samples,
                inject_fault=args.inject_fault,
            )
            reports.append(rep)
    payload = {
        "kmax": kmax,
        "samples": args.samples,
        "inject_fault": bool(args.inject_fault),
        "reports": [r.as_json() for r in reports],
        "all_passed": all(r.passed for r in reports),
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK if payload["all_passed"] else EXIT_VERDICT


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--tol-rank", type=float, default=None,
                        help="override the rank-decision tolerance")
    shared.add_argument("--tol-eig", type=float, default=None,
                        help="override the unit-circle tolerance")
    parser = argparse.ArgumentParser(
        prog="dsmf",
        description="distributed set-membership filtering toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", parents=[shared],
                           help="simulate and filter, writing artifacts")
    p_run.add_argument("scenario")
    p_run.add_argument("--out", required=True,
                       help="output directory for CSV/JSON/SVG artifacts")
    p_run.set_defaults(func=cmd_run)
    p_cert = sub.add_parser("certify", parents=[shared],
                            help="print the boundedness certificate")
    p_cert.add_argument("scenario")
    p_cert.set_defaults(func=cmd_certify)
    p_ver = sub.add_parser("verify", parents=[shared],
                           help="run the sampled outer-bound checks")
    p_ver.add_argument("scenario")
    p_ver.add_argument("--kmax", type=int, default=6)
    p_ver.add_argument("--samples", type=int, default=100)
    p_ver.add_argument("--inject-fault", action="store_true",
                       help="corrupt one measurement; checks must fail")
    p_ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as err:
        print(f"input error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except (EmptyBeliefError, OracleCapError, LPConditioningError,
            CertificationError) as err:
        print(f"runtime error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
