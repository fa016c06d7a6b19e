"""Command-line pipeline: ``gen``, ``dist``, ``solve``, ``export``, ``qubo``.

Exit codes: 0 success (feasible best solution), 2 usage, 3 invalid input,
4 best solution infeasible, 5 I/O or network failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .distance import DistanceBackend, DistanceError, cached_build_matrices
from .formats import (
    read_instance,
    read_sites,
    read_solution,
    write_instance,
    write_solution,
)
from .generate import GridSpec, generate_grid_instance
from .metrics import export_geojson, station_metrics
from .model import (
    ProblemInstance,
    SiteKind,
    ValidationError,
    Weights,
    default_lambda,
    gamma_rule,
    validate_instance,
)
from .qubo import build_qubo, write_qubo
from .solvers import SOLVERS, AnnealSchedule, BudgetExceeded, solve, solve_repeated

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_INFEASIBLE = 4
EXIT_IO = 5

OSRM_ENV = "EVSITING_OSRM_ENDPOINT"

log = logging.getLogger("evsiting")


def _write_json(path, doc):
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def cmd_gen(args) -> int:
    spec = GridSpec(
        width_km=args.width, height_km=args.height, n_pois=args.pois, n_existing=args.existing,
        n_candidates=args.candidates, cs_count=args.cs, seed=args.seed,
    )
    inst = generate_grid_instance(spec)
    write_instance(inst, args.output)
    log.info("wrote %s (P=%d X=%d E=%d CS=%d)", args.output, inst.n_pois, inst.n_existing,
             inst.n_candidates, inst.cs_count)
    return EXIT_OK


def cmd_dist(args) -> int:
    pois = read_sites(args.pois, SiteKind.POI)
    existing = read_sites(args.existing, SiteKind.EXISTING) if args.existing else []
    candidates = read_sites(args.candidates, SiteKind.CANDIDATE)
    if args.backend == "osrm":
        endpoint = args.endpoint or os.environ.get(OSRM_ENV, "")
        if not endpoint:
            raise ValidationError("bad-backend", f"--endpoint or ${OSRM_ENV} is required for osrm")
        backend = DistanceBackend("osrm", endpoint, args.profile)
    else:
        backend = DistanceBackend("haversine")
    mset, hit = cached_build_matrices(
        pois, existing, candidates, backend, args.cache_dir,
        **({"workers": args.workers} if backend.mode == "osrm" else {}),
    )
    inst = validate_instance(ProblemInstance(
        pois, existing, candidates, args.cs, mset.d, mset.e, mset.q, provenance=mset.provenance,
    ))
    write_instance(inst, args.output)
    log.info("wrote %s (%s)", args.output, "cached matrices" if hit else "fresh matrices")
    return EXIT_OK


def _weights(args, inst) -> Weights:
    names = ("gamma1", "gamma2", "gamma3")
    gammas = list(gamma_rule(inst.n_candidates)) if args.weights == "auto" else [None] * 3
    for k, name in enumerate(names):
        if getattr(args, name) is not None:
            gammas[k] = getattr(args, name)
    missing = [n for n, g in zip(names, gammas) if g is None]
    if missing:
        raise ValidationError("bad-weight", f"--weights explicit needs --{' --'.join(missing)}")
    lam = args.lambda_card if args.lambda_card is not None else default_lambda(inst, gammas)
    return Weights(*gammas, lambda_card=lam)


def cmd_solve(args) -> int:
    inst = validate_instance(read_instance(args.instance))
    w = _weights(args, inst)
    base = AnnealSchedule(
        t_initial=args.t_initial, t_final=args.t_final, sweeps=args.sweeps, reads=args.reads,
        seed=args.seed,
    )

    def run(seed):
        return solve(inst, w, args.solver, replace(base, seed=seed), workers=args.workers,
                     budget=args.budget)

    report = run(args.seed) if args.repeats == 1 else solve_repeated(run, args.repeats, args.seed)
    write_solution(inst, report, args.output)
    summary = station_metrics(
        inst, report.best, w, solver={"name": report.solver_name, "seed": report.seed},
    ) if report.best.any() else None
    if args.report:
        doc = {
            "solver": report.solver_name,
            "seed": report.seed,
            "weights": w.__dict__,
            "schedule": {k: getattr(base, k) for k in ("t_initial", "t_final", "sweeps", "reads")},
            "repeats": args.repeats,
            "feasible": report.feasible,
            "best_energy": report.best_energy,
            "objective": report.best_objective._asdict(),
            "selected": report.selected,
            "wall_time_s": report.wall_time,
            "n_reads": int(np.size(report.read_energies)),
            "metrics": summary.to_dict() if summary else None,
        }
        _write_json(args.report, doc)
    if summary is not None:
        table = summary.format_table()
        if args.metrics:
            Path(args.metrics).write_text(table + "\n")
        print(table)
    log.info("%s: Z_total=%.6g feasible=%s wall=%.3fs", report.solver_name,
             report.best_objective.total, report.feasible, report.wall_time)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_export(args) -> int:
    inst = validate_instance(read_instance(args.instance))
    sol = read_solution(args.solution)
    if len(sol["x"]) != inst.n_candidates:
        raise ValidationError(
            "length-mismatch",
            f"solution has {len(sol['x'])} entries but the instance has {inst.n_candidates} candidates",
        )
    _write_json(args.output, export_geojson(inst, sol["x"]))
    return EXIT_OK


def cmd_qubo(args) -> int:
    inst = validate_instance(read_instance(args.instance))
    write_qubo(build_qubo(inst, _weights(args, inst)), args.output)
    return EXIT_OK


def _add_weight_flags(p):
    p.add_argument("--weights", choices=("auto", "explicit"), default="auto",
                   help="auto: gamma = (4E, E/3, 1.7E); explicit flags below override")
    p.add_argument("--gamma1", type=float)
    p.add_argument("--gamma2", type=float)
    p.add_argument("--gamma3", type=float)
    p.add_argument("--lambda", dest="lambda_card", type=float, help="cardinality penalty weight")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evsiting", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("-q", "--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic grid instance")
    p.add_argument("--width", type=float, default=20.0, help="km")
    p.add_argument("--height", type=float, default=20.0, help="km")
    p.add_argument("--pois", type=int, required=True)
    p.add_argument("--existing", type=int, required=True)
    p.add_argument("--candidates", type=int, required=True)
    p.add_argument("--cs", type=int, required=True, help="stations to open")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("dist", help="build distance matrices from site files")
    p.add_argument("--pois", required=True, help="CSV (id,lat,lon,tag) or GeoJSON")
    p.add_argument("--existing")
    p.add_argument("--candidates", required=True)
    p.add_argument("--cs", type=int, required=True)
    p.add_argument("--backend", choices=("haversine", "osrm"), default="haversine")
    p.add_argument("--endpoint", help=f"OSRM base URL (default ${OSRM_ENV})")
    p.add_argument("--profile", default="driving")
    p.add_argument("--cache-dir", default=".evsiting-cache")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("instance")
    p.add_argument("--solver", choices=SOLVERS, default="sa-swap")
    _add_weight_flags(p)
    p.add_argument("--reads", type=int, default=1000)
    p.add_argument("--sweeps", type=int, default=1000)
    p.add_argument("--t-initial", type=float)
    p.add_argument("--t-final", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=1, help="outer best-of-N solver runs")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--budget", type=int, default=50_000_000, help="max subsets for exact")
    p.add_argument("-o", "--output", required=True, help="solution file")
    p.add_argument("--report", help="machine-readable run report (JSON)")
    p.add_argument("--metrics", help="per-station metrics table (text)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("export", help="GeoJSON of an instance and a solution")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("qubo", help="write the QUBO in sparse text form")
    p.add_argument("instance")
    _add_weight_flags(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_qubo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)
    try:
        return args.func(args)
    except (ValidationError, BudgetExceeded) as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION
    except DistanceError as exc:
        log.error("%s: %s", exc.code, exc)
        return EXIT_IO
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        log.error("%s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
