"""Command-line pipeline: synth, solve, evaluate, sweep, embed, serve.

Every subcommand reads a dataset directory, writes its artifacts under an
output directory, and exits 0 on success, 1 on runtime failure (with a
machine-readable error report on stderr), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import replace
from typing import Optional, Sequence

import numpy as np

from . import analysis, cost, fairness, ingest, optimizer, population

DEFAULT_CONFIG = {
    "alpha": 1.0,
    "beta": 100.0,
    "lambda_bar": 1.0,
    "tau_bar": 1.0,
    "step_mode": "fixed",
    "max_iters": 1000,
    "r_scaling": 50,
    "seed": 0,
    "eps_floor": 1e-6,
    "admin_fraction": 0.01,
    "public_fraction": 0.02,
    "lock_strength": 1e8,
    "fairness_rounds": 50,
}


def load_config(path: Optional[str]) -> dict:
    config = dict(DEFAULT_CONFIG)
    if path:
        with open(path) as fh:
            config.update(json.load(fh))
    return config


def _hyper_from(config: dict, args) -> optimizer.HyperParams:
    return optimizer.HyperParams(
        alpha=config["alpha"],
        beta=getattr(args, "beta", None) or config["beta"],
        lambda_bar=getattr(args, "lambda_bar", None) or config["lambda_bar"],
        tau_bar=_first_not_none(getattr(args, "tau_bar", None), config["tau_bar"]),
        step_mode=getattr(args, "step_mode", None) or config["step_mode"],
        max_iters=getattr(args, "iters", None) or config["max_iters"],
        r_scaling=config["r_scaling"],
    )


def _first_not_none(*values):
    for v in values:
        if v is not None:
            return v
    return None


def _float_list(raw: str) -> list[float]:
    return [float(tok) for tok in raw.split(",") if tok.strip()]


def _parse_groups(specs: Sequence[str], schema) -> list[fairness.GroupSpec]:
    """Group flags look like dim0=d0c1 or race=black|asian."""
    groups = []
    for spec in specs:
        dim, _, cats = spec.partition("=")
        if not cats:
            raise ValueError(f"bad group spec {spec!r}; expected dim=cat[|cat...]")
        g = fairness.GroupSpec(dimension=dim, disadvantaged=frozenset(cats.split("|")))
        g.validate_against(schema)
        groups.append(g)
    return groups


def _default_groups(schema) -> list[fairness.GroupSpec]:
    """One group per dimension: everything except the first (majority) category."""
    groups = []
    for name, cats in schema.dimensions:
        if len(cats) > 1:
            groups.append(
                fairness.GroupSpec(dimension=name, disadvantaged=frozenset(cats[1:]))
            )
    return groups


def _prepare_problem(ds: ingest.Dataset, config: dict, seed: int, rounds: int):
    occ_rounds = population.resample(
        ds.users,
        ds.locations,
        rounds,
        seed,
        admin_fraction=config["admin_fraction"],
        public_fraction=config["public_fraction"],
    )
    return occ_rounds


def _baseline(ds: ingest.Dataset) -> tuple[np.ndarray, str]:
    if ds.current_assignment is not None:
        return ds.current_assignment, "current"
    uniform = optimizer.init_uniform(ds.location_capacities, len(ds.collection))
    return uniform.entries, "uniform-fallback"


def _solve_once(
    ds: ingest.Dataset,
    config: dict,
    hyper: optimizer.HyperParams,
    init_label: str,
    seed: int,
    occupancy: population.OccupancyAssignment,
):
    C = cost.build_cost_matrix(
        ds.locations,
        occupancy,
        ds.users,
        ds.collection_attributes,
        alpha=hyper.alpha,
        beta=hyper.beta,
        eps_floor=config["eps_floor"],
    )
    h, k = ds.location_capacities, ds.object_capacities
    P_current, current_label = _baseline(ds)
    lam_s, tau_s = optimizer.scale_hyperparams(
        C, h, k, P_current, r=hyper.r_scaling, seed=seed
    )
    hyper = replace(hyper, lambda_scale=lam_s, tau_scale=tau_s)
    if init_label == "uniform":
        init = optimizer.init_uniform(h, C.shape[1])
    elif init_label == "random":
        init = optimizer.init_random(h, C.shape[1], seed)
    elif init_label == "current":
        if ds.current_assignment is None:
            init_label = "current(uniform-fallback)"
            init = optimizer.init_uniform(h, C.shape[1])
        else:
            init = optimizer.AssignmentMatrix(
                entries=ds.current_assignment.copy(), row_capacities=h
            )
    else:
        raise ValueError(f"unknown initialization {init_label!r}")
    report = optimizer.solve(
        C, h, k, hyper, init, P_current=P_current, initialization=init_label
    )
    return report, C


def cmd_synth(args, config) -> int:
    ds = ingest.generate_synthetic(
        n_objects=args.objects,
        n_locations=args.locations,
        n_users=args.users,
        cardinalities=tuple(int(c) for c in args.cards.split(",")),
        skew=args.skew,
        seed=args.seed if args.seed is not None else config["seed"],
    )
    ingest.save_dataset(ds, args.out)
    occ = population.synthesize_occupancy(
        ds.users,
        ds.locations,
        seed=args.seed if args.seed is not None else config["seed"],
        admin_fraction=config["admin_fraction"],
        public_fraction=config["public_fraction"],
    )
    population.save_occupancy(occ, os.path.join(args.out, "occupancy.json"))
    print(f"dataset written to {args.out}")
    return 0


def cmd_solve(args, config) -> int:
    ds = ingest.load_dataset(args.dataset)
    seed = args.seed if args.seed is not None else config["seed"]
    occupancy = population.synthesize_occupancy(
        ds.users,
        ds.locations,
        seed,
        admin_fraction=config["admin_fraction"],
        public_fraction=config["public_fraction"],
    )
    hyper = _hyper_from(config, args)
    report, C = _solve_once(ds, config, hyper, args.init, seed, occupancy)
    os.makedirs(args.out, exist_ok=True)
    ingest.save_matrix_csv(
        os.path.join(args.out, "assignment.csv"),
        report.final.entries,
        ds.location_ids,
        ds.object_ids,
    )
    if args.dump_cost:
        ingest.save_matrix_csv(
            os.path.join(args.out, "cost.csv"),
            C.entries,
            ds.location_ids,
            ds.object_ids,
        )
    with open(os.path.join(args.out, "report.json"), "w") as fh:
        json.dump(report.to_dict(), fh, indent=1)
    print(
        f"solved in {report.iterations_run} iterations; "
        f"objective {report.objective_trace[-1]:.6g}; artifacts in {args.out}"
    )
    return 0


def cmd_evaluate(args, config) -> int:
    ds = ingest.load_dataset(args.dataset)
    seed = args.seed if args.seed is not None else config["seed"]
    rounds = _prepare_problem(ds, config, seed, args.rounds)
    baseline, base_label = _baseline(ds)
    assignments: dict[str, np.ndarray] = {f"baseline({base_label})": baseline}
    for path in args.assignment or []:
        matrix, loc_ids, obj_ids = ingest.load_matrix_csv(path)
        if loc_ids != ds.location_ids or obj_ids != ds.object_ids:
            raise ValueError(f"{path}: ids do not match the dataset")
        assignments[os.path.basename(path)] = matrix
    groups = (
        _parse_groups(args.group, ds.schema) if args.group else _default_groups(ds.schema)
    )
    report = fairness.fairness_table(
        assignments, rounds, ds.users, ds.locations, ds.collection_attributes, groups
    )
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "fairness.json"), "w") as fh:
        json.dump(fairness.report_to_dict(report), fh, indent=1)
    table = fairness.format_table(report)
    with open(os.path.join(args.out, "fairness.txt"), "w") as fh:
        fh.write(table + "\n")
    print(table)
    return 0


def cmd_sweep(args, config) -> int:
    ds = ingest.load_dataset(args.dataset)
    seed = args.seed if args.seed is not None else config["seed"]
    rounds = _prepare_problem(ds, config, seed, args.rounds)
    baseline, _ = _baseline(ds)
    groups = (
        _parse_groups(args.group, ds.schema) if args.group else _default_groups(ds.schema)
    )
    problem = analysis.SweepProblem(
        locations=ds.locations,
        users=ds.users,
        collection=ds.collection_attributes,
        h=ds.location_capacities,
        k=ds.object_capacities,
        cost_occupancy=rounds[0],
        fairness_rounds=rounds,
        P_current=baseline,
        base_hyper=optimizer.HyperParams(
            alpha=config["alpha"],
            step_mode=args.step_mode or config["step_mode"],
            max_iters=args.iters or config["max_iters"],
            r_scaling=config["r_scaling"],
        ),
        scaling_seed=seed,
    )
    cells = analysis.sweep_grid(
        problem,
        _float_list(args.beta),
        _float_list(args.lambda_bar),
        _float_list(args.tau_bar),
        groups,
    )
    os.makedirs(args.out, exist_ok=True)
    rows = analysis.grid_to_rows(cells)
    fieldnames = sorted({key for row in rows for key in row})
    with open(os.path.join(args.out, "sweep.csv"), "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    if args.save_assignments:
        for i, cell in enumerate(cells):
            if cell.assignment is not None:
                ingest.save_matrix_csv(
                    os.path.join(args.out, f"assignment_{i:03d}.csv"),
                    cell.assignment.entries,
                    ds.location_ids,
                    ds.object_ids,
                )
    analysis.write_plot_script(os.path.join(args.out, "plot_results.py"))
    n_ok = sum(1 for c in cells if c.ok)
    print(f"{len(cells)} cells ({n_ok} ok) written to {args.out}")
    return 0


def cmd_embed(args, config) -> int:
    matrices = []
    labels = []
    for path in args.assignment:
        matrix, _, _ = ingest.load_matrix_csv(path)
        matrices.append(matrix)
        labels.append((float("nan"), float("nan"), float("nan")))
    if args.labels:
        with open(args.labels) as fh:
            rows = list(csv.DictReader(fh))
        labels = [
            (float(r["beta"]), float(r["lambda_bar"]), float(r["tau_bar"])) for r in rows
        ]
        if len(labels) != len(matrices):
            raise ValueError("labels file row count does not match assignments")
    family = analysis.SolutionFamily(matrices=matrices, labels=labels)
    W = analysis.similarity(family, cap=args.cap)
    coords = analysis.spectral_embed(W, dim=args.dim)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "embedding.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "x", "y", "beta", "lambda_bar", "tau_bar"][: 2 + args.dim + 3])
        for i, (point, label) in enumerate(zip(coords, labels)):
            writer.writerow([i, *[repr(float(c)) for c in point], *label])
    analysis.write_plot_script(os.path.join(args.out, "plot_results.py"))
    print(f"embedding written to {args.out}")
    return 0


def cmd_serve(args, config) -> int:
    import uvicorn

    from .service import create_app

    ds = ingest.load_dataset(args.dataset)
    app = create_app(ds, config)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curalloc",
        description="Assign objects to occupied locations and score group exposure.",
    )
    parser.add_argument("--config", help="JSON config overriding built-in defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset directory")
    p.add_argument("--out", required=True)
    p.add_argument("--objects", type=int, default=60)
    p.add_argument("--locations", type=int, default=8)
    p.add_argument("--users", type=int, default=500)
    p.add_argument("--cards", default="2,3", help="per-dimension cardinalities")
    p.add_argument("--skew", type=float, default=0.0)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("solve", help="build the cost matrix and optimize")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--beta", type=float)
    p.add_argument("--lambda-bar", dest="lambda_bar", type=float)
    p.add_argument("--tau-bar", dest="tau_bar", type=float)
    p.add_argument("--init", choices=["uniform", "current", "random"], default="uniform")
    p.add_argument("--iters", type=int)
    p.add_argument("--step-mode", dest="step_mode", choices=["fixed", "theoretical"])
    p.add_argument("--seed", type=int)
    p.add_argument("--dump-cost", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("evaluate", help="fairness table over resampled occupancies")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rounds", type=int, default=50)
    p.add_argument("--assignment", action="append", help="assignment CSV (repeatable)")
    p.add_argument("--group", action="append", help="dim=cat[|cat...] (repeatable)")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="hyperparameter grid of exposure gaps")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--beta", default="100")
    p.add_argument("--lambda-bar", dest="lambda_bar", default="1")
    p.add_argument("--tau-bar", dest="tau_bar", default="1")
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--group", action="append")
    p.add_argument("--iters", type=int)
    p.add_argument("--step-mode", dest="step_mode", choices=["fixed", "theoretical"])
    p.add_argument("--save-assignments", action="store_true")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("embed", help="embed a family of assignment matrices")
    p.add_argument("--assignment", action="append", required=True)
    p.add_argument("--labels", help="CSV with beta,lambda_bar,tau_bar per matrix")
    p.add_argument("--out", required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--cap", type=float, default=analysis.DEFAULT_SIMILARITY_CAP)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("serve", help="run the HTTP curator service")
    p.add_argument("--dataset", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = load_config(args.config)
    try:
        return args.func(args, config)
    except Exception as exc:  # noqa: BLE001 - boundary: report and exit nonzero
        json.dump(
            {"error": type(exc).__name__, "message": str(exc)},
            sys.stderr,
        )
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
