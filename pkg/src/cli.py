"""
Command-line entry point of the k-NN connectivity laboratory.

Usage:
    python scripts/knn_lab.py <command> [options]

Commands:
    sample               Sample a Poisson point set
    graph                Build a k-NN graph (edge list, optional census dump)
    sweep                Connectivity sweep over a c grid
    boundary             Boundary versus interior small-component census
    audit-construction   Audit hull constructions around non-giant components
    audit-lemma          Monte Carlo audit of the two-set bound
    bounds-table         Derived threshold constants and crossing points
"""

import argparse
import logging
import sys
from dataclasses import fields
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from .models.bounds import CurveFamily, ThresholdRow
from .models.experiment import (
    AUDIT_COLUMNS,
    BoundaryCensusRow,
    ExperimentConfig,
    LemmaAuditRow,
    SweepRow,
    TrialRecord,
)
from .models.geometry import SquareWorld
from .pipelines.boundary_census import run_boundary_census
from .pipelines.connectivity_sweep import ConnectivitySweep, parse_c_grid
from .pipelines.construction_audit import run_construction_audit
from .pipelines.lemma_audit import run_lemma_audit
from .pipelines.output import companion_path, run_metadata, write_table
from .utils.bounds import optimal_alpha, threshold_table
from .utils.components import census, census_frame
from .utils.config import load_config_file, setup_logging
from .utils.knn_graph import build_graph, edges_frame
from .utils.sampling import points_frame, sample_poisson_square

logger = logging.getLogger(__name__)

# flag / config-file key -> ExperimentConfig field
KEY_ALIASES = {
    "n": "area_n",
    "seed": "master_seed",
    "strip": "boundary_strip",
    "progress": "show_progress",
}
COMMAND_KEYS = ("c_grid", "k_values", "configs", "census_out", "log_level")


def _columns(row_type) -> List[str]:
    return [f.name for f in fields(row_type)]


def _add_common(parser: argparse.ArgumentParser, degree: bool = True) -> None:
    parser.add_argument("--config", help="Flat key=value file; flags override its values")
    parser.add_argument("--n", type=float, help="Area of the square (expected point count)")
    if degree:
        group = parser.add_mutually_exclusive_group()
        group.add_argument("--k", type=int, help="Neighbours per point")
        group.add_argument("--c", type=float, help="k = ceil(c ln n)")
    parser.add_argument("--trials", type=int, help="Trials per grid point (default 100)")
    parser.add_argument("--seed", type=int, help="Master seed (64-bit unsigned)")
    parser.add_argument("--threads", type=int, help="Worker threads (default KNN_LAB_THREADS or 1)")
    parser.add_argument("--strip", type=float, help="Boundary strip width (default ln n)")
    parser.add_argument("--small-coeff", type=float, help="Small-component diameter coefficient")
    parser.add_argument("--out", help="Output path (stdout when omitted)")
    parser.add_argument("--format", choices=["csv", "json"], help="Output format (default csv)")
    parser.add_argument("--log-level", help="Logging level (default KNN_LAB_LOG_LEVEL or INFO)")
    parser.add_argument("--progress", action="store_true", default=None, help="Show a progress bar")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="knn-lab",
        description="Simulate and verify connectivity of random k-NN graphs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python scripts/knn_lab.py sweep --n 10000 --c-grid 0.1:0.9:0.1 --trials 200 --out sweep.csv
  python scripts/knn_lab.py audit-construction --n 100000 --c 0.30 --trials 100
  python scripts/knn_lab.py bounds-table --format json
        """,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sample = commands.add_parser("sample", help="Sample a Poisson point set")
    _add_common(sample, degree=False)

    graph = commands.add_parser("graph", help="Build a k-NN graph and dump its edges")
    _add_common(graph)
    graph.add_argument("--census-out", help="Also write the component census here")

    sweep = commands.add_parser("sweep", help="Connectivity sweep over c")
    _add_common(sweep, degree=False)
    sweep.add_argument("--c-grid", help="Inclusive grid a:b:step")

    boundary = commands.add_parser("boundary", help="Boundary small-component census")
    _add_common(boundary)
    boundary.add_argument("--k-values", help="Comma-separated list of k (default: --k/--c)")

    audit = commands.add_parser("audit-construction", help="Audit hull constructions")
    _add_common(audit)

    lemma = commands.add_parser("audit-lemma", help="Monte Carlo audit of the two-set bound")
    _add_common(lemma, degree=False)
    lemma.add_argument("--configs", type=int, help="Random cases to audit (default 100)")
    lemma.add_argument("--lemma-trials", type=int, help="Poisson trials per case (default 10000)")

    bounds = commands.add_parser("bounds-table", help="Threshold constants and crossings")
    bounds.add_argument("--out", help="Output path (stdout when omitted)")
    bounds.add_argument("--format", choices=["csv", "json"], default="csv")
    bounds.add_argument("--log-level", help="Logging level")

    return parser


def collect_settings(args: argparse.Namespace) -> Dict[str, Any]:
    """Config-file values overridden by explicit flags, keyed by config field"""
    settings: Dict[str, Any] = {}
    if getattr(args, "config", None):
        settings.update(load_config_file(args.config))
    # a degree flag replaces whichever degree the file set
    if getattr(args, "k", None) is not None or getattr(args, "c", None) is not None:
        settings.pop("k", None)
        settings.pop("c", None)
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        settings[key] = value
    return {KEY_ALIASES.get(key, key): value for key, value in settings.items()}


def build_config(settings: Dict[str, Any], **overrides: Any) -> ExperimentConfig:
    values = {k: v for k, v in settings.items() if k not in COMMAND_KEYS}
    values.update(overrides)
    return ExperimentConfig(**values)


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)


def cmd_sample(settings: Dict[str, Any]) -> None:
    if "area_n" not in settings:
        raise ValueError("--n is required")
    world = SquareWorld(float(settings["area_n"]))
    seed = int(settings.get("master_seed", 0))
    points = sample_poisson_square(world, seed)
    out, fmt = settings.get("out"), settings.get("format", "csv")
    metadata = run_metadata("sample", {"area_n": world.area_n, "master_seed": seed})
    _emit(write_table(points_frame(points).to_dict(orient="records"), out, fmt, metadata,
                      columns=["idx", "x", "y"]), out)


def cmd_graph(settings: Dict[str, Any]) -> None:
    config = build_config(settings)
    world = SquareWorld(config.area_n)
    points = sample_poisson_square(world, config.master_seed)
    graph = build_graph(points, config.resolved_k)
    metadata = run_metadata("graph", config.metadata(), point_count=points.count)
    text = write_table(edges_frame(graph).to_dict(orient="records"), config.out, config.format,
                       metadata, columns=["u", "v"])
    _emit(text, None if config.out is None else str(config.out))

    census_out = settings.get("census_out")
    if census_out:
        result = census(graph, points, boundary_strip=config.strip, small_coeff=config.small_coeff)
        frame = census_frame(result)
        write_table(frame.to_dict(orient="records"), census_out, config.format, metadata,
                    columns=list(frame.columns))


def cmd_sweep(settings: Dict[str, Any]) -> None:
    if not settings.get("c_grid"):
        raise ValueError("--c-grid is required")
    grid = parse_c_grid(str(settings["c_grid"]))
    config = build_config(settings, c=grid[0], k=None)
    sweep = ConnectivitySweep(config)
    rows = sweep.run(grid)
    metadata = run_metadata("sweep", config.metadata(), c_grid=grid)
    text = write_table(rows, config.out, config.format, metadata, columns=_columns(SweepRow))
    _emit(text, None if config.out is None else str(config.out))
    trials_path = companion_path(config.out, "trials.csv")
    if trials_path is not None:
        write_table(sweep.trial_records, trials_path, "csv", columns=_columns(TrialRecord))


def cmd_boundary(settings: Dict[str, Any]) -> None:
    config = build_config(settings)
    k_values = None
    if settings.get("k_values"):
        k_values = [int(v) for v in str(settings["k_values"]).split(",") if v.strip()]
    rows = run_boundary_census(config, k_values)
    metadata = run_metadata("boundary", config.metadata(), k_values=k_values)
    text = write_table(rows, config.out, config.format, metadata,
                       columns=_columns(BoundaryCensusRow))
    _emit(text, None if config.out is None else str(config.out))


def cmd_audit_construction(settings: Dict[str, Any]) -> None:
    config = build_config(settings)
    rows = run_construction_audit(config)
    metadata = run_metadata("audit-construction", config.metadata())
    text = write_table(rows, config.out, config.format, metadata, columns=AUDIT_COLUMNS)
    _emit(text, None if config.out is None else str(config.out))


def cmd_audit_lemma(settings: Dict[str, Any]) -> None:
    configs = int(settings.get("configs", 100))
    # the lemma audit has no graph degree; k only satisfies the config invariant
    config = build_config(settings, area_n=settings.get("area_n", 2.0), k=1, c=None)
    rows = run_lemma_audit(config, configs)
    metadata = run_metadata("audit-lemma", config.metadata(), configs=configs)
    text = write_table(rows, config.out, config.format, metadata, columns=_columns(LemmaAuditRow))
    _emit(text, None if config.out is None else str(config.out))


def bounds_rows() -> List[ThresholdRow]:
    rows = threshold_table()
    for family in CurveFamily:
        result = optimal_alpha(family)
        rows.append(ThresholdRow(f"x_star_{family.value}", result.x_star, result.analytic_x_star,
                                 "derived", "optimizer against closed-form crossing"))
        rows.append(ThresholdRow(f"alpha_{family.value}", result.alpha, None, "derived",
                                 "per-configuration base of the bound"))
    return rows


def cmd_bounds_table(settings: Dict[str, Any]) -> None:
    out, fmt = settings.get("out"), settings.get("format", "csv")
    metadata = run_metadata("bounds-table", {})
    _emit(write_table(bounds_rows(), out, fmt, metadata, columns=_columns(ThresholdRow)), out)


COMMANDS = {
    "sample": cmd_sample,
    "graph": cmd_graph,
    "sweep": cmd_sweep,
    "boundary": cmd_boundary,
    "audit-construction": cmd_audit_construction,
    "audit-lemma": cmd_audit_lemma,
    "bounds-table": cmd_bounds_table,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = collect_settings(args)
        setup_logging(settings.get("log_level"))
        COMMANDS[args.command](settings)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first.get("loc", ())) or "config"
        sys.stderr.write(f"invalid configuration: {location}: {first['msg']}\n")
        return 2
    except (ValueError, FileNotFoundError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2 if isinstance(e, ValueError) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
