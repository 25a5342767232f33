"""Command-line application."""

import argparse
import copy
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import pandas as pd

from . import __version__
from .core import (
    ClusterTrackingPipeline,
    ScenarioSpec,
    emit,
    generate,
    ingest_snapshots,
    read_truth,
    score_run,
    write_snapshots,
    write_truth,
)
from .core.emitter import emit_histogram, file_digest
from .exceptions import ConfigError, MpcClusterTrackerError
from .models import McdNormalization, PipelineConfig, Side
from .utils import load_config_file

logger = logging.getLogger(__name__)

DEFAULT_SCENARIO: dict[str, Any] = {
    "n_snapshots": 100,
    "noise_mpcs_per_snapshot": 5,
    "rng_seed": 1,
    "clusters": [
        {"birth": 0, "death": 99, "initial_centroid": [0, 0, 0],
         "velocity": [0.1, 0, 0], "spread_std": [0.5, 0.5, 0.5]},
        {"birth": 0, "death": 99, "initial_centroid": [12, 12, 12],
         "velocity": [0, 0.1, 0], "spread_std": [0.5, 0.5, 0.5]},
        {"birth": 0, "death": 99, "initial_centroid": [24, 0, 12],
         "velocity": [0, 0, -0.05], "spread_std": [0.5, 0.5, 0.5]},
    ],
}


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    """Add the pipeline config file and override flags."""
    parser.add_argument("--config", type=Path, help="JSON config file")
    parser.add_argument("--side", choices=[s.value for s in Side])
    parser.add_argument("--k-max", type=int, dest="k_max")
    parser.add_argument("--q-scale", type=float, dest="q_scale")
    parser.add_argument("--r-scale", type=float, dest="r_scale")
    parser.add_argument("--power-keep-frac", type=float, dest="power_keep_frac")
    parser.add_argument(
        "--normalization",
        choices=[m.value for m in McdNormalization],
        dest="mcd_normalization",
    )
    parser.add_argument("--max-lloyd-iters", type=int, dest="max_lloyd_iters")


def _load_config(args: argparse.Namespace) -> tuple[PipelineConfig, dict[str, Any] | None]:
    """Merge the config file with command-line overrides."""
    cfg, scenario = (
        load_config_file(args.config) if args.config else (PipelineConfig(), None)
    )
    cfg = cfg.with_overrides(
        side=args.side,
        k_max=args.k_max,
        q_scale=args.q_scale,
        r_scale=args.r_scale,
        power_keep_frac=args.power_keep_frac,
        mcd_normalization=args.mcd_normalization,
        max_lloyd_iters=args.max_lloyd_iters,
    )
    return cfg, scenario


def _make_pipeline(cfg: PipelineConfig) -> ClusterTrackingPipeline:
    return ClusterTrackingPipeline(
        cfg,
        progress_callback=lambda stage, percent, message: logger.debug(
            "[%s %.0f%%] %s", stage, percent, message
        ),
        log_callback=logger.info,
    )


def _cmd_run(args: argparse.Namespace) -> int:
    cfg, _ = _load_config(args)
    snapshots = ingest_snapshots(args.input)
    logger.info("Read %d snapshots from %s", len(snapshots), args.input)

    run = _make_pipeline(cfg).execute(snapshots)
    artifacts = emit(run, args.out, input_digest=file_digest(args.input))
    logger.info("Wrote artifacts to %s", artifacts.run_meta.parent)
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    _, scenario = _load_config(args)
    values = copy.deepcopy(scenario or DEFAULT_SCENARIO)
    if args.seed is not None:
        values["rng_seed"] = args.seed
    if args.snapshots is not None:
        values["n_snapshots"] = args.snapshots
        for cluster in values.get("clusters", []):
            cluster["death"] = min(cluster["death"], args.snapshots - 1)

    labelled = generate(ScenarioSpec.from_dict(values))
    args.out.mkdir(parents=True, exist_ok=True)
    write_snapshots([item.snapshot for item in labelled], args.out / "snapshots.csv")
    write_truth(labelled, args.out / "truth.csv")
    logger.info("Wrote %d synthetic snapshots to %s", len(labelled), args.out)
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    cfg, _ = _load_config(args)
    snapshots = ingest_snapshots(args.input)
    truth = read_truth(args.truth, snapshots)

    report = score_run(_make_pipeline(cfg).execute(snapshots), truth)
    text = json.dumps(report.to_dict(), indent=2)
    print(text)
    if args.out:
        args.out.write_text(text + "\n", encoding="utf-8")
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    run_dir: Path = args.run_dir
    try:
        lifetimes = pd.read_csv(run_dir / "lifetimes.csv")["lifetime"]
        counts = pd.read_csv(run_dir / "clusters_per_snapshot.csv")["n_clusters"]
        fractions = pd.read_csv(run_dir / "power_fractions.csv")["power_percent"]
    except (OSError, KeyError, pd.errors.ParserError) as e:
        raise ConfigError(f"{run_dir} is not a run directory: {e}") from e

    emit_histogram(lifetimes.to_numpy(), args.bin_width, run_dir / "lifetime_histogram.csv")
    emit_histogram(counts.to_numpy(), 1, run_dir / "clusters_per_snapshot_histogram.csv")
    emit_histogram(
        fractions.to_numpy(), args.power_bin_width, run_dir / "power_fraction_histogram.csv"
    )

    if len(lifetimes):
        print(f"Tracks: {len(lifetimes)}, mean lifetime {lifetimes.mean():.2f} snapshots")
    if len(counts):
        print(f"Snapshots: {len(counts)}, mean clusters {counts.mean():.2f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with all subcommands."""
    parser = argparse.ArgumentParser(
        prog="mpc-cluster-tracker",
        description="Cluster multipath components per snapshot and track the clusters.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Cluster and track a snapshot file")
    run.add_argument("--input", type=Path, required=True, help="Snapshot CSV")
    run.add_argument("--out", type=Path, required=True, help="Artifact directory")
    _add_config_arguments(run)
    run.set_defaults(handler=_cmd_run)

    synth = sub.add_parser("synth", help="Generate a synthetic scenario")
    synth.add_argument("--out", type=Path, required=True, help="Output directory")
    synth.add_argument("--seed", type=int)
    synth.add_argument("--snapshots", type=int)
    _add_config_arguments(synth)
    synth.set_defaults(handler=_cmd_synth)

    score = sub.add_parser("score", help="Score tracking against ground truth")
    score.add_argument("--input", type=Path, required=True, help="Snapshot CSV")
    score.add_argument("--truth", type=Path, required=True, help="Truth label CSV")
    score.add_argument("--out", type=Path, help="Write the report as JSON")
    _add_config_arguments(score)
    score.set_defaults(handler=_cmd_score)

    stats = sub.add_parser("stats", help="Histogram CSVs of a run directory")
    stats.add_argument("--run-dir", type=Path, required=True)
    stats.add_argument("--bin-width", type=float, default=1.0, help="Lifetime bin width")
    stats.add_argument(
        "--power-bin-width", type=float, default=5.0, help="Power percentage bin width"
    )
    stats.set_defaults(handler=_cmd_stats)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    """Run the command-line application.

    Args:
        argv: Arguments without the program name; sys.argv is used if None.

    Returns:
        Exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        return args.handler(args)
    except MpcClusterTrackerError as e:
        print(f"Error: {e}", file=sys.stderr)
        for note in getattr(e, "__notes__", ()):
            print(f"  {note}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
