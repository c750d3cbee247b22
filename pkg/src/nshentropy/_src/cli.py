from __future__ import annotations

import argparse
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from .adapter import Adapter
from .errors import InputError, PreconditionError
from .jobs import JobConfig, run

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_PRECONDITION = 3

_config_dict_adapter = Adapter[dict[str, Any]](dict[str, Any])

# Flags whose destination is a `JobConfig` field of the same name.
_JOB_FIELDS = (
    "inputs",
    "output",
    "max_dim",
    "max_scale",
    "p",
    "summary_kind",
    "distance",
    "top_k",
    "parallelism",
    "seed",
    "fixture",
    "n_points",
    "count",
    "keep_zero",
    "ns",
    "rs",
    "verbose",
)


def _add_common_arguments(parser: argparse.ArgumentParser):
    # Every option defaults to SUPPRESS so that only flags given on the command
    # line override the values of a --config file.
    parser.add_argument(
        "-c",
        "--config",
        type=Path,
        default=argparse.SUPPRESS,
        help="JSON or YAML job file; command-line flags override its values",
    )
    parser.add_argument(
        "-o",
        "--output",
        type=Path,
        default=argparse.SUPPRESS,
        help="Output file or directory",
    )
    parser.add_argument(
        "-j",
        "--parallelism",
        type=int,
        default=argparse.SUPPRESS,
        help="Number of worker processes",
    )
    parser.add_argument(
        "--dump-config",
        type=Path,
        default=argparse.SUPPRESS,
        help="Write the finalized job (JSON, or YAML for .yaml/.yml) before running it",
    )
    parser.add_argument(
        "--verbose",
        action=argparse.BooleanOptionalAction,
        default=argparse.SUPPRESS,
        help="Enable verbose logging",
    )


def _add_input_arguments(parser: argparse.ArgumentParser):
    # Optional here so that a --config file can supply them; the job checks
    # how many the command takes.
    parser.add_argument(
        "inputs",
        type=Path,
        nargs="*",
        default=argparse.SUPPRESS,
        help="Point-cloud CSV files or barcode JSON files",
    )


def _add_rips_arguments(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--max-dim",
        type=int,
        default=argparse.SUPPRESS,
        help="Largest homology dimension computed from point clouds",
    )
    parser.add_argument(
        "--max-scale",
        type=float,
        default=argparse.SUPPRESS,
        help="Largest Rips scale (required for point clouds)",
    )
    parser.add_argument(
        "--keep-zero",
        action=argparse.BooleanOptionalAction,
        default=argparse.SUPPRESS,
        help="Keep zero-length persistence pairs",
    )


def _add_policy_arguments(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--inf-policy",
        choices=("tau", "phi", "drop"),
        default=argparse.SUPPRESS,
        help="How infinite intervals are made finite",
    )
    parser.add_argument(
        "--inf-constant",
        type=float,
        default=argparse.SUPPRESS,
        help="Offset of the tau policy, or death value of the phi policy",
    )


def _add_distance_arguments(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--distance",
        choices=("summary", "wasserstein"),
        default=argparse.SUPPRESS,
        help="Compare summary functions (L1) or barcodes (Wasserstein)",
    )
    parser.add_argument(
        "-p",
        type=float,
        dest="p",
        default=argparse.SUPPRESS,
        help='Wasserstein exponent, a real >= 1 or "inf"',
    )
    _add_summary_kind_argument(parser)


def _add_summary_kind_argument(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--summary-kind",
        choices=("es", "nes", "tes"),
        default=argparse.SUPPRESS,
        help="Summary function",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nshentropy",
        description="Persistent entropy, barcode distances and entropy summaries",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    rips = commands.add_parser("rips", help="Rips persistence barcodes of point clouds")
    _add_input_arguments(rips)
    _add_rips_arguments(rips)

    entropy = commands.add_parser("entropy", help="Persistent entropy of barcodes")
    _add_input_arguments(entropy)
    _add_rips_arguments(entropy)
    _add_policy_arguments(entropy)

    dist = commands.add_parser("dist", help="Distance between two inputs")
    _add_input_arguments(dist)
    _add_rips_arguments(dist)
    _add_policy_arguments(dist)
    _add_distance_arguments(dist)

    distmat = commands.add_parser("distmat", help="Pairwise distance matrix")
    _add_input_arguments(distmat)
    _add_rips_arguments(distmat)
    _add_policy_arguments(distmat)
    _add_distance_arguments(distmat)

    summary = commands.add_parser("summary", help="ES, NES or TES step functions")
    _add_input_arguments(summary)
    _add_rips_arguments(summary)
    _add_policy_arguments(summary)
    _add_summary_kind_argument(summary)

    features = commands.add_parser("features", help="Rank candidate topological features")
    _add_input_arguments(features)
    _add_rips_arguments(features)
    _add_policy_arguments(features)
    features.add_argument(
        "--top-k",
        type=int,
        default=argparse.SUPPRESS,
        help="Number of features to keep",
    )

    table = commands.add_parser("bound-table", help="Relative entropy stability bounds")
    table.add_argument(
        "--n",
        dest="ns",
        type=int,
        action="append",
        default=argparse.SUPPRESS,
        help="Barcode size (repeatable)",
    )
    table.add_argument(
        "--r",
        dest="rs",
        type=float,
        action="append",
        default=argparse.SUPPRESS,
        help="Relative error (repeatable)",
    )

    generate = commands.add_parser("generate", help="Write seeded fixture point clouds")
    generate.add_argument(
        "--fixture",
        choices=("circle", "patterns"),
        default=argparse.SUPPRESS,
        help="Circle samples or the quadrilateral pattern family",
    )
    generate.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="Base seed")
    generate.add_argument(
        "--n-points",
        type=int,
        default=argparse.SUPPRESS,
        help="Points per circle sample",
    )
    generate.add_argument(
        "--count",
        type=int,
        default=argparse.SUPPRESS,
        help="Number of circle samples",
    )

    for subparser in commands.choices.values():
        _add_common_arguments(subparser)
    return parser


def _read_config_file(path: Path) -> dict[str, Any]:
    if not path.exists():
        raise FileNotFoundError(f"Config file {path} does not exist.")
    if path.suffix.lower() in (".yaml", ".yml"):
        return JobConfig.yaml_dict(path)
    return _config_dict_adapter.from_json_file(path)


def job_from_args(args: argparse.Namespace) -> JobConfig:
    """Build the job: config-file values first, then command-line flags, then
    validation of the whole."""
    given = vars(args)
    values = _read_config_file(given["config"]) if "config" in given else {}

    draft = JobConfig.draft(**values)
    draft.command = given["command"]
    for name in _JOB_FIELDS:
        if name in given:
            setattr(draft, name, given[name])

    if "inf_policy" in given or "inf_constant" in given:
        policy = draft.inf_policy
        current = dict(policy) if isinstance(policy, dict) else policy.model_dump()
        if "inf_policy" in given and given["inf_policy"] != current.get("kind"):
            current = {"kind": given["inf_policy"]}
        if "inf_constant" in given:
            current["constant"] = given["inf_constant"]
        draft.inf_policy = current

    return draft.finalize()


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on usage errors and 0 for --help.
        return e.code if isinstance(e.code, int) else EXIT_INPUT_ERROR

    verbose = bool(getattr(args, "verbose", False))
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO)
    log.debug(f"Arguments: {args}")

    try:
        cfg = job_from_args(args)
        if cfg.verbose:
            logging.getLogger().setLevel(logging.DEBUG)

        if (dump := getattr(args, "dump_config", None)) is not None:
            dump.parent.mkdir(parents=True, exist_ok=True)
            if dump.suffix.lower() in (".yaml", ".yml"):
                cfg.to_yaml_file(dump)
            else:
                cfg.to_json_file(dump)
            log.info(f"Wrote the job configuration to {dump}.")

        run(cfg)
    except PreconditionError as e:
        log.error(f"Precondition violated: {e}")
        return EXIT_PRECONDITION
    except (InputError, ValidationError, FileNotFoundError, ImportError) as e:
        log.error(f"Invalid input: {e}")
        return EXIT_INPUT_ERROR
    except ValueError as e:
        log.error(f"Invalid job: {e}")
        return EXIT_INPUT_ERROR

    return EXIT_OK
