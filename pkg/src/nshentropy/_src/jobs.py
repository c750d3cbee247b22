from __future__ import annotations

import csv
import io
import logging
import math
import sys
from collections.abc import Callable, Iterable, Mapping, Sequence
from pathlib import Path
from typing import Annotated, Any, Literal, TypeVar

import numpy as np
from joblib import Parallel, delayed
from joblib.parallel import cpu_count
from pydantic import BeforeValidator, Field, PlainSerializer

from .barcode import Barcode, merge_barcodes
from .config import Config
from .errors import PreconditionError
from .entropy import TABLE_NS, TABLE_RS, bound_table, entropy_difference, persistent_entropy
from .fixtures import circle_sample, pattern_family, write_point_cloud
from .io import (
    barcodes_by_dim,
    read_barcodes,
    read_point_cloud,
    write_barcode,
    write_bound_table,
    write_matrix,
    write_ranking,
    write_step_function,
)
from .metric import wasserstein
from .missing import MISSING, AllowMissing
from .policy import InfPolicyConfig, TauPolicyConfig, inf_policy_registry
from .rips import diameter, pairwise_distances, persistence, rips_complex
from .summary import (
    StepFunction,
    es_function,
    feature_ranking,
    l1_distance,
    nes_function,
    pooled_tes_function,
)

log = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

Command = Literal[
    "rips",
    "entropy",
    "dist",
    "distmat",
    "summary",
    "features",
    "bound-table",
    "generate",
]
SummaryKind = Literal["es", "nes", "tes"]
DistanceKind = Literal["summary", "wasserstein"]
FixtureKind = Literal["circle", "patterns"]


def _parse_exponent(value: Any) -> Any:
    if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    return value


Exponent = Annotated[
    float,
    BeforeValidator(_parse_exponent),
    PlainSerializer(lambda v: "inf" if v == math.inf else v, when_used="json"),
    Field(ge=1.0),
]
"""A Wasserstein exponent: a real ``>= 1`` or ``"inf"`` for the bottleneck distance."""

DEFAULT_OUTPUTS: dict[str, Path] = {
    "rips": Path("barcodes"),
    "distmat": Path("distances.csv"),
    "summary": Path("summaries"),
    "features": Path("features"),
    "bound-table": Path("bound_table.csv"),
    "generate": Path("fixtures"),
}
"""Where each command writes when no output is given; `entropy` and `dist`
print to standard output instead."""

_INPUT_COUNTS: dict[str, tuple[int, int | None]] = {
    "rips": (1, None),
    "entropy": (1, None),
    "dist": (2, 2),
    "distmat": (2, None),
    "summary": (1, None),
    "features": (1, None),
    "bound-table": (0, 0),
    "generate": (0, 0),
}


def is_point_cloud(path: Path) -> bool:
    """Inputs ending in ``.json`` are barcode files; everything else is a point-cloud CSV."""
    return path.suffix.lower() != ".json"


class JobConfig(Config):
    """One batch job of the command-line front end."""

    command: AllowMissing[Command] = MISSING
    """The job to run."""

    inputs: list[Path] = Field(default_factory=list)
    """Point-cloud CSV files or barcode JSON files."""

    output: Path | None = None
    """Output file or directory; defaults depend on the command."""

    max_dim: int = Field(default=1, ge=0)
    """Largest homology dimension computed from point clouds."""

    max_scale: float | None = Field(default=None, gt=0.0)
    """Largest Rips scale; required for point-cloud inputs."""

    p: Exponent = math.inf
    """Wasserstein exponent for barcode distances."""

    inf_policy: Annotated[
        InfPolicyConfig, inf_policy_registry.DynamicResolution()
    ] = TauPolicyConfig()
    """How infinite intervals are made finite before entropy computations."""

    summary_kind: SummaryKind = "nes"
    """Summary function used by `summary` and by summary distances."""

    distance: DistanceKind = "summary"
    """Whether `dist`/`distmat` compare summary functions (L1) or barcodes (d_p)."""

    top_k: int | None = Field(default=5, ge=1)
    """Number of features kept by `features`; None keeps all."""

    parallelism: int = Field(default=1, ge=1)
    """Number of worker processes."""

    seed: int = 0
    """Seed of the fixture generators."""

    fixture: FixtureKind = "circle"
    """What `generate` writes."""

    n_points: int = Field(default=40, ge=1)
    """Points per circle sample."""

    count: int = Field(default=9, ge=1)
    """Number of circle samples; seeds are ``seed, seed + 1, ...``."""

    keep_zero: bool = False
    """Keep zero-length persistence pairs in computed barcodes."""

    ns: list[int] = Field(default_factory=lambda: list(TABLE_NS))
    """Barcode sizes of the bound table."""

    rs: list[float] = Field(default_factory=lambda: list(TABLE_RS))
    """Relative errors of the bound table."""

    verbose: bool = False

    @property
    def output_path(self) -> Path:
        """`output`, or the command's default location."""
        if self.output is not None:
            return self.output
        if self.command not in DEFAULT_OUTPUTS:
            raise ValueError(f"The {self.command} command needs an explicit output.")
        return DEFAULT_OUTPUTS[self.command]

    def __draft_pre_init__(self):
        super().__draft_pre_init__()

        # Policies read from YAML or JSON files arrive as plain mappings.
        if isinstance(self.inf_policy, Mapping):
            self.inf_policy = inf_policy_registry.construct(dict(self.inf_policy))

        if self.output is None and self.command in DEFAULT_OUTPUTS:
            self.output = DEFAULT_OUTPUTS[self.command]

    def __post_init__(self):
        super().__post_init__()

        if self.command is None:
            return

        lo, hi = _INPUT_COUNTS[self.command]
        if len(self.inputs) < lo or (hi is not None and len(self.inputs) > hi):
            expected = f"{lo}" if lo == hi else f"at least {lo}"
            raise ValueError(
                f"The {self.command} command takes {expected} input(s), "
                f"got {len(self.inputs)}."
            )

        if self.max_scale is None and any(is_point_cloud(p) for p in self.inputs):
            raise ValueError(
                "max_scale is required for point-cloud inputs "
                "(the rips command logs each cloud's diameter as a guide)."
            )

        if self.command == "rips" and not all(is_point_cloud(p) for p in self.inputs):
            raise ValueError("The rips command takes point-cloud CSV inputs only.")


# region Workers
def _map(cfg: JobConfig, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Apply `fn` to every item, in order, on up to `cfg.parallelism` processes."""
    items = list(items)
    if cfg.parallelism == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    n_jobs = min(cpu_count(), cfg.parallelism, len(items))
    log.debug(f"Running {len(items)} task(s) on {n_jobs} worker(s).")
    return Parallel(n_jobs=n_jobs)(delayed(fn)(item) for item in items)


def _check_exists(path: Path) -> Path:
    if not path.exists():
        raise FileNotFoundError(f"Input file {path} does not exist.")
    return path


def cloud_barcodes(cfg: JobConfig, cloud: np.ndarray, label: str = "cloud") -> dict[int, Barcode]:
    """Rips persistence of a point cloud, dimensions ``0..cfg.max_dim``."""
    if cfg.max_scale is None:
        raise PreconditionError("Point-cloud inputs need max_scale.")
    dm = pairwise_distances(cloud)
    log.info(f"{label}: {dm.n} point(s), diameter {diameter(dm):.6g}.")
    fc = rips_complex(dm, cfg.max_dim, cfg.max_scale)
    return persistence(fc, cfg.max_dim, keep_zero=cfg.keep_zero)


def load_barcodes(cfg: JobConfig, path: Path) -> dict[int, Barcode]:
    """Barcodes of an input: read from a barcode file, or computed from a point cloud."""
    _check_exists(path)
    if not is_point_cloud(path):
        return barcodes_by_dim(read_barcodes(path))
    return cloud_barcodes(cfg, read_point_cloud(path), label=str(path))


def _load_task(task: tuple[JobConfig, Path]) -> dict[int, Barcode]:
    return load_barcodes(*task)


def summary_function(kind: SummaryKind, barcodes: Mapping[int, Barcode]) -> StepFunction:
    """The chosen summary function of the barcodes of all dimensions pooled."""
    match kind:
        case "es":
            return es_function(merge_barcodes(barcodes)[0])
        case "nes":
            return nes_function(merge_barcodes(barcodes)[0])
        case "tes":
            return pooled_tes_function(barcodes)[0]


def _pair_distance(task: tuple[JobConfig, Any, Any]) -> float:
    cfg, a, b = task
    if cfg.distance == "wasserstein":
        return wasserstein(a, b, cfg.p)
    return l1_distance(a, b)


def _open_output(cfg: JobConfig):
    if cfg.output is None:
        return _StdoutTarget()
    cfg.output.parent.mkdir(parents=True, exist_ok=True)
    return open(cfg.output, "w", newline="", encoding="utf-8")


class _StdoutTarget(io.StringIO):
    """Buffers CSV rows and prints them once the writer is closed."""

    def close(self):
        sys.stdout.write(self.getvalue())
        super().close()


# endregion


# region Drivers
def run_rips(cfg: JobConfig) -> list[Path]:
    """One barcode file per input and dimension: ``<output>/<stem>.h<dim>.json``."""
    output = cfg.output_path
    results = _map(cfg, _load_task, [(cfg, path) for path in cfg.inputs])
    written: list[Path] = []
    for path, barcodes in zip(cfg.inputs, results, strict=True):
        for dim, barcode in barcodes.items():
            written.append(write_barcode(output / f"{path.stem}.h{dim}.json", barcode))
    log.info(f"Wrote {len(written)} barcode file(s) to {output}.")
    return written


def run_entropy(cfg: JobConfig) -> list[tuple[str, str, float]]:
    """Persistent entropy of each input, per dimension and pooled, after the
    infinite-interval policy. Writes ``input,dim,entropy`` rows."""
    results = _map(cfg, _load_task, [(cfg, path) for path in cfg.inputs])
    rows: list[tuple[str, str, float]] = []
    for path, barcodes in zip(cfg.inputs, results, strict=True):
        resolved = cfg.inf_policy.resolve(barcodes)
        for dim, barcode in resolved.items():
            if barcode.total_length <= 0.0:
                log.warning(f"{path}: dimension {dim} has zero total length; skipped.")
                continue
            rows.append((str(path), str(dim), persistent_entropy(barcode).entropy))
        pooled = merge_barcodes(resolved)[0]
        if pooled.total_length <= 0.0:
            log.warning(f"{path}: the pooled barcode has zero total length; skipped.")
            continue
        rows.append((str(path), "all", persistent_entropy(pooled).entropy))

    with _open_output(cfg) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["input", "dim", "entropy"])
        for source, dim, value in rows:
            writer.writerow([source, dim, f"{value:.17g}"])
    return rows


def run_dist(cfg: JobConfig) -> list[tuple[str, float, float | None, float | None]]:
    """Distance between two inputs.

    Summary distances give one pooled row. Wasserstein distances give one row
    per dimension plus a pooled row carrying the entropy difference and its
    stability bound (empty when the relative error is at least 1/4).
    """
    a, b = (
        cfg.inf_policy.resolve(barcodes)
        for barcodes in _map(cfg, _load_task, [(cfg, path) for path in cfg.inputs])
    )
    rows: list[tuple[str, float, float | None, float | None]] = []
    if cfg.distance == "summary":
        distance = l1_distance(
            summary_function(cfg.summary_kind, a), summary_function(cfg.summary_kind, b)
        )
        rows.append(("all", distance, None, None))
    else:
        for dim in sorted(set(a) | set(b)):
            empty = Barcode(dim=dim)
            rows.append((str(dim), wasserstein(a.get(dim, empty), b.get(dim, empty), cfg.p), None, None))
        pooled_a, pooled_b = merge_barcodes(a)[0], merge_barcodes(b)[0]
        difference, bound = entropy_difference(pooled_a, pooled_b, cfg.p)
        rows.append(("all", wasserstein(pooled_a, pooled_b, cfg.p), difference, bound))

    def fmt(value: float | None) -> str:
        return "" if value is None else f"{value:.17g}"

    with _open_output(cfg) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["dim", "distance", "entropy_difference", "stability_bound"])
        for dim, distance, difference, bound in rows:
            writer.writerow([dim, fmt(distance), fmt(difference), fmt(bound)])
    return rows


def distance_matrix(cfg: JobConfig, barcodes: Sequence[Mapping[int, Barcode]]) -> np.ndarray:
    """Pairwise distances of resolved barcodes: L1 between summary functions,
    or d_p between the pooled barcodes."""
    resolved = [cfg.inf_policy.resolve(b) for b in barcodes]
    if cfg.distance == "summary":
        objects: list[Any] = [summary_function(cfg.summary_kind, r) for r in resolved]
    else:
        objects = [merge_barcodes(r)[0] for r in resolved]

    n = len(objects)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    values = _map(cfg, _pair_distance, [(cfg, objects[i], objects[j]) for i, j in pairs])
    matrix = np.zeros((n, n), dtype=np.float64)
    for (i, j), value in zip(pairs, values, strict=True):
        matrix[i, j] = matrix[j, i] = value
    return matrix


def run_distmat(cfg: JobConfig) -> np.ndarray:
    """Symmetric matrix of pairwise distances, rows and columns in input order."""
    output = cfg.output_path
    barcodes = _map(cfg, _load_task, [(cfg, path) for path in cfg.inputs])
    matrix = distance_matrix(cfg, barcodes)
    write_matrix(output, matrix)
    log.info(f"Wrote a {len(matrix)}x{len(matrix)} distance matrix to {output}.")
    return matrix


def run_summary(cfg: JobConfig) -> list[Path]:
    """One step-function CSV per input: ``<output>/<stem>.<kind>.csv``."""
    output = cfg.output_path
    results = _map(cfg, _load_task, [(cfg, path) for path in cfg.inputs])
    written: list[Path] = []
    for path, barcodes in zip(cfg.inputs, results, strict=True):
        f = summary_function(cfg.summary_kind, cfg.inf_policy.resolve(barcodes))
        written.append(
            write_step_function(output / f"{path.stem}.{cfg.summary_kind}.csv", f)
        )
    log.info(f"Wrote {len(written)} {cfg.summary_kind.upper()}-function(s) to {output}.")
    return written


def run_features(cfg: JobConfig) -> list[Path]:
    """One feature ranking per input: ``<output>/<stem>.features.json``."""
    output = cfg.output_path
    results = _map(cfg, _load_task, [(cfg, path) for path in cfg.inputs])
    written: list[Path] = []
    for path, barcodes in zip(cfg.inputs, results, strict=True):
        ranking = feature_ranking(barcodes, cfg.inf_policy, cfg.top_k)
        written.append(
            write_ranking(
                output / f"{path.stem}.features.json",
                source=str(path),
                features=ranking,
                metadata={"inf_policy": cfg.inf_policy.kind},
            )
        )
    log.info(f"Wrote {len(written)} feature ranking(s) to {output}.")
    return written


def run_bound_table(cfg: JobConfig) -> np.ndarray:
    """Relative stability bounds for every ``(n, r)`` of the job."""
    output = cfg.output_path
    table = bound_table(cfg.ns, cfg.rs)
    write_bound_table(output, cfg.ns, cfg.rs, table)
    log.info(f"Wrote a {len(cfg.ns)}x{len(cfg.rs)} bound table to {output}.")
    return table


def run_generate(cfg: JobConfig) -> list[Path]:
    """Write the seeded circle samples or the pattern family as point-cloud CSVs."""
    output = cfg.output_path
    match cfg.fixture:
        case "circle":
            clouds = {
                f"circle-{cfg.n_points}-{cfg.seed + k}": circle_sample(cfg.n_points, cfg.seed + k)
                for k in range(cfg.count)
            }
        case "patterns":
            clouds = pattern_family(cfg.seed)
    written = [
        write_point_cloud(output / f"{label}.csv", cloud) for label, cloud in clouds.items()
    ]
    log.info(f"Wrote {len(written)} point cloud(s) to {output}.")
    return written


def run(cfg: JobConfig) -> Any:
    """Dispatch a finalized job to its driver."""
    match cfg.command:
        case "rips":
            return run_rips(cfg)
        case "entropy":
            return run_entropy(cfg)
        case "dist":
            return run_dist(cfg)
        case "distmat":
            return run_distmat(cfg)
        case "summary":
            return run_summary(cfg)
        case "features":
            return run_features(cfg)
        case "bound-table":
            return run_bound_table(cfg)
        case "generate":
            return run_generate(cfg)
        case _:
            raise ValueError(f"Unknown command {cfg.command!r}.")


# endregion
