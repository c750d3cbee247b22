from __future__ import annotations

import csv
import logging
import math
from collections.abc import Mapping, Sequence
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from .adapter import Adapter
from .barcode import Barcode
from .config import Config
from .errors import InputError
from .summary import AliveProfile, StepFunction

log = logging.getLogger(__name__)

CONTRACTIBLE_NOTE = (
    "Segments with the contractible profile (beta_0 = 1, beta_i = 0 for i > 0) "
    "and segments where no interval is alive are excluded."
)

barcode_file_adapter = Adapter[Barcode | list[Barcode]](Barcode | list[Barcode])


# region Point clouds
def _parse_row(row: Sequence[str]) -> list[float] | None:
    try:
        return [float(cell) for cell in row]
    except ValueError:
        return None


def read_point_cloud(path: str | Path) -> np.ndarray:
    """Read a point-cloud CSV: one point per line, comma-separated coordinates.

    A non-numeric first line is taken to be a header and skipped. Blank lines
    are ignored.

    Raises:
        FileNotFoundError: If the file does not exist.
        InputError: On a malformed line, ragged rows, or a file with no points.
    """
    path = Path(path)
    points: list[list[float]] = []
    last_line = 0
    with open(path, newline="", encoding="utf-8") as f:
        for line, row in enumerate(csv.reader(f), start=1):
            last_line = line
            row = [cell.strip() for cell in row]
            if not any(row):
                continue
            if (point := _parse_row(row)) is None:
                if line == 1:
                    log.debug(f"{path}: skipping header {row}.")
                    continue
                raise InputError(path, line, f"expected numeric coordinates, got {row}.")
            if not all(math.isfinite(x) for x in point):
                raise InputError(path, line, "coordinates must be finite.")
            if points and len(point) != len(points[0]):
                raise InputError(
                    path,
                    line,
                    f"expected {len(points[0])} coordinates like the first point, "
                    f"got {len(point)}.",
                )
            points.append(point)

    if not points:
        raise InputError(path, last_line + 1, "the file contains no points.")
    log.debug(f"Read {len(points)} point(s) of dimension {len(points[0])} from {path}.")
    return np.asarray(points, dtype=np.float64)


# endregion


# region Barcodes
def read_barcodes(path: str | Path) -> list[Barcode]:
    """Read a barcode file holding one barcode object or an array of them.

    Raises:
        FileNotFoundError: If the file does not exist.
        InputError: If the contents are not valid barcode JSON.
    """
    path = Path(path)
    try:
        loaded = barcode_file_adapter.from_json_file(path)
    except ValidationError as e:
        raise InputError(path, None, f"invalid barcode file:\n{e}") from e
    return loaded if isinstance(loaded, list) else [loaded]


def barcodes_by_dim(barcodes: Sequence[Barcode]) -> dict[int, Barcode]:
    """Group barcodes by dimension; untagged barcodes count as dimension 0 and
    barcodes sharing a dimension are concatenated."""
    grouped: dict[int, Barcode] = {}
    for b in barcodes:
        dim = b.dim if b.dim is not None else 0
        if (existing := grouped.get(dim)) is None:
            grouped[dim] = Barcode(dim=dim, intervals=b.intervals)
        else:
            grouped[dim] = existing.replace(existing.intervals + b.intervals)
    return dict(sorted(grouped.items()))


def write_barcode(path: str | Path, barcode: Barcode) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    barcode.to_json_file(path)
    return path


def write_barcodes(path: str | Path, barcodes: Sequence[Barcode]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    barcode_file_adapter.to_json_file(list(barcodes), path, indent=4)
    return path


# endregion


# region Tables
def _open_csv_writer(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", newline="", encoding="utf-8")


def write_step_function(path: str | Path, f: StepFunction) -> Path:
    """Rows ``t_start,t_end,value`` at 17 significant digits."""
    path = Path(path)
    with _open_csv_writer(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        for start, end, value in f.segments():
            writer.writerow([f"{start:.17g}", f"{end:.17g}", f"{value:.17g}"])
    return path


def write_matrix(path: str | Path, matrix: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, matrix, fmt="%.17g", delimiter=",")
    return path


def write_bound_table(
    path: str | Path,
    ns: Sequence[int],
    rs: Sequence[float],
    table: np.ndarray,
) -> Path:
    """A header of r values, then one row per n, at 6 significant digits."""
    path = Path(path)
    with _open_csv_writer(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["n", *(f"{r:g}" for r in rs)])
        for n, row in zip(ns, table.tolist(), strict=True):
            writer.writerow([n, *(f"{v:.6g}" for v in row)])
    return path


# endregion


# region Rankings
class FeatureRanking(Config):
    """A feature ranking as written to disk."""

    source: str
    """The input the ranking was computed from."""

    metadata: dict[str, str]
    """Free-form notes, including which segments were excluded."""

    features: list[AliveProfile]
    """Candidate features, best first."""


def write_ranking(
    path: str | Path,
    source: str,
    features: Sequence[AliveProfile],
    metadata: Mapping[str, str] | None = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ranking = FeatureRanking(
        source=source,
        metadata={"excluded": CONTRACTIBLE_NOTE, **(metadata or {})},
        features=list(features),
    )
    ranking.to_json_file(path, by_alias=True)
    return path


def read_ranking(path: str | Path) -> FeatureRanking:
    return FeatureRanking.model_validate_json(
        Path(path).read_text(encoding="utf-8"), strict=False
    )


# endregion
