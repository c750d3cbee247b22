from __future__ import annotations

import logging
import math
from collections import Counter
from collections.abc import Container, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .barcode import Barcode, Interval
from .errors import PreconditionError

log = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-12


def as_point_cloud(points: Iterable[Sequence[float]] | np.ndarray) -> np.ndarray:
    """Validate a point cloud and return it as an ``(n, d)`` float array.

    Raises:
        PreconditionError: If the cloud is empty, the points do not all have
            the same dimension, or a coordinate is not finite.
    """
    if isinstance(points, np.ndarray):
        rows = points.tolist() if points.ndim == 2 else None
        if rows is None:
            raise PreconditionError(
                f"A point cloud must be a 2-D array, got shape {points.shape}."
            )
    else:
        rows = [list(p) for p in points]

    if not rows:
        raise PreconditionError("A point cloud needs at least one point.")
    if len(dims := {len(r) for r in rows}) != 1:
        raise PreconditionError(
            f"All points must have the same dimension, got dimensions {sorted(dims)}."
        )
    if 0 in dims:
        raise PreconditionError("Points must have at least one coordinate.")

    array = np.asarray(rows, dtype=np.float64)
    if not np.all(np.isfinite(array)):
        raise PreconditionError("Point coordinates must be finite.")
    return array


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """A symmetric, nonnegative ``n × n`` matrix with zero diagonal."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] == 0:
            raise PreconditionError(
                f"A distance matrix must be square and nonempty, got shape {values.shape}."
            )
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise PreconditionError("Distances must be finite and nonnegative.")
        if np.any(np.diag(values) != 0.0):
            raise PreconditionError("A distance matrix must have a zero diagonal.")
        if np.max(np.abs(values - values.T)) > SYMMETRY_TOLERANCE:
            raise PreconditionError("A distance matrix must be symmetric.")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def pairwise_distances(points: Iterable[Sequence[float]] | np.ndarray) -> DistanceMatrix:
    """Euclidean distances between the points of a cloud."""
    cloud = as_point_cloud(points)
    return DistanceMatrix(squareform(pdist(cloud, metric="euclidean"), checks=False))


def diameter(dm: DistanceMatrix) -> float:
    """The largest pairwise distance; 0 for a single point."""
    return float(dm.values.max())


class Simplex(NamedTuple):
    vertices: tuple[int, ...]
    """Vertex indices in increasing order."""
    value: float
    """Filtration value: the largest pairwise distance among the vertices."""
    dim: int


def _faces(vertices: tuple[int, ...]) -> list[tuple[int, ...]]:
    # Codimension-1 faces, in the order of the removed vertex.
    return [vertices[:k] + vertices[k + 1 :] for k in range(len(vertices))]


def _sort_key(s: Simplex) -> tuple[float, int, tuple[int, ...]]:
    return (s.value, s.dim, s.vertices)


@dataclass(frozen=True, eq=False)
class FilteredComplex:
    """A simplicial complex whose simplices are listed in filtration order.

    The order is by value, then dimension, then vertex tuple; every face of a
    simplex is present and enters no later than the simplex itself, and
    vertices enter at 0.
    """

    simplices: tuple[Simplex, ...]
    index: dict[tuple[int, ...], int] = field(init=False, repr=False)

    def __post_init__(self):
        index: dict[tuple[int, ...], int] = {}
        previous: Simplex | None = None
        for position, s in enumerate(self.simplices):
            if len(s.vertices) != s.dim + 1 or list(s.vertices) != sorted(set(s.vertices)):
                raise PreconditionError(
                    f"Simplex {s.vertices} must list {s.dim + 1} distinct vertices in "
                    "increasing order."
                )
            if previous is not None and _sort_key(previous) > _sort_key(s):
                raise PreconditionError(
                    f"Simplices are not in filtration order at position {position}: "
                    f"{previous} comes before {s}."
                )
            if s.dim == 0 and s.value != 0.0:
                raise PreconditionError(
                    f"Vertex {s.vertices[0]} must enter at 0, got {s.value}."
                )
            if s.dim > 0:
                for face in _faces(s.vertices):
                    if (k := index.get(face)) is None:
                        raise PreconditionError(
                            f"Face {face} of {s.vertices} is missing or enters later."
                        )
                    if self.simplices[k].value > s.value:
                        raise PreconditionError(
                            f"Face {face} enters after its coface {s.vertices}."
                        )
            index[s.vertices] = position
            previous = s
        object.__setattr__(self, "index", index)

    def __len__(self) -> int:
        return len(self.simplices)

    @cached_property
    def max_dim(self) -> int:
        return max((s.dim for s in self.simplices), default=-1)

    def values(self) -> list[float]:
        """The distinct filtration values, ascending."""
        return sorted({s.value for s in self.simplices})

    def skeleton_counts(self, t: float) -> dict[int, int]:
        """Number of simplices of each dimension in the subcomplex ``K_t``."""
        counts = Counter(s.dim for s in self.simplices if s.value <= t)
        return {d: counts.get(d, 0) for d in range(self.max_dim + 1)}


def rips_complex(dm: DistanceMatrix, max_dim: int, max_scale: float) -> FilteredComplex:
    """The Vietoris-Rips filtration up to scale `max_scale`.

    Contains every simplex of dimension at most ``max_dim + 1`` whose vertices
    are pairwise within `max_scale`, so that homology up to `max_dim` is
    complete. Simplices are enumerated by incremental expansion: each
    simplex is extended by the common upper neighbours of its vertices.
    """
    if max_dim < 0:
        raise PreconditionError(f"max_dim must be nonnegative, got {max_dim}.")
    if not max_scale > 0 or math.isnan(max_scale):
        raise PreconditionError(f"max_scale must be positive, got {max_scale}.")

    n = dm.n
    d = dm.values.tolist()
    top = max_dim + 1
    upper = [
        frozenset(w for w in range(v + 1, n) if d[v][w] <= max_scale) for v in range(n)
    ]

    simplices: list[Simplex] = []

    def expand(vertices: tuple[int, ...], value: float, candidates: frozenset[int]):
        simplices.append(Simplex(vertices, value, len(vertices) - 1))
        if len(vertices) - 1 == top:
            return
        for w in sorted(candidates):
            new_value = max(value, max(d[u][w] for u in vertices))
            expand(vertices + (w,), new_value, candidates & upper[w])

    for v in range(n):
        expand((v,), 0.0, upper[v])

    simplices.sort(key=_sort_key)
    log.debug(
        f"Rips complex on {n} point(s) at scale {max_scale}: "
        f"{dict(sorted(Counter(s.dim for s in simplices).items()))} simplices per dim."
    )
    return FilteredComplex(tuple(simplices))


def _boundary_column(
    fc: FilteredComplex, j: int, rows: set[int] | None = None
) -> int:
    # Z/2 column as an int bit mask: bit i is row i, so adding columns is an XOR
    # and the lowest one is the highest set bit.
    column = 0
    for face in _faces(fc.simplices[j].vertices):
        i = fc.index[face]
        if rows is None or i in rows:
            column ^= 1 << i
    return column


def _reduce_columns(
    fc: FilteredComplex,
    positions: Iterable[int],
    pivots: dict[int, int],
    reduced: dict[int, int],
    *,
    skip: Container[int] = frozenset(),
    rows: set[int] | None = None,
    target: int | None = None,
) -> int:
    """Reduce the given columns left to right, recording ``pivots[low] = j``.

    Columns in `skip` are known to reduce to zero. `rows` restricts columns to
    those rows, and the loop stops once `target` new pivots are found.
    Returns the number of column additions.
    """
    additions = 0
    found = 0
    for j in positions:
        if target is not None and found == target:
            break
        if j in skip:
            continue
        column = _boundary_column(fc, j, rows)
        while column:
            low = column.bit_length() - 1
            if (k := pivots.get(low)) is None:
                pivots[low] = j
                reduced[j] = column
                found += 1
                break
            column ^= reduced[k]
            additions += 1
    return additions


def _pairing(fc: FilteredComplex, top: int, *, clearing: bool) -> dict[int, int]:
    """The persistence pairing ``{birth position: death position}`` from the
    boundary columns of dimensions ``1..top``."""
    by_dim: dict[int, list[int]] = {}
    for position, s in enumerate(fc.simplices):
        by_dim.setdefault(s.dim, []).append(position)

    pivots: dict[int, int] = {}
    reduced: dict[int, int] = {}
    additions = 0
    if not clearing:
        for dim in range(1, top + 1):
            additions += _reduce_columns(fc, by_dim.get(dim, []), pivots, reduced)
        log.debug(f"Plain reduction: {len(pivots)} pairs, {additions} column additions.")
        return pivots

    remaining = range(top, 0, -1)
    if top >= 2:
        # The top dimension only matters through the rows of positive
        # (top - 1)-simplices: reduce those first, then restrict the top
        # columns to them and stop once every one of them is paired.
        additions += _reduce_columns(fc, by_dim.get(top - 1, []), pivots, reduced)
        killers = set(pivots.values())
        positive = {j for j in by_dim.get(top - 1, []) if j not in killers}
        additions += _reduce_columns(
            fc,
            by_dim.get(top, []),
            pivots,
            reduced,
            rows=positive,
            target=len(positive),
        )
        remaining = range(top - 2, 0, -1)

    cleared = 0
    for dim in remaining:
        # A simplex already paired as a birth reduces to zero.
        births = pivots.keys()
        cleared += sum(1 for j in by_dim.get(dim, []) if j in births)
        additions += _reduce_columns(
            fc, by_dim.get(dim, []), pivots, reduced, skip=set(births)
        )
    log.debug(
        f"Reduction with clearing: {len(pivots)} pairs, {additions} column additions, "
        f"{cleared} column(s) cleared."
    )
    return pivots


def persistence(
    fc: FilteredComplex,
    max_hom_dim: int,
    *,
    keep_zero: bool = False,
    clearing: bool = True,
) -> dict[int, Barcode]:
    """Z/2 persistent homology barcodes of dimensions ``0..max_hom_dim``.

    A reduced column j with lowest one at row i pairs simplex i with simplex
    j, giving ``[value(i), value(j)]`` in dimension ``dim(i)``; positive
    simplices left unpaired give ``[value, inf)``. Pairs with birth = death
    are dropped unless `keep_zero`. With `clearing`, dimensions are reduced
    from the top down and columns of simplices already paired as births are
    skipped; the pairing is identical to the plain left-to-right reduction.
    """
    if max_hom_dim < 0:
        raise PreconditionError(f"max_hom_dim must be nonnegative, got {max_hom_dim}.")

    pivots = _pairing(fc, min(max_hom_dim + 1, fc.max_dim), clearing=clearing)
    killers = set(pivots.values())

    intervals: dict[int, list[Interval]] = {d: [] for d in range(max_hom_dim + 1)}
    for position, s in enumerate(fc.simplices):
        if s.dim > max_hom_dim or position in killers:
            continue
        if (j := pivots.get(position)) is None:
            intervals[s.dim].append(Interval(s.value, math.inf))
            continue
        death = fc.simplices[j].value
        if death == s.value and not keep_zero:
            continue
        intervals[s.dim].append(Interval(s.value, death))

    return {
        d: Barcode(dim=d, intervals=tuple(sorted(found)))
        for d, found in intervals.items()
    }


def betti_numbers(barcodes: Mapping[int, Barcode], t: float) -> dict[int, int]:
    """Number of intervals alive at t (``birth <= t < death``) per dimension."""
    return {
        d: sum(1 for i in b.intervals if i.birth <= t < i.death)
        for d, b in sorted(barcodes.items())
    }
