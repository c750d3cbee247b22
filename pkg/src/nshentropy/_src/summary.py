from __future__ import annotations

import bisect
import logging
import math
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from pydantic import Field

from .barcode import Barcode, Interval, is_finite, merge_barcodes
from .config import Config, ConfigDict
from .entropy import entropy_terms
from .errors import PreconditionError
from .policy import InfPolicyConfig

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepFunction:
    """A right-continuous piecewise-constant function with compact support.

    Holds ``values[i]`` on ``[breakpoints[i], breakpoints[i + 1])`` and 0
    elsewhere. Build instances with `from_segments`, which merges equal
    neighbours and trims zero ends, so two equal functions compare equal.
    The zero function has no breakpoints.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if not self.breakpoints and not self.values:
            return
        if len(self.values) != len(self.breakpoints) - 1:
            raise ValueError(
                f"A step function needs one value per segment: got {len(self.breakpoints)} "
                f"breakpoints and {len(self.values)} values."
            )
        if any(s >= e for s, e in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("Breakpoints must be strictly increasing.")
        if not all(math.isfinite(t) for t in self.breakpoints):
            raise ValueError("Breakpoints must be finite.")

    @classmethod
    def zero(cls) -> StepFunction:
        return cls(breakpoints=(), values=())

    @classmethod
    def from_segments(
        cls,
        breakpoints: Sequence[float],
        values: Sequence[float],
    ) -> StepFunction:
        """Canonical step function with the given segments."""
        merged_bps: list[float] = []
        merged_values: list[float] = []
        for start, value in zip(breakpoints, values):
            if merged_values and merged_values[-1] == value:
                continue
            merged_bps.append(float(start))
            merged_values.append(float(value))
        if not merged_values:
            return cls.zero()
        merged_bps.append(float(breakpoints[len(values)]))

        # Trim zero segments at both ends.
        first = next((k for k, v in enumerate(merged_values) if v != 0.0), None)
        if first is None:
            return cls.zero()
        last = max(k for k, v in enumerate(merged_values) if v != 0.0)
        return cls(
            breakpoints=tuple(merged_bps[first : last + 2]),
            values=tuple(merged_values[first : last + 1]),
        )

    def __call__(self, t: float) -> float:
        if not self.values or t < self.breakpoints[0] or t >= self.breakpoints[-1]:
            return 0.0
        return self.values[bisect.bisect_right(self.breakpoints, t) - 1]

    def segments(self) -> Iterator[tuple[float, float, float]]:
        """``(start, end, value)`` for each segment of the support."""
        return zip(self.breakpoints, self.breakpoints[1:], self.values)

    @property
    def support(self) -> tuple[float, float] | None:
        if not self.values:
            return None
        return self.breakpoints[0], self.breakpoints[-1]

    def integral(self) -> float:
        return math.fsum(v * (e - s) for s, e, v in self.segments())

    def l1_norm(self) -> float:
        return math.fsum(abs(v) * (e - s) for s, e, v in self.segments())

    def sup(self) -> float:
        """Supremum over the whole real line (the function is 0 off its support)."""
        return max((0.0, *self.values))

    def scale(self, c: float) -> StepFunction:
        return StepFunction.from_segments(self.breakpoints, [c * v for v in self.values])

    def _combine(self, other: StepFunction, sign: float) -> StepFunction:
        grid = sorted(set(self.breakpoints) | set(other.breakpoints))
        return StepFunction.from_segments(
            grid, [self(t) + sign * other(t) for t in grid[:-1]]
        )

    def __add__(self, other: StepFunction) -> StepFunction:
        return self._combine(other, 1.0)

    def __sub__(self, other: StepFunction) -> StepFunction:
        return self._combine(other, -1.0)


def l1_norm(f: StepFunction) -> float:
    """``∫ |f(t)| dt``, summed exactly over the segments."""
    return f.l1_norm()


def l1_distance(f: StepFunction, g: StepFunction) -> float:
    """``∫ |f(t) - g(t)| dt`` on the merged breakpoint grid."""
    return (f - g).l1_norm()


class AliveProfile(Config):
    """A maximal time segment on which the set of alive intervals is constant."""

    model_config: ClassVar[ConfigDict] = ConfigDict(  # type: ignore
        frozen=True,
        strict=False,
        populate_by_name=True,
    )

    segment: tuple[float, float]
    """``[start, end)`` of the segment."""

    alive_count_per_dim: dict[int, int] = Field(alias="betti")
    """Number of alive intervals per homology dimension (the Betti profile)."""

    tes_value: float = Field(alias="tes")
    """Value of the TES-function on the segment."""

    @property
    def alive(self) -> int:
        return sum(self.alive_count_per_dim.values())

    def is_contractible(self) -> bool:
        """β_0 = 1 and β_i = 0 for i > 0."""
        return self.alive_count_per_dim.get(0, 0) == 1 and all(
            count == 0 for dim, count in self.alive_count_per_dim.items() if dim != 0
        )

    def betti_key(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.alive_count_per_dim.items()))


def _require_summary_input(a: Barcode, operation: str) -> float:
    if not is_finite(a):
        raise PreconditionError(
            f"{operation} requires finite intervals; got {a.m_inf} infinite interval(s)."
        )
    if (total := a.total_length) <= 0.0:
        raise PreconditionError(f"{operation} requires a positive total length.")
    return total


def _alive_segments(intervals: Sequence[Interval]) -> tuple[list[float], np.ndarray]:
    """Elementary segments between consecutive endpoints and, for each, which
    intervals are alive on it (half-open ``[birth, death)`` aliveness).

    Returns the breakpoints and an ``(n_intervals, n_segments)`` boolean mask.
    """
    breakpoints = sorted({x for i in intervals for x in (i.birth, i.death)})
    births = np.asarray([i.birth for i in intervals], dtype=np.float64)
    deaths = np.asarray([i.death for i in intervals], dtype=np.float64)
    starts = np.asarray(breakpoints[:-1], dtype=np.float64)
    ends = np.asarray(breakpoints[1:], dtype=np.float64)
    mask = (births[:, None] <= starts[None, :]) & (deaths[:, None] >= ends[None, :])
    return breakpoints, mask


def es_function(a: Barcode) -> StepFunction:
    """The entropy summary function: at each t, the entropy terms of the
    intervals alive at t."""
    total = _require_summary_input(a, "es_function")
    breakpoints, mask = _alive_segments(a.intervals)
    terms = entropy_terms(np.asarray(a.lengths(), dtype=np.float64), total)
    values = [math.fsum(terms[mask[:, k]].tolist()) for k in range(mask.shape[1])]
    return StepFunction.from_segments(breakpoints, values)


def nes_function(a: Barcode) -> StepFunction:
    """The ES-function divided by its L1 norm, comparable across barcode sizes."""
    es = es_function(a)
    if (norm := es.l1_norm()) <= 0.0:
        raise PreconditionError(
            "nes_function requires an ES-function of positive norm "
            "(a single-interval barcode has an identically zero ES-function)."
        )
    return es.scale(1.0 / norm)


def _tes(
    intervals: Sequence[Interval],
    dims: Sequence[int],
    total: float,
    all_dims: Iterable[int],
) -> tuple[StepFunction, list[AliveProfile]]:
    all_dims = sorted(set(all_dims))
    breakpoints, mask = _alive_segments(intervals)
    terms = entropy_terms(np.asarray([i.length for i in intervals]), total)
    dims_array = np.asarray(dims, dtype=np.int64)

    # Group elementary segments whose alive set does not change.
    groups: list[tuple[int, int]] = []
    for k in range(mask.shape[1]):
        if groups and np.array_equal(mask[:, k], mask[:, groups[-1][0]]):
            groups[-1] = (groups[-1][0], k)
        else:
            groups.append((k, k))

    profiles: list[AliveProfile] = []
    starts: list[float] = []
    values: list[float] = []
    for k0, k1 in groups:
        start, end = breakpoints[k0], breakpoints[k1 + 1]
        alive = mask[:, k0]
        width = int(np.count_nonzero(alive))
        if width:
            es_value = math.fsum(terms[alive].tolist())
            tes_value = (end - start) / width * es_value
        else:
            tes_value = 0.0
        counts = {d: int(np.count_nonzero(dims_array[alive] == d)) for d in all_dims}
        profiles.append(
            AliveProfile(segment=(start, end), betti=counts, tes=tes_value)
        )
        starts.append(start)
        values.append(tes_value)

    if groups:
        starts.append(breakpoints[groups[-1][1] + 1])
    return StepFunction.from_segments(starts, values), profiles


def tes_function(a: Barcode) -> tuple[StepFunction, list[AliveProfile]]:
    """The time-based entropy summary function and its alive profiles.

    On each maximal segment where the alive set is constant, the value is the
    ES-function times the segment length divided by the number of alive
    intervals (0 where nothing is alive).
    """
    total = _require_summary_input(a, "tes_function")
    dim = a.dim if a.dim is not None else 0
    return _tes(a.intervals, [dim] * a.n, total, [dim])


def pooled_tes_function(
    barcodes: Mapping[int, Barcode],
) -> tuple[StepFunction, list[AliveProfile]]:
    """TES-function of the barcodes of all dimensions pooled together; the
    profiles count alive intervals per dimension."""
    pooled, dims = merge_barcodes(barcodes)
    total = _require_summary_input(pooled, "pooled_tes_function")
    return _tes(pooled.intervals, dims, total, barcodes.keys())


def feature_ranking(
    barcodes: Mapping[int, Barcode],
    inf_policy: InfPolicyConfig,
    top_k: int | None = None,
) -> list[AliveProfile]:
    """Candidate topological features, best first.

    Segments are ranked by TES value (ties by start time); segments where
    nothing is alive and the contractible profile are skipped, and each Betti
    profile is reported once, at its best segment.
    """
    if not barcodes:
        raise PreconditionError("feature_ranking needs at least one barcode.")
    if sorted(barcodes) != list(range(len(barcodes))):
        raise PreconditionError(
            f"feature_ranking needs dimensions 0..k, got {sorted(barcodes)}."
        )
    if top_k is not None and top_k < 1:
        raise PreconditionError(f"top_k must be positive, got {top_k}.")

    resolved = inf_policy.resolve(barcodes)
    if any(not is_finite(b) for b in resolved.values()):
        raise PreconditionError(
            f"The {inf_policy.kind!r} policy left infinite intervals unresolved."
        )

    pooled, _ = merge_barcodes(resolved)
    if pooled.total_length <= 0.0:
        log.debug("Resolved barcodes have zero total length; no features.")
        return []

    _, profiles = pooled_tes_function(resolved)
    candidates = sorted(
        (p for p in profiles if p.alive > 0 and not p.is_contractible()),
        key=lambda p: (-p.tes_value, p.segment[0]),
    )

    ranking: list[AliveProfile] = []
    seen: set[tuple[tuple[int, int], ...]] = set()
    for profile in candidates:
        if (key := profile.betti_key()) in seen:
            continue
        seen.add(key)
        ranking.append(profile)
        if top_k is not None and len(ranking) == top_k:
            break

    log.debug(f"Ranked {len(ranking)} feature(s) out of {len(profiles)} segment(s).")
    return ranking
