from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .barcode import Barcode, Interval, is_finite
from .errors import PreconditionError

log = logging.getLogger(__name__)

LOG_SPACE_THRESHOLD = 64.0
"""Above this exponent, matching weights are computed relative to the largest
cost in log space so that ``cost**p`` cannot overflow."""

PLACEHOLDER = Interval(0.0, 0.0)
"""Stand-in for a padding interval; its position is chosen by the matcher."""


@dataclass(frozen=True)
class Matching:
    """An optimal bijection between two padded barcodes.

    Indices refer to the padded barcodes returned by `pad`: positions at or
    beyond a barcode's own length are zero-length padding intervals.
    """

    pairs: tuple[tuple[int, int], ...]
    costs: tuple[float, ...]
    """Per-pair cost ``max{|Δbirth|, |Δdeath|}``, aligned with `pairs`."""
    p: float
    cost: float
    """The distance realized by the matching."""


def _check_p(p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 1:
        raise PreconditionError(f"The Wasserstein exponent must satisfy p >= 1, got {p}.")
    return p


def pad(a: Barcode, b: Barcode) -> tuple[Barcode, Barcode]:
    """Bring both barcodes to ``n_max = max(n_a, n_b)`` intervals.

    The appended intervals are `PLACEHOLDER`s: a padding interval matched to
    ``[x, y]`` is placed at its midpoint by the matcher, which is the optimal
    position for every p.
    """
    n_max = max(a.n, b.n)
    return (
        a.replace(a.intervals + (PLACEHOLDER,) * (n_max - a.n)),
        b.replace(b.intervals + (PLACEHOLDER,) * (n_max - b.n)),
    )


def pair_cost(u: Interval, v: Interval) -> float:
    """``max{|Δbirth|, |Δdeath|}`` with ``|∞ - ∞| = 0``."""
    if u.is_finite != v.is_finite:
        return math.inf
    births = abs(u.birth - v.birth)
    deaths = abs(u.death - v.death) if u.is_finite else 0.0
    return max(births, deaths)


def padding_cost(u: Interval) -> float:
    """Cost of matching ``[x, y]`` to the best-placed zero-length interval."""
    return u.length / 2.0


def matching_cost(costs: Iterable[float], p: float) -> float:
    """The objective ``(Σ c^p)^(1/p)`` (``max c`` for p = ∞) of a set of pair costs.

    Shared by the solver and by brute-force checks so both evaluate a matching
    the same way.
    """
    values = [float(c) for c in costs]
    if not values:
        return 0.0
    largest = max(values)
    if math.isinf(largest):
        return math.inf
    if math.isinf(p):
        return largest
    if largest == 0.0:
        return 0.0
    if p > LOG_SPACE_THRESHOLD:
        log_largest = math.log(largest)
        total = math.fsum(
            math.exp(p * (math.log(c) - log_largest)) for c in values if c > 0.0
        )
        return largest * total ** (1.0 / p)
    return math.fsum(c**p for c in values) ** (1.0 / p)


def _cost_matrix(us: Sequence[Interval], vs: Sequence[Interval]) -> np.ndarray:
    # Only the shorter side is padded, so padding never meets padding.
    k = max(len(us), len(vs))
    costs = np.zeros((k, k), dtype=np.float64)
    for i in range(k):
        for j in range(k):
            if i < len(us) and j < len(vs):
                costs[i, j] = pair_cost(us[i], vs[j])
            elif i < len(us):
                costs[i, j] = padding_cost(us[i])
            elif j < len(vs):
                costs[i, j] = padding_cost(vs[j])
    return costs


def _weights(costs: np.ndarray, p: float) -> np.ndarray:
    largest = costs.max()
    if largest == 0.0:
        return np.zeros_like(costs)
    if p > LOG_SPACE_THRESHOLD:
        with np.errstate(divide="ignore"):
            return np.exp(p * (np.log(costs) - np.log(largest)))
    return costs**p


def _has_perfect_matching(mask: np.ndarray) -> bool:
    matched = maximum_bipartite_matching(
        csr_matrix(mask.astype(np.int8)), perm_type="column"
    )
    return bool(np.all(matched >= 0))


def _solve_bottleneck(costs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Minimize the largest matched cost: binary search over the distinct costs
    for the smallest threshold admitting a perfect matching."""
    thresholds = np.unique(costs)
    lo, hi = 0, len(thresholds) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _has_perfect_matching(costs <= thresholds[mid]):
            hi = mid
        else:
            lo = mid + 1

    matched = maximum_bipartite_matching(
        csr_matrix((costs <= thresholds[lo]).astype(np.int8)), perm_type="column"
    )
    rows = np.arange(costs.shape[0])
    return rows, np.asarray(matched)


def _solve(costs: np.ndarray, p: float) -> tuple[np.ndarray, np.ndarray]:
    if costs.size == 0:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
    if math.isinf(p):
        return _solve_bottleneck(costs)
    return linear_sum_assignment(_weights(costs, p))


def matching(a: Barcode, b: Barcode, p: float = math.inf) -> Matching:
    """An optimal matching realizing the p-Wasserstein distance.

    Infinite intervals are matched among themselves and finite intervals
    among themselves (padded to a common size); when the numbers of infinite
    intervals differ, no finite matching exists and the cost is infinite.
    """
    p = _check_p(p)
    fin_a = [k for k, i in enumerate(a.intervals) if i.is_finite]
    fin_b = [k for k, i in enumerate(b.intervals) if i.is_finite]
    inf_a = [k for k, i in enumerate(a.intervals) if not i.is_finite]
    inf_b = [k for k, i in enumerate(b.intervals) if not i.is_finite]

    if len(inf_a) != len(inf_b):
        log.debug(
            f"Barcodes have {len(inf_a)} and {len(inf_b)} infinite intervals; "
            "their distance is infinite."
        )
        return Matching(pairs=(), costs=(), p=p, cost=math.inf)

    # Padding positions, in padded-barcode index space.
    n_max = max(a.n, b.n)
    pad_a = list(range(a.n, n_max))
    pad_b = list(range(b.n, n_max))

    pairs: list[tuple[int, int]] = []
    costs: list[float] = []
    for index_a, index_b in ((inf_a, inf_b), (fin_a + pad_a, fin_b + pad_b)):
        us = [a.intervals[k] for k in index_a if k < a.n]
        vs = [b.intervals[k] for k in index_b if k < b.n]
        cost_matrix = _cost_matrix(us, vs)
        rows, cols = _solve(cost_matrix, p)
        for r, c in zip(rows.tolist(), cols.tolist()):
            pairs.append((index_a[r], index_b[c]))
            costs.append(float(cost_matrix[r, c]))

    log.debug(f"Matched {len(pairs)} pairs (n_a={a.n}, n_b={b.n}, p={p}).")
    return Matching(
        pairs=tuple(pairs),
        costs=tuple(costs),
        p=p,
        cost=matching_cost(costs, p),
    )


def wasserstein(a: Barcode, b: Barcode, p: float) -> float:
    """The p-Wasserstein distance ``d_p(a, b)``, exact; ``p = math.inf`` gives
    the bottleneck distance."""
    return matching(a, b, p).cost


def bottleneck(a: Barcode, b: Barcode) -> float:
    """The bottleneck distance ``d_∞(a, b)``."""
    return matching(a, b, math.inf).cost


def relative_error(a: Barcode, b: Barcode, p: float) -> float:
    """``r_p = 2 · n_max^(1 - 1/p) · d_p(a, b) / L_max`` (exponent 1 for p = ∞).

    Raises:
        PreconditionError: If either barcode has an infinite interval or both
            have zero total length.
    """
    p = _check_p(p)
    if not (is_finite(a) and is_finite(b)):
        raise PreconditionError(
            "relative_error requires barcodes with finite intervals only."
        )
    if (l_max := max(a.total_length, b.total_length)) <= 0.0:
        raise PreconditionError("relative_error requires L_max > 0.")

    distance = wasserstein(a, b, p)
    if math.isinf(distance):
        raise PreconditionError("relative_error is undefined for an infinite distance.")

    n_max = max(a.n, b.n)
    exponent = 1.0 if math.isinf(p) else 1.0 - 1.0 / p
    return 2.0 * n_max**exponent * distance / l_max
