from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.special import entr

from .barcode import Barcode, is_finite
from .errors import PreconditionError
from .metric import bottleneck, relative_error

log = logging.getLogger(__name__)

MAX_RELATIVE_ERROR = 0.25
"""The entropy stability bound holds for relative errors strictly below this."""

TABLE_NS: tuple[int, ...] = tuple(range(10, 5011, 500))
TABLE_RS: tuple[float, ...] = (0.1, 0.05, 0.025, 0.01)


@dataclass(frozen=True)
class EntropyReport:
    entropy: float
    """Persistent entropy, in units of `base` (nats by default)."""
    n: int
    """Number of intervals."""
    n_positive: int
    """Number of intervals of positive length."""
    total_length: float
    max_entropy: float
    """``log(n_positive)``, the largest entropy a barcode of this size can have."""
    base: float = math.e


def entropy_terms(lengths: np.ndarray, total: float) -> np.ndarray:
    """``-(ℓ_i/L) log(ℓ_i/L)`` per interval, zero for zero-length intervals."""
    return entr(lengths / total)


def persistent_entropy(a: Barcode, *, base: float = math.e) -> EntropyReport:
    """Shannon entropy of the normalized interval lengths of a finite barcode.

    Raises:
        PreconditionError: If `a` is empty, has an infinite interval, or has
            zero total length.
    """
    if not a.intervals:
        raise PreconditionError("persistent_entropy requires a nonempty barcode.")
    if not is_finite(a):
        raise PreconditionError(
            f"persistent_entropy requires finite intervals; got {a.m_inf} infinite "
            "interval(s). Project the barcode with truncate_relative or "
            "truncate_absolute first."
        )
    if (total := a.total_length) <= 0.0:
        raise PreconditionError("persistent_entropy requires a positive total length.")
    if not base > 1.0:
        raise PreconditionError(f"The logarithm base must exceed 1, got {base}.")

    lengths = np.asarray(a.lengths(), dtype=np.float64)
    scale = math.log(base)
    value = math.fsum(entropy_terms(lengths, total).tolist()) / scale
    n_positive = int(np.count_nonzero(lengths > 0.0))
    return EntropyReport(
        entropy=value,
        n=a.n,
        n_positive=n_positive,
        total_length=total,
        max_entropy=math.log(n_positive) / scale,
        base=base,
    )


def _check_relative_error(r: float) -> None:
    if not 0.0 < r < MAX_RELATIVE_ERROR:
        raise PreconditionError(
            f"The entropy stability bound needs 0 < r < {MAX_RELATIVE_ERROR}, got {r}."
        )


def entropy_stability_bound(r: float, n_max: int) -> float:
    """``2r (log n_max - log 2r)``: a bound on ``|E(A) - E(B)|`` when ``r_p(A, B) = r``."""
    _check_relative_error(r)
    if n_max < 1:
        raise PreconditionError(f"n_max must be at least 1, got {n_max}.")
    return 2.0 * r * (math.log(n_max) - math.log(2.0 * r))


def relative_bound(r: float, n_max: int) -> float:
    """The stability bound divided by ``log n_max``; tends to ``2r`` as n_max grows."""
    if n_max < 2:
        raise PreconditionError(
            f"The relative bound divides by log(n_max) and needs n_max >= 2, got {n_max}."
        )
    return entropy_stability_bound(r, n_max) / math.log(n_max)


def bound_table(
    ns: Sequence[int] = TABLE_NS,
    rs: Sequence[float] = TABLE_RS,
) -> np.ndarray:
    """Relative bounds for every ``(n, r)``: entry ``[i, j]`` is
    ``relative_bound(rs[j], ns[i])``."""
    table = np.empty((len(ns), len(rs)), dtype=np.float64)
    for i, n in enumerate(ns):
        for j, r in enumerate(rs):
            table[i, j] = relative_bound(r, n)
    return table


def filter_stability_bound(delta: float, ell_max: float, n_max: int) -> float:
    """``q (log n_max - log q)`` with ``q = 4δ/ℓ_max``.

    Bounds the entropy change between barcodes of two filters at sup-distance
    δ, or of two Rips filtrations at Gromov-Hausdorff distance δ, provided
    ``d_∞(A, B) <= ℓ_max / 8`` (see `bottleneck_hypothesis_holds`; checking it
    is the caller's responsibility).
    """
    if delta < 0 or not ell_max > 0:
        raise PreconditionError(
            f"filter_stability_bound needs delta >= 0 and ell_max > 0, got {delta}, {ell_max}."
        )
    if n_max < 1:
        raise PreconditionError(f"n_max must be at least 1, got {n_max}.")
    if delta == 0.0:
        return 0.0
    q = 4.0 * delta / ell_max
    if not q < 1.0:
        raise PreconditionError(
            f"filter_stability_bound needs 4·delta/ell_max < 1, got {q}."
        )
    return q * (math.log(n_max) - math.log(q))


def max_average_length(a: Barcode, b: Barcode) -> float:
    """``ℓ_max = max{L_a, L_b} / n_max``."""
    n_max = max(a.n, b.n)
    if n_max == 0:
        raise PreconditionError("max_average_length needs at least one interval.")
    return max(a.total_length, b.total_length) / n_max


def bottleneck_hypothesis_holds(a: Barcode, b: Barcode) -> bool:
    """Whether ``d_∞(a, b) <= ℓ_max / 8``, the hypothesis of `filter_stability_bound`."""
    return bottleneck(a, b) <= max_average_length(a, b) / 8.0


def entropy_difference(
    a: Barcode, b: Barcode, p: float
) -> tuple[float, float | None]:
    """``|E(a) - E(b)|`` and the stability bound, or None when ``r_p >= 1/4``."""
    difference = abs(persistent_entropy(a).entropy - persistent_entropy(b).entropy)
    r = relative_error(a, b, p)
    n_max = max(a.n, b.n)
    if r == 0.0:
        bound = 0.0
    elif r < MAX_RELATIVE_ERROR:
        bound = entropy_stability_bound(r, n_max)
    else:
        log.debug(f"Relative error {r} is outside the stability range.")
        bound = None
    return difference, bound


def shannon_entropy(probabilities: Sequence[float] | np.ndarray) -> float:
    """``-Σ p log p`` in nats, with ``0 log 0 = 0``."""
    probs = np.asarray(probabilities, dtype=np.float64)
    if np.any(probs < 0) or not math.isclose(float(probs.sum()), 1.0, abs_tol=1e-9):
        raise PreconditionError("shannon_entropy needs a probability vector.")
    return math.fsum(entr(probs).tolist())


def shannon_stability_bound(l1: float, n: int) -> float:
    """``θ log n - θ log θ`` for ``θ = ||P - Q||_1 <= 1/2``: bounds the entropy
    change between two distributions on n outcomes."""
    if not 0.0 <= l1 <= 0.5:
        raise PreconditionError(f"shannon_stability_bound needs 0 <= l1 <= 1/2, got {l1}.")
    if l1 == 0.0:
        return 0.0
    return l1 * math.log(n) - l1 * math.log(l1)
