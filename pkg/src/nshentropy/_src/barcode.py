from __future__ import annotations

import logging
import math
import numbers
from collections.abc import Iterable, Mapping, Sequence
from typing import Annotated, Any, ClassVar, NamedTuple

from pydantic import PlainSerializer, PlainValidator
from pydantic_core import PydanticCustomError
from typing_extensions import Self

from .config import Config, ConfigDict
from .errors import PreconditionError

log = logging.getLogger(__name__)

TOLERANCE = 1e-12
"""Absolute tolerance of the subspace predicates."""


class Interval(NamedTuple):
    """One persistence class: born at `birth`, dead at `death` (possibly `math.inf`)."""

    birth: float
    death: float

    @property
    def length(self) -> float:
        return self.death - self.birth

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.death)


def _parse_endpoint(value: Any, *, name: str) -> float:
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf
        raise PydanticCustomError(
            "interval_endpoint",
            'Endpoint "{name}" must be a number or "inf", got {value!r}.',
            {"name": name, "value": value},
        )
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise PydanticCustomError(
            "interval_endpoint",
            'Endpoint "{name}" must be a number, got {type}.',
            {"name": name, "type": type(value).__name__},
        )
    return float(value)


def _validate_interval(value: Any) -> Interval:
    if isinstance(value, Mapping):
        value = (value.get("birth"), value.get("death"))
    if isinstance(value, (str, bytes)) or not isinstance(value, Sequence):
        raise PydanticCustomError(
            "interval_shape",
            "An interval must be a [birth, death] pair, got {value!r}.",
            {"value": value},
        )
    if len(value) != 2:
        raise PydanticCustomError(
            "interval_shape",
            "An interval must have exactly two endpoints, got {n}.",
            {"n": len(value)},
        )

    birth = _parse_endpoint(value[0], name="birth")
    death = _parse_endpoint(value[1], name="death")
    if not math.isfinite(birth):
        raise PydanticCustomError(
            "interval_birth",
            "Interval birth must be finite, got {birth}.",
            {"birth": birth},
        )
    if math.isnan(death) or death < birth:
        raise PydanticCustomError(
            "interval_order",
            "Interval birth must not exceed its death, got [{birth}, {death}].",
            {"birth": birth, "death": death},
        )
    return Interval(birth, death)


def _validate_intervals(value: Any) -> tuple[Interval, ...]:
    if isinstance(value, (str, bytes)) or not isinstance(value, Iterable):
        raise PydanticCustomError(
            "intervals_shape",
            "Intervals must be a list of [birth, death] pairs.",
        )
    return tuple(_validate_interval(v) for v in value)


def _dump_endpoint(value: float) -> float | str:
    return "inf" if value == math.inf else value


def _dump_intervals(intervals: tuple[Interval, ...]) -> list[list[float | str]]:
    return [[i.birth, _dump_endpoint(i.death)] for i in intervals]


Intervals = Annotated[
    tuple[Interval, ...],
    PlainValidator(_validate_intervals),
    PlainSerializer(_dump_intervals, when_used="json"),
]


class Barcode(Config):
    """A finite multiset of intervals, optionally tagged with a homology dimension.

    On disk a barcode is ``{"dim": 1, "intervals": [[0.5, 1.2], [0.7, "inf"]]}``.
    Instances are immutable.
    """

    model_config: ClassVar[ConfigDict] = ConfigDict(frozen=True)  # type: ignore

    dim: int | None = None
    """Homology dimension of the intervals, if known."""

    intervals: Intervals = ()
    """The intervals, in no particular order."""

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[Sequence[float | str]],
        dim: int | None = None,
    ) -> Self:
        return cls(dim=dim, intervals=tuple(_validate_interval(p) for p in pairs))

    def replace(self, intervals: Iterable[Interval]) -> Self:
        """A barcode with the same dimension tag and new intervals."""
        return type(self)(dim=self.dim, intervals=tuple(intervals))

    @property
    def n(self) -> int:
        """Number of intervals."""
        return len(self.intervals)

    @property
    def total_length(self) -> float:
        """Sum of the lengths of the finite intervals."""
        return math.fsum(i.length for i in self.intervals if i.is_finite)

    @property
    def m_inf(self) -> int:
        """Number of intervals with infinite death."""
        return sum(1 for i in self.intervals if not i.is_finite)

    def lengths(self) -> tuple[float, ...]:
        return tuple(i.length for i in self.intervals)

    def finite_part(self) -> tuple[Interval, ...]:
        return tuple(i for i in self.intervals if i.is_finite)

    def infinite_part(self) -> tuple[Interval, ...]:
        return tuple(i for i in self.intervals if not i.is_finite)

    def sorted(self) -> Self:
        """Canonical ordering (by birth, then death), for multiset comparisons."""
        return self.replace(sorted(self.intervals))


def is_finite(b: Barcode) -> bool:
    """Whether `b` lies in B_F (no infinite deaths)."""
    return all(i.is_finite for i in b.intervals)


def is_origin(b: Barcode) -> bool:
    """Whether `b` lies in B_0 (every interval born at 0)."""
    return all(abs(i.birth) <= TOLERANCE for i in b.intervals)


def is_normalized(b: Barcode) -> bool:
    """Whether `b` lies in B_N (lengths sum to 1).

    Raises:
        PreconditionError: If `b` has an infinite interval.
    """
    _require_finite(b, "is_normalized")
    return abs(b.total_length - 1.0) <= TOLERANCE


def _require_finite(b: Barcode, operation: str) -> None:
    if not is_finite(b):
        raise PreconditionError(
            f"{operation} requires a barcode with finite intervals only; "
            f"got {b.m_inf} infinite interval(s). Project it with "
            "truncate_relative or truncate_absolute first."
        )


def _require_positive_length(b: Barcode, operation: str) -> float:
    if (total := b.total_length) <= 0.0:
        raise PreconditionError(
            f"{operation} requires a positive total length, got L={total} "
            f"for a barcode of {b.n} interval(s)."
        )
    return total


def project_origin(b: Barcode) -> Barcode:
    """Slide every interval to the origin: [x, y] becomes [0, y - x]."""
    _require_finite(b, "project_origin")
    return b.replace(Interval(0.0, i.length) for i in b.intervals)


def normalize(b: Barcode) -> Barcode:
    """Divide the lengths of an origin-born finite barcode by their total."""
    _require_finite(b, "normalize")
    if not is_origin(b):
        raise PreconditionError("normalize requires every interval to be born at 0.")
    total = _require_positive_length(b, "normalize")
    return b.replace(Interval(0.0, i.length / total) for i in b.intervals)


def psi(b: Barcode) -> Barcode:
    """`normalize(project_origin(b))`."""
    return normalize(project_origin(b))


def truncate_relative(b: Barcode, c: float) -> Barcode:
    """Replace each infinite death by ``u + c``, where u is the largest finite
    coordinate (birth or death) of `b`."""
    if c < 0 or not math.isfinite(c):
        raise PreconditionError(f"truncate_relative needs a finite c >= 0, got {c}.")
    if not b.intervals:
        raise PreconditionError("truncate_relative needs a nonempty barcode.")

    u = max(
        max(i.birth for i in b.intervals),
        max((i.death for i in b.intervals if i.is_finite), default=-math.inf),
    )
    z = u + c
    if b.m_inf:
        log.debug(f"Truncating {b.m_inf} infinite interval(s) at {z}.")
    return b.replace(i if i.is_finite else Interval(i.birth, z) for i in b.intervals)


def truncate_absolute(family: Sequence[Barcode], c: float) -> list[Barcode]:
    """Replace each infinite death of every barcode in `family` by `c`.

    Raises:
        PreconditionError: If `c` is below a birth or a finite death of the family.
    """
    if not math.isfinite(c):
        raise PreconditionError(f"truncate_absolute needs a finite c, got {c}.")

    coordinates = [
        x for b in family for i in b.intervals for x in (i.birth, i.death) if math.isfinite(x)
    ]
    if coordinates and c < (largest := max(coordinates)):
        raise PreconditionError(
            f"truncate_absolute needs c >= every birth and finite death "
            f"of the family ({largest}), got {c}."
        )

    return [
        b.replace(i if i.is_finite else Interval(i.birth, c) for i in b.intervals)
        for b in family
    ]


def scale_barcode(b: Barcode, c: float) -> Barcode:
    """Multiply every endpoint by ``c > 0``."""
    if not c > 0:
        raise PreconditionError(f"scale factor must be positive, got {c}.")
    return b.replace(Interval(c * i.birth, c * i.death) for i in b.intervals)


def merge_barcodes(barcodes: Mapping[int, Barcode]) -> tuple[Barcode, tuple[int, ...]]:
    """Pool the barcodes of several dimensions into one untagged barcode.

    Returns the pooled barcode and, position by position, the dimension each
    of its intervals came from.
    """
    intervals: list[Interval] = []
    dims: list[int] = []
    for dim in sorted(barcodes):
        for i in barcodes[dim].intervals:
            intervals.append(i)
            dims.append(dim)
    return Barcode(dim=None, intervals=tuple(intervals)), tuple(dims)
