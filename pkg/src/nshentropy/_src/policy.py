from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from collections.abc import Mapping
from typing import Literal

from typing_extensions import override

from .barcode import Barcode, merge_barcodes, truncate_absolute, truncate_relative
from .config import Config
from .registry import Registry

log = logging.getLogger(__name__)


class InfPolicyConfig(Config, ABC):
    """How infinite intervals are made finite before entropy-based summaries."""

    kind: str

    @abstractmethod
    def resolve(self, barcodes: Mapping[int, Barcode]) -> dict[int, Barcode]:
        """Return the per-dimension barcodes with no infinite interval left."""
        ...


inf_policy_registry = Registry(InfPolicyConfig, discriminator="kind")


@inf_policy_registry.register
class TauPolicyConfig(InfPolicyConfig):
    """Infinite deaths become ``u + constant``, u being the largest finite
    coordinate over all dimensions together."""

    kind: Literal["tau"] = "tau"

    constant: float = 0.0
    """Offset added to the largest finite coordinate."""

    @override
    def resolve(self, barcodes: Mapping[int, Barcode]) -> dict[int, Barcode]:
        pooled, dims = merge_barcodes(barcodes)
        if not pooled.intervals:
            return dict(barcodes)

        truncated = truncate_relative(pooled, self.constant).intervals
        return {
            dim: barcodes[dim].replace(
                i for i, d in zip(truncated, dims, strict=True) if d == dim
            )
            for dim in barcodes
        }


@inf_policy_registry.register
class PhiPolicyConfig(InfPolicyConfig):
    """Infinite deaths become one fixed `constant`, common to every dimension
    (and to every barcode a job compares)."""

    kind: Literal["phi"] = "phi"

    constant: float
    """Death assigned to infinite intervals; must not precede any finite coordinate."""

    @override
    def resolve(self, barcodes: Mapping[int, Barcode]) -> dict[int, Barcode]:
        dims = sorted(barcodes)
        truncated = truncate_absolute([barcodes[d] for d in dims], self.constant)
        return dict(zip(dims, truncated, strict=True))


@inf_policy_registry.register
class DropPolicyConfig(InfPolicyConfig):
    """Infinite intervals are discarded."""

    kind: Literal["drop"] = "drop"

    @override
    def resolve(self, barcodes: Mapping[int, Barcode]) -> dict[int, Barcode]:
        dropped = sum(b.m_inf for b in barcodes.values())
        if dropped:
            log.debug(f"Dropping {dropped} infinite interval(s).")
        return {dim: b.replace(b.finite_part()) for dim, b in barcodes.items()}
