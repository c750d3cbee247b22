from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Literal

import numpy as np

from .errors import PreconditionError

log = logging.getLogger(__name__)

Pattern = Literal["square", "rectangle"]
PatternSize = Literal["small", "large"]

PATTERN_CELLS: dict[Pattern, tuple[float, float]] = {
    "square": (1.0, 1.0),
    "rectangle": (3.0, 1.0),
}
"""Cell width and height of each quadrilateral tessellation."""

PATTERN_SIZES: dict[PatternSize, int] = {"small": 6, "large": 10}
"""Points per side of the grid."""

NOISE_FRACTION = 0.3
"""Fraction of the points touched by noise."""
REMOVAL_PROBABILITY = 0.25
"""Probability that a touched point is removed rather than displaced."""
MAX_DISPLACEMENT = 0.08
"""Largest displacement per coordinate, relative to the shorter cell side."""


def circle_sample(n: int, seed: int) -> np.ndarray:
    """`n` points drawn uniformly from the unit circle."""
    if n < 1:
        raise PreconditionError(f"A circle sample needs at least one point, got {n}.")
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2.0 * math.pi, size=n)
    return np.column_stack((np.cos(angles), np.sin(angles)))


def pattern_cloud(
    pattern: Pattern,
    size: PatternSize,
    *,
    noisy: bool = False,
    seed: int = 0,
) -> np.ndarray:
    """Vertices of a grid of quadrilateral cells.

    With `noisy`, a fraction of the points is either removed or displaced by
    a small amount; the remaining points are left untouched.
    """
    width, height = PATTERN_CELLS[pattern]
    side = PATTERN_SIZES[size]
    xs, ys = np.meshgrid(np.arange(side) * width, np.arange(side) * height)
    points = np.column_stack((xs.ravel(), ys.ravel()))
    if not noisy:
        return points

    rng = np.random.default_rng(seed)
    touched = rng.random(len(points)) < NOISE_FRACTION
    removed = touched & (rng.random(len(points)) < REMOVAL_PROBABILITY)
    shift = MAX_DISPLACEMENT * min(width, height)
    displacement = rng.uniform(-shift, shift, size=points.shape)
    points = points + displacement * (touched & ~removed)[:, None]
    log.debug(
        f"{pattern}/{size}: removed {int(removed.sum())} and displaced "
        f"{int((touched & ~removed).sum())} of {len(points)} point(s)."
    )
    return points[~removed]


def pattern_family(seed: int = 0) -> dict[str, np.ndarray]:
    """Every pattern at every size, clean and noisy, keyed ``pattern-size-state``."""
    family: dict[str, np.ndarray] = {}
    for k, (pattern, size, noisy) in enumerate(
        (pattern, size, noisy)
        for pattern in PATTERN_CELLS
        for size in PATTERN_SIZES
        for noisy in (False, True)
    ):
        state = "noisy" if noisy else "clean"
        family[f"{pattern}-{size}-{state}"] = pattern_cloud(
            pattern, size, noisy=noisy, seed=seed + k
        )
    return family


def write_point_cloud(path: Path, points: np.ndarray) -> Path:
    """Write one point per line, comma separated, at full precision."""
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.atleast_2d(points), fmt="%.17g", delimiter=",")
    return path
