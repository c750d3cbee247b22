from __future__ import annotations

import math
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

import nshentropy as E

# The oracles are brute force, so the default profile stays small.
settings.register_profile("dev", max_examples=50, deadline=None)
settings.register_profile(
    "thorough",
    max_examples=500,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("NSHENTROPY_HYPOTHESIS_PROFILE", "dev"))

# Coordinates are multiples of 1/4 so that midpoints, differences and small
# powers are exact in floating point.
QUARTER = 0.25


@st.composite
def intervals(draw, max_birth: int = 40, max_length: int = 40, positive: bool = True):
    birth = draw(st.integers(0, max_birth)) * QUARTER
    length = draw(st.integers(1 if positive else 0, max_length)) * QUARTER
    return E.Interval(birth, birth + length)


@st.composite
def barcodes(
    draw,
    min_size: int = 1,
    max_size: int = 8,
    positive: bool = True,
    infinite: int = 0,
):
    """Finite barcodes with quarter-integer endpoints, plus `infinite`
    intervals of infinite death."""
    found = draw(st.lists(intervals(positive=positive), min_size=min_size, max_size=max_size))
    for _ in range(infinite):
        found.append(E.Interval(draw(st.integers(0, 40)) * QUARTER, math.inf))
    return E.Barcode(intervals=tuple(found))


@st.composite
def nearby_pairs(draw, max_size: int = 8):
    """A barcode and a small perturbation of it (moved endpoints, a few short
    intervals added or removed), so that their relative error is usually small."""
    a = draw(barcodes(min_size=2, max_size=max_size))
    moved: list[E.Interval] = []
    for i in a.intervals:
        shift_birth = draw(st.integers(-1, 1)) * QUARTER
        shift_death = draw(st.integers(-1, 1)) * QUARTER
        birth = max(0.0, i.birth + shift_birth)
        death = max(birth, i.death + shift_death)
        moved.append(E.Interval(birth, death))
    if draw(st.booleans()) and len(moved) < max_size:
        start = draw(st.integers(0, 40)) * QUARTER
        moved.append(E.Interval(start, start + QUARTER))
    if draw(st.booleans()) and len(moved) > 2:
        moved.pop(draw(st.integers(0, len(moved) - 1)))
    b = E.Barcode(intervals=tuple(moved))
    return a, b


@st.composite
def point_clouds(draw, min_size: int = 1, max_size: int = 7, dim: int = 2):
    n = draw(st.integers(min_size, max_size))
    seed = draw(st.integers(0, 2**32 - 1))
    return np.random.default_rng(seed).uniform(0.0, 1.0, size=(n, dim))


@pytest.fixture
def unit_square() -> np.ndarray:
    return np.asarray([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


@pytest.fixture
def four_equal() -> E.Barcode:
    return E.Barcode.from_pairs([[0, 1], [1, 2], [2, 3], [3, 4]])
