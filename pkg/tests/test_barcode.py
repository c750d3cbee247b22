from __future__ import annotations

import math

import pydantic
import pytest
from hypothesis import given, settings

import nshentropy as E

from .conftest import barcodes


def test_from_pairs_parses_inf():
    b = E.Barcode.from_pairs([[0, 1], [0.5, "inf"]], dim=1)
    assert b.dim == 1
    assert b.intervals == (E.Interval(0.0, 1.0), E.Interval(0.5, math.inf))
    assert b.n == 2
    assert b.m_inf == 1
    assert b.total_length == 1.0


@pytest.mark.parametrize(
    "pairs",
    [
        [[2, 1]],
        [["inf", "inf"]],
        [[0, "never"]],
        [[0, 1, 2]],
        [[True, 1]],
        [[0, float("nan")]],
    ],
)
def test_invalid_intervals(pairs):
    with pytest.raises(pydantic.ValidationError):
        E.Barcode(intervals=pairs)


def test_json_writes_inf_as_string():
    b = E.Barcode.from_pairs([[0, 1.5], [0.25, "inf"]], dim=0)
    json_str = b.to_json_str(indent=None)
    assert '"inf"' in json_str

    loaded = E.Barcode.from_json_str(json_str)
    assert loaded == b


def test_json_accepts_objects_and_integers():
    b = E.Barcode.from_json_str(
        '{"dim": 1, "intervals": [{"birth": 0, "death": 2}, [1, "Infinity"]]}'
    )
    assert b.intervals == (E.Interval(0.0, 2.0), E.Interval(1.0, math.inf))


def test_barcode_is_immutable():
    b = E.Barcode.from_pairs([[0, 1]])
    with pytest.raises(pydantic.ValidationError):
        b.dim = 2


def test_predicates():
    b = E.Barcode.from_pairs([[0, 0.25], [0, 0.75]])
    assert E.is_finite(b)
    assert E.is_origin(b)
    assert E.is_normalized(b)

    shifted = E.Barcode.from_pairs([[1, 2]])
    assert not E.is_origin(shifted)
    assert not E.is_normalized(shifted)

    infinite = E.Barcode.from_pairs([[0, "inf"]])
    assert not E.is_finite(infinite)
    with pytest.raises(E.PreconditionError):
        E.is_normalized(infinite)


def test_empty_barcode_predicates():
    empty = E.Barcode()
    assert E.is_finite(empty)
    assert E.is_origin(empty)
    assert not E.is_normalized(empty)


def test_projections():
    b = E.Barcode.from_pairs([[1, 3], [2, 3]], dim=1)

    origin = E.project_origin(b)
    assert origin.intervals == (E.Interval(0.0, 2.0), E.Interval(0.0, 1.0))
    assert origin.dim == 1

    normalized = E.psi(b)
    assert normalized.lengths() == pytest.approx((2 / 3, 1 / 3))
    assert E.is_normalized(normalized)
    assert E.is_origin(normalized)


def test_normalize_preconditions():
    with pytest.raises(E.PreconditionError):
        E.normalize(E.Barcode.from_pairs([[1, 2]]))
    with pytest.raises(E.PreconditionError):
        E.normalize(E.Barcode.from_pairs([[0, 0], [0, 0]]))
    with pytest.raises(E.PreconditionError):
        E.project_origin(E.Barcode.from_pairs([[0, "inf"]]))


def test_truncate_relative():
    b = E.Barcode.from_pairs([[0, 1], [2, "inf"]])
    # The largest finite coordinate is the birth 2.
    assert E.truncate_relative(b, 0.0).intervals[1] == E.Interval(2.0, 2.0)
    assert E.truncate_relative(b, 1.5).intervals[1] == E.Interval(2.0, 3.5)

    finite = E.Barcode.from_pairs([[0, 1]])
    assert E.truncate_relative(finite, 3.0) == finite


def test_truncate_relative_preconditions():
    b = E.Barcode.from_pairs([[0, "inf"]])
    with pytest.raises(E.PreconditionError):
        E.truncate_relative(b, -1.0)
    with pytest.raises(E.PreconditionError):
        E.truncate_relative(E.Barcode(), 0.0)


def test_truncate_absolute():
    family = [
        E.Barcode.from_pairs([[0, 1], [0, "inf"]], dim=0),
        E.Barcode.from_pairs([[0.5, 3]], dim=1),
    ]
    truncated = E.truncate_absolute(family, 4.0)
    assert truncated[0].intervals == (E.Interval(0.0, 1.0), E.Interval(0.0, 4.0))
    assert truncated[1] == family[1]

    with pytest.raises(E.PreconditionError):
        E.truncate_absolute(family, 2.0)
    with pytest.raises(E.PreconditionError):
        E.truncate_absolute(family, math.inf)


def test_scale_barcode():
    b = E.Barcode.from_pairs([[1, 2], [0, "inf"]])
    scaled = E.scale_barcode(b, 2.0)
    assert scaled.intervals == (E.Interval(2.0, 4.0), E.Interval(0.0, math.inf))
    with pytest.raises(E.PreconditionError):
        E.scale_barcode(b, 0.0)


def test_merge_barcodes():
    pooled, dims = E.merge_barcodes(
        {
            1: E.Barcode.from_pairs([[1, 2]], dim=1),
            0: E.Barcode.from_pairs([[0, 1], [0, "inf"]], dim=0),
        }
    )
    assert pooled.dim is None
    assert pooled.intervals == (
        E.Interval(0.0, 1.0),
        E.Interval(0.0, math.inf),
        E.Interval(1.0, 2.0),
    )
    assert dims == (0, 0, 1)


def test_sorted_is_a_multiset_key():
    a = E.Barcode.from_pairs([[1, 2], [0, 3], [0, 1]])
    b = E.Barcode.from_pairs([[0, 1], [1, 2], [0, 3]])
    assert a != b
    assert a.sorted() == b.sorted()


@settings(max_examples=200, deadline=None)
@given(b=barcodes(max_size=10, positive=False))
def test_project_origin_is_idempotent(b: E.Barcode):
    once = E.project_origin(b)
    assert E.project_origin(once) == once
    assert E.is_origin(once)
    assert once.n == b.n


@settings(max_examples=200, deadline=None)
@given(b=barcodes(max_size=10))
def test_psi_is_normalized(b: E.Barcode):
    assert E.is_normalized(E.psi(b))


@settings(max_examples=200, deadline=None)
@given(a=barcodes(max_size=6, infinite=2), b=barcodes(max_size=6, infinite=1))
def test_truncations_keep_finite_intervals(a: E.Barcode, b: E.Barcode):
    relative = E.truncate_relative(a, 1.0)
    c = 1.0 + max(
        x for barcode in (a, b) for i in barcode.intervals for x in i if math.isfinite(x)
    )
    absolute = E.truncate_absolute([a, b], c)

    for original, truncated in [(a, relative), (a, absolute[0]), (b, absolute[1])]:
        assert E.is_finite(truncated)
        assert truncated.n == original.n
        for before, after in zip(original.intervals, truncated.intervals):
            if before.is_finite:
                assert after == before
            else:
                assert after.birth == before.birth
