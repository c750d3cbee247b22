from __future__ import annotations

from typing import TYPE_CHECKING, Annotated, Any, cast

from pydantic import BaseModel
from pydantic_core import PydanticCustomError
from typing_extensions import TypeAliasType, TypeVar


class _MissingMarker:
    """Metadata tagging a field declared as `AllowMissing[...]`."""


MISSING = cast(Any, None)
"""Placeholder for a value that must be supplied before a draft is finalized.

Typed as `Any`, so it can be the default of a field of any type while the
field still reads as required to a type checker."""

T = TypeVar("T", infer_variance=True)

# At runtime the field also accepts None, the value behind `MISSING`.
if TYPE_CHECKING:
    AllowMissing = TypeAliasType(
        "AllowMissing", Annotated[T, _MissingMarker()], type_params=(T,)
    )
else:
    AllowMissing = TypeAliasType(
        "AllowMissing", Annotated[T | None, _MissingMarker()], type_params=(T,)
    )


def missing_fields(model: BaseModel) -> list[str]:
    """Names of the `AllowMissing` fields of `model` still holding `MISSING`."""
    return [
        name
        for name, field in type(model).model_fields.items()
        if any(isinstance(m, _MissingMarker) for m in field.metadata)
        and getattr(model, name, MISSING) is MISSING
    ]


def validate_no_missing_values(model: BaseModel) -> None:
    if names := missing_fields(model):
        raise PydanticCustomError(
            "field_MISSING",
            "Field(s) {names} are still `MISSING`. Please provide a value.",
            {"names": ", ".join(names)},
        )
