from __future__ import annotations

import logging
from collections.abc import Mapping
from pathlib import Path
from types import ModuleType
from typing import TYPE_CHECKING, Any, ClassVar, Literal, get_origin

from pydantic import BaseModel, ConfigDict, PrivateAttr, model_serializer
from typing_extensions import Self, TypedDict, Unpack, override

from .missing import validate_no_missing_values

log = logging.getLogger(__name__)

_DRAFT_CONTEXT = object()


class DumpKwargs(TypedDict, total=False):
    by_alias: bool
    """Write field aliases (e.g. ``betti`` for `alive_count_per_dim`)."""
    exclude_none: bool
    exclude_defaults: bool


def _pydantic_yaml() -> ModuleType:
    try:
        import pydantic_yaml
    except ImportError:
        raise ImportError(
            "Pydantic-yaml is required for YAML support. "
            "Install nshentropy with the yaml extra ('pip install nshentropy[yaml]') "
            "or install it directly ('pip install pydantic-yaml')."
        ) from None
    return pydantic_yaml


class Config(BaseModel):
    """
    Base class for every validated object of the package: barcodes, job
    descriptions and policy settings.

    Subclasses get strict validation, JSON/YAML round trips and draft
    construction: a draft takes any assignment, and `finalize()` validates
    the whole object at once.

        ```python
        job = JobConfig.draft()
        job.command = "entropy"
        job.inputs = [Path("h1.json")]
        job = job.finalize()
        ```
    """

    _is_draft_config: bool = PrivateAttr(default=False)

    model_config: ClassVar[ConfigDict] = ConfigDict(
        protected_namespaces=(),
        validate_assignment=True,
        validate_default=True,
        strict=True,
        revalidate_instances="always",
        arbitrary_types_allowed=True,
        extra="ignore",
        use_attribute_docstrings=True,
    )

    @classmethod
    def __pydantic_init_subclass__(cls, **kwargs: Any) -> None:
        super().__pydantic_init_subclass__(**kwargs)

        from .registry import registries_of_field

        seen: set[int] = set()
        for name, field in cls.model_fields.items():
            for registry in registries_of_field(field):
                if id(registry) in seen:
                    continue
                seen.add(id(registry))
                log.debug(f"{cls.__name__}.{name} resolves through {registry}.")
                registry.on_register(lambda _: cls._rebuild_for_registry())

    @classmethod
    def _rebuild_for_registry(cls) -> None:
        cls.model_rebuild(force=True, raise_errors=False)
        log.debug(f"Rebuilt the schema of {cls.__name__} after a registration.")

    def __draft_pre_init__(self):
        """Hook run on a draft right before it is validated."""

    def __post_init__(self):
        """Hook run after validation; raise `ValueError` to reject the config."""

    @override
    def model_post_init(self, context: Any, /) -> None:
        super().model_post_init(context)
        if context is _DRAFT_CONTEXT:
            return
        self.__post_init__()
        validate_no_missing_values(self)

    # region Drafts
    @classmethod
    def draft(cls, **values: Any) -> Self:
        """An unvalidated instance: defaults filled in, `values` taken as given."""
        fields: dict[str, Any] = {}
        given: set[str] = set()
        for name, field in cls.model_fields.items():
            key = field.alias if field.alias in values else name
            if key in values:
                fields[name] = values.pop(key)
                given.add(name)
            elif not field.is_required():
                fields[name] = field.get_default(call_default_factory=True)

        instance = cls.__new__(cls)
        object.__setattr__(instance, "__dict__", fields)
        object.__setattr__(instance, "__pydantic_fields_set__", given)
        object.__setattr__(instance, "__pydantic_extra__", None)
        instance.model_post_init(_DRAFT_CONTEXT)
        instance._is_draft_config = True
        return instance

    def finalize(self, strict: bool = False) -> Self:
        """Validate a draft and return the final config.

        Drafts are usually filled from command-line strings and YAML scalars,
        so finalization is lax by default.
        """
        if not self._is_draft_config:
            raise ValueError("Finalize can only be called on drafts.")
        self.__draft_pre_init__()
        return self.model_deep_validate(strict=strict)

    def model_deep_validate(self, strict: bool = True) -> Self:
        """Validate this config and every nested config from scratch."""
        config = self.model_validate(self.model_dump(round_trip=True), strict=strict)
        if config._is_draft_config:
            raise ValueError("Draft configs are not valid. Call `finalize` first.")
        return config

    if not TYPE_CHECKING:

        @override
        def __setattr__(self, name: str, value: Any) -> None:
            if name in type(self).model_fields and self._is_draft_config:
                # Drafts are checked as a whole by `finalize`.
                self.__dict__[name] = value
                self.__pydantic_fields_set__.add(name)
                return
            super().__setattr__(name, value)

    # endregion

    @model_serializer(mode="wrap")
    def include_literals(self, next_serializer):
        """Always dump `Literal` fields, even with `exclude_defaults`, so that
        registry tags survive a round trip."""
        dumped = next_serializer(self)
        if isinstance(dumped, dict):
            for name, field in type(self).model_fields.items():
                if get_origin(field.annotation) is Literal:
                    dumped[name] = getattr(self, name)
        return dumped

    # region Serialization
    @classmethod
    def from_dict(cls, config_dict: Mapping[str, Any]) -> Self:
        return cls.model_validate(dict(config_dict))

    def to_dict(self) -> dict[str, Any]:
        """JSON-compatible dictionary (``inf`` is written as ``"inf"``)."""
        return self.model_dump(mode="json")

    def to_json_str(self, /, indent: int | None = 4, **kwargs: Unpack[DumpKwargs]) -> str:
        return self.model_dump_json(indent=indent, **kwargs)

    def to_json_file(
        self,
        path: str | Path,
        /,
        indent: int | None = 4,
        **kwargs: Unpack[DumpKwargs],
    ) -> None:
        Path(path).write_text(self.to_json_str(indent=indent, **kwargs), encoding="utf-8")

    @classmethod
    def from_json_str(cls, json_str: str | bytes, /) -> Self:
        return cls.model_validate_json(json_str)

    @classmethod
    def from_json_file(cls, path: str | Path, /) -> Self:
        return cls.from_json_str(Path(path).read_text(encoding="utf-8"))

    def to_yaml_str(self, /, indent: int | None = 4) -> str:
        """Dump to YAML.

        Raises:
            ImportError: If pydantic-yaml is not installed
        """
        return _pydantic_yaml().to_yaml_str(self, indent=indent, sequence_dash_offset=0)

    def to_yaml_file(self, path: str | Path, /, indent: int | None = 4) -> None:
        Path(path).write_text(self.to_yaml_str(indent=indent), encoding="utf-8")

    @classmethod
    def yaml_dict(cls, path: str | Path, /) -> dict[str, Any]:
        """Read a YAML file into a plain dictionary without validating it,
        e.g. to seed a draft completed from the command line.

        Raises:
            ImportError: If pydantic-yaml is not installed
        """
        return _pydantic_yaml().parse_yaml_file_as(dict[str, Any], path)

    @classmethod
    def from_yaml(cls, path: str | Path, /) -> Self:
        return cls.model_validate(cls.yaml_dict(path), strict=False)

    # endregion
