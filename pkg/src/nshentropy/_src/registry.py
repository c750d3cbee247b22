from __future__ import annotations

import dataclasses
import logging
import typing
from collections.abc import Callable
from typing import Any, Generic, Literal, TypedDict, TypeVar, cast

from pydantic import Field, GetCoreSchemaHandler, TypeAdapter
from pydantic.fields import FieldInfo
from pydantic_core import core_schema
from typing_extensions import assert_never

from .config import Config

log = logging.getLogger(__name__)

TConfig = TypeVar("TConfig", bound=Config, covariant=True)
TClass = TypeVar("TClass", bound=type[Config])


def _literal_tag(cls: type[Config], discriminator: str) -> str:
    """The single value of the `Literal` annotation of `cls.<discriminator>`."""
    if (field := cls.model_fields.get(discriminator)) is None:
        raise ValueError(f"{cls} does not have a field `{discriminator}`")

    annotation = field.annotation
    while typing.get_origin(annotation) is typing.Annotated:
        annotation = typing.get_args(annotation)[0]
    if typing.get_origin(annotation) is not Literal or len(typing.get_args(annotation)) != 1:
        raise ValueError(
            f"The discriminator field `{discriminator}` of {cls} should be a "
            f"Literal with exactly one value. Got {annotation}."
        )
    return typing.get_args(annotation)[0]


class RegistryConfig(TypedDict, total=False):
    """Options of a `Registry`.

    Attributes:
        duplicate_tag_policy: How a second class claiming an existing tag is handled.
            - "warn-and-ignore": keep the original class
            - "warn-and-replace": replace it with the new class
            - "error": raise
        auto_rebuild: Rebuild models with a `DynamicResolution()` field whenever
            a class is registered. Default is True.
    """

    duplicate_tag_policy: Literal["warn-and-ignore", "warn-and-replace", "error"]
    auto_rebuild: bool


@dataclasses.dataclass
class Registry(Generic[TConfig]):
    """A dynamic discriminated union of `Config` subclasses.

    The infinite-interval policies are registered here, so a job file may say
    ``inf_policy: {kind: phi, constant: 10}`` and get a `PhiPolicyConfig`.
    Third-party policies only need to subclass the base and call `register`:

        ```python
        @inf_policy_registry.register
        class ClampPolicyConfig(InfPolicyConfig):
            kind: Literal["clamp"] = "clamp"
            ...
        ```
    """

    base_cls: type[TConfig]
    _: dataclasses.KW_ONLY
    discriminator: str
    config: RegistryConfig = dataclasses.field(default_factory=lambda: RegistryConfig())
    _classes: dict[str, type[Config]] = dataclasses.field(default_factory=dict, repr=False)
    _callbacks: list[Callable[[type[Config]], None]] = dataclasses.field(
        default_factory=list, repr=False
    )

    def register(self, cls: TClass, /) -> TClass:
        """Add `cls` to the union under the value of its discriminator.

        Raises:
            ValueError: If `cls` does not subclass the base, lacks a single-valued
                Literal discriminator, is already registered, or its tag is taken
                and the duplicate policy is "error".
        """
        if not issubclass(cls, self.base_cls):
            raise ValueError(f"{cls} should be a subclass of {self.base_cls}.")
        if cls in self._classes.values():
            raise ValueError(f"{cls} is already registered.")

        tag = _literal_tag(cls, self.discriminator)
        if (current := self._classes.get(tag)) is not None:
            match policy := self.config.get("duplicate_tag_policy", "error"):
                case "warn-and-ignore":
                    log.warning(f"Tag `{tag}` is already registered by {current}. Ignoring {cls}.")
                    return cast(TClass, current)
                case "warn-and-replace":
                    log.warning(
                        f"Tag `{tag}` is already registered by {current}. Replacing with {cls}."
                    )
                    del self._classes[tag]
                case "error":
                    raise ValueError(f"Tag `{tag}` is already registered by {current}.")
                case _:
                    assert_never(policy)

        self._classes[tag] = cls
        log.debug(f"Registered {cls.__name__} as {self.discriminator}={tag!r}.")
        for callback in self._callbacks:
            callback(cls)
        return cls

    def on_register(self, callback: Callable[[type[Config]], None]) -> None:
        """Call `callback` with every class registered from now on."""
        self._callbacks.append(callback)

    def tags(self) -> list[str]:
        """Registered tags in registration order."""
        return list(self._classes)

    def construct(self, config: Any) -> TConfig:
        """Validate `config` (a mapping or an instance) into a registered type."""
        union = typing.Union[tuple(self._classes.values())]  # type: ignore
        adapter = TypeAdapter[TConfig](
            typing.Annotated[union, Field(discriminator=self.discriminator)]
        )
        return adapter.validate_python(config, strict=False)

    def _core_schema(self) -> core_schema.CoreSchema:
        if not self._classes:
            return core_schema.invalid_schema(ref=self.base_cls.__name__)
        return core_schema.tagged_union_schema(
            {tag: cls.__pydantic_core_schema__ for tag, cls in self._classes.items()},
            discriminator=self.discriminator,
            ref=self.base_cls.__name__,
        )

    def DynamicResolution(self):
        """Annotation marking a field as "any registered type":

            ```python
            class JobConfig(Config):
                inf_policy: Annotated[InfPolicyConfig, inf_policy_registry.DynamicResolution()]
            ```
        """
        registry = self

        class _DynamicResolution:
            __nshentropy_registry__ = registry

            @classmethod
            def __get_pydantic_core_schema__(
                cls, source_type: Any, handler: GetCoreSchemaHandler
            ) -> core_schema.CoreSchema:
                return registry._core_schema()

        return _DynamicResolution


def _registries_in(obj: Any) -> list[Registry]:
    """Auto-rebuilding registries referenced by an annotation or its arguments."""
    found: list[Registry] = []
    registry = getattr(obj, "__nshentropy_registry__", None)
    if isinstance(registry, Registry) and registry.config.get("auto_rebuild", True):
        found.append(registry)
    for arg in typing.get_args(obj):
        found.extend(_registries_in(arg))
    if typing.get_origin(obj) is typing.Annotated:
        for extra in getattr(obj, "__metadata__", ()):
            found.extend(_registries_in(extra))
    return found


def registries_of_field(field: FieldInfo) -> list[Registry]:
    """Registries a model must follow because of `field`."""
    found: list[Registry] = []
    for metadata in field.metadata:
        found.extend(_registries_in(metadata))
    found.extend(_registries_in(field.annotation))
    return found
