from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from typing import Annotated, Literal

import pydantic
import pytest

import nshentropy as E


def test_manual_rebuild_fail():
    class WindowBase(E.Config, ABC):
        @abstractmethod
        def width(self) -> float: ...

    registry = E.Registry(
        WindowBase, discriminator="kind", config={"auto_rebuild": False}
    )

    class Root(E.Config):
        a: int = 1
        window: Annotated[WindowBase, registry.DynamicResolution()]

    @registry.register
    class Fixed(WindowBase):
        kind: Literal["fixed"] = "fixed"

        def width(self) -> float:
            return 1.0

    Root(window=Fixed()).model_dump()

    @registry.register
    class Open(WindowBase):
        kind: Literal["open"] = "open"

        def width(self) -> float:
            return math.inf

    with pytest.raises(pydantic.ValidationError):
        Root(window=Open()).model_dump()


def test_auto_rebuild():
    class WindowBase(E.Config, ABC):
        @abstractmethod
        def width(self) -> float: ...

    registry = E.Registry(WindowBase, discriminator="kind")

    class Root(E.Config):
        a: int = 1
        window: Annotated[WindowBase, registry.DynamicResolution()]

    @registry.register
    class Fixed(WindowBase):
        kind: Literal["fixed"] = "fixed"

        def width(self) -> float:
            return 1.0

    Root(window=Fixed()).model_dump()

    @registry.register
    class Open(WindowBase):
        kind: Literal["open"] = "open"

        def width(self) -> float:
            return math.inf

    # No raise
    Root(window=Open()).model_dump()
    assert registry.tags() == ["fixed", "open"]


def test_register_errors():
    class Base(E.Config):
        pass

    registry = E.Registry(Base, discriminator="kind")

    class Unrelated(E.Config):
        kind: Literal["x"] = "x"

    class Untagged(Base):
        kind: str = "y"

    @registry.register
    class Tagged(Base):
        kind: Literal["z"] = "z"

    with pytest.raises(ValueError, match="subclass"):
        registry.register(Unrelated)
    with pytest.raises(ValueError, match="Literal"):
        registry.register(Untagged)
    with pytest.raises(ValueError, match="already registered"):
        registry.register(Tagged)

    class Again(Base):
        kind: Literal["z"] = "z"

    with pytest.raises(ValueError, match="already registered"):
        registry.register(Again)


def test_duplicate_tag_policies(caplog):
    class Base(E.Config):
        pass

    class First(Base):
        kind: Literal["a"] = "a"

    class Second(Base):
        kind: Literal["a"] = "a"

    ignoring = E.Registry(
        Base, discriminator="kind", config={"duplicate_tag_policy": "warn-and-ignore"}
    )
    ignoring.register(First)
    with caplog.at_level(logging.WARNING):
        assert ignoring.register(Second) is First
    assert "already registered" in caplog.text
    assert isinstance(ignoring.construct({"kind": "a"}), First)

    replacing = E.Registry(
        Base, discriminator="kind", config={"duplicate_tag_policy": "warn-and-replace"}
    )
    replacing.register(First)
    replacing.register(Second)
    assert isinstance(replacing.construct({"kind": "a"}), Second)


def test_policy_registry():
    assert E.inf_policy_registry.tags() == ["tau", "phi", "drop"]
    assert E.inf_policy_registry.construct({"kind": "drop"}) == E.DropPolicyConfig()
    assert E.inf_policy_registry.construct({"kind": "tau", "constant": "0.5"}) == (
        E.TauPolicyConfig(constant=0.5)
    )
    with pytest.raises(pydantic.ValidationError):
        E.inf_policy_registry.construct({"kind": "clamp"})


# region Policies
@pytest.fixture
def with_infinite() -> dict[int, E.Barcode]:
    return {
        0: E.Barcode.from_pairs([[0, 1], [0, "inf"]], dim=0),
        1: E.Barcode.from_pairs([[0.5, 3], [2, "inf"]], dim=1),
    }


def test_tau_policy_pools_dimensions(with_infinite):
    resolved = E.TauPolicyConfig(constant=1.0).resolve(with_infinite)
    # The largest finite coordinate over both dimensions is 3.
    assert resolved[0].intervals == (E.Interval(0.0, 1.0), E.Interval(0.0, 4.0))
    assert resolved[1].intervals == (E.Interval(0.5, 3.0), E.Interval(2.0, 4.0))
    assert resolved[1].dim == 1


def test_phi_policy(with_infinite):
    resolved = E.PhiPolicyConfig(constant=10.0).resolve(with_infinite)
    assert resolved[0].intervals[1] == E.Interval(0.0, 10.0)
    assert resolved[1].intervals[1] == E.Interval(2.0, 10.0)

    with pytest.raises(E.PreconditionError):
        E.PhiPolicyConfig(constant=2.0).resolve(with_infinite)


def test_drop_policy(with_infinite):
    resolved = E.DropPolicyConfig().resolve(with_infinite)
    assert resolved[0].intervals == (E.Interval(0.0, 1.0),)
    assert resolved[1].intervals == (E.Interval(0.5, 3.0),)


def test_policies_keep_empty_barcodes():
    empty = {0: E.Barcode(dim=0)}
    for policy in (E.TauPolicyConfig(), E.PhiPolicyConfig(constant=1.0), E.DropPolicyConfig()):
        assert policy.resolve(empty) == empty


# endregion
