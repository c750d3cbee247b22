from __future__ import annotations

from pathlib import Path
from typing import Any, Generic

from pydantic import ConfigDict, TypeAdapter
from typing_extensions import TypeVar

T = TypeVar("T", infer_variance=True)


class Adapter(Generic[T]):
    """Validation and JSON I/O for payloads that are not a single `Config`,
    e.g. a barcode file holding either one barcode or an array of them.

    `type` may be any type pydantic accepts, unions and `Annotated` included."""

    def __init__(self, type: Any, *, config: ConfigDict | None = None) -> None:
        self.adapter = TypeAdapter[T](type, config=config)

    def to_python(self, instance: T, /, *, mode: str = "json") -> Any:
        return self.adapter.dump_python(instance, mode=mode)

    def from_python(self, data: Any, /) -> T:
        return self.adapter.validate_python(data)

    def to_json_str(self, instance: T, /, indent: int | None = None) -> str:
        return self.adapter.dump_json(instance, indent=indent).decode("utf-8")

    def to_json_file(self, instance: T, /, path: str | Path, indent: int | None = None) -> None:
        Path(path).write_text(self.to_json_str(instance, indent=indent), encoding="utf-8")

    def from_json_str(self, json: str | bytes | bytearray, /) -> T:
        return self.adapter.validate_json(json)

    def from_json_file(self, path: str | Path, /) -> T:
        """Raises `FileNotFoundError` or `pydantic.ValidationError`."""
        return self.from_json_str(Path(path).read_bytes())
