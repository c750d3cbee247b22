from __future__ import annotations

from pathlib import Path


class PreconditionError(ValueError):
    """A numeric precondition of an operation does not hold
    (e.g. zero total length, an infinite interval where only finite ones are
    allowed, a relative error outside the range of a bound)."""


class InputError(ValueError):
    """A malformed input file."""

    def __init__(self, path: str | Path, line: int | None, message: str):
        self.path = Path(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else f"{self.path}"
        super().__init__(f"{where}: {message}")
