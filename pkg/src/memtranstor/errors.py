"""Exception hierarchy shared by every memtranstor module."""

from __future__ import annotations


class MemtranstorError(Exception):
    """Base class; the CLI maps any subclass to exit code 1."""


class BreakdownError(MemtranstorError, ValueError):
    pass


class FieldRangeError(MemtranstorError, ValueError):
    pass


class ConfigError(MemtranstorError, ValueError):
    pass


class LengthError(MemtranstorError, ValueError):
    pass


class ThresholdError(MemtranstorError, ValueError):
    pass


class DegenerateBandError(MemtranstorError, ValueError):
    pass


class TruthTableMismatch(MemtranstorError):
    def __init__(self, gate: str, rows: list) -> None:
        self.gate = gate
        self.rows = list(rows)
        desc = ", ".join(f"({r.inputs[0]},{r.inputs[1]})" for r in self.rows)
        super().__init__(f"{gate}: truth table mismatch on row(s) {desc}")


class ParseError(MemtranstorError, ValueError):
    def __init__(self, line: int, column: int, message: str, token: int | None = None) -> None:
        self.line = line
        self.column = column
        self.token = token
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


class ProgramError(MemtranstorError):
    """Runtime failure while executing a pulse program; carries the source line."""

    def __init__(self, line: int, cause: Exception) -> None:
        self.line = line
        self.cause = cause
        super().__init__(f"line {line}: {cause}")


class InfeasibleWarning(UserWarning):
    pass
