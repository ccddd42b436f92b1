"""
Line-oriented pulse-program language.

    PULSE <volts> <ms>     rectangular voltage pulse
    SETH <oersted>         step the dc bias field
    READ [<label>]         lock-in measurement of alpha_E
    INIT <+|->             pole the ferroelectric to +P_s or -P_s
    WAIT <ms>              idle, no field
    # text                 comment, kept verbatim

Keywords are case-insensitive. A ``#`` after a statement starts a comment that
is kept as its own statement.
"""

from __future__ import annotations

import dataclasses
import json
import math
import re
from typing import Any, Union

import numpy as np

from .device import Device
from .errors import MemtranstorError, ParseError, ProgramError
from .kinetics import Pulse
from .readout import LockInOutput, ReadoutConfig, measure


@dataclasses.dataclass(frozen=True)
class PulseStmt:
    amplitude: float
    width_ms: float


@dataclasses.dataclass(frozen=True)
class SetHStmt:
    field: float


@dataclasses.dataclass(frozen=True)
class ReadStmt:
    label: str | None = None


@dataclasses.dataclass(frozen=True)
class InitStmt:
    direction: int


@dataclasses.dataclass(frozen=True)
class WaitStmt:
    duration_ms: float


@dataclasses.dataclass(frozen=True)
class Comment:
    text: str


Statement = Union[PulseStmt, SetHStmt, ReadStmt, InitStmt, WaitStmt, Comment]


@dataclasses.dataclass(frozen=True)
class PulseProgram:
    statements: tuple[Statement, ...] = ()
    lines: tuple[int, ...] = dataclasses.field(default=(), compare=False)
    """1-based source line of each statement; ignored in equality."""

    def __len__(self) -> int:
        return len(self.statements)

    def line_of(self, index: int) -> int:
        return self.lines[index] if index < len(self.lines) else index + 1


_NUMBER = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?\Z")
_TOKEN = re.compile(r"\S+")
_ARITY = {"PULSE": (2, 2), "SETH": (1, 1), "READ": (0, 1), "INIT": (1, 1), "WAIT": (1, 1)}


def _number(tok: str, line: int, col: int, index: int, what: str, non_negative: bool = False) -> float:
    if not _NUMBER.match(tok):
        raise ParseError(line, col, f"expected a number for {what}, got {tok!r}", token=index)
    value = float(tok)
    if not math.isfinite(value):
        raise ParseError(line, col, f"{what} is not finite: {tok!r}", token=index)
    if non_negative and value < 0:
        raise ParseError(line, col, f"{what} must be non-negative, got {tok}", token=index)
    return value


def _statement(code: str, line: int) -> Statement | None:
    tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(code)]
    if not tokens:
        return None
    head, head_col = tokens[0]
    keyword = head.upper() if head.isascii() else head
    if keyword not in _ARITY:
        raise ParseError(line, head_col, f"unknown keyword {head!r}", token=1)
    args = tokens[1:]
    lo, hi = _ARITY[keyword]
    if not lo <= len(args) <= hi:
        col = args[hi][1] if len(args) > hi else len(code) + 1
        want = str(lo) if lo == hi else f"{lo} to {hi}"
        raise ParseError(line, col, f"{keyword} takes {want} argument(s), got {len(args)}", token=len(args) + 1)

    if keyword == "PULSE":
        volts = _number(args[0][0], line, args[0][1], 2, "amplitude")
        ms = _number(args[1][0], line, args[1][1], 3, "width", non_negative=True)
        return PulseStmt(volts, ms)
    if keyword == "SETH":
        return SetHStmt(_number(args[0][0], line, args[0][1], 2, "field"))
    if keyword == "READ":
        return ReadStmt(args[0][0] if args else None)
    if keyword == "INIT":
        tok, col = args[0]
        if tok not in ("+", "-"):
            raise ParseError(line, col, f"INIT direction must be + or -, got {tok!r}", token=2)
        return InitStmt(1 if tok == "+" else -1)
    return WaitStmt(_number(args[0][0], line, args[0][1], 2, "duration", non_negative=True))


def parse(text: str) -> PulseProgram:
    statements: list[Statement] = []
    lines: list[int] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        raw = raw.rstrip("\r")
        code, hash_, comment = raw.partition("#")
        stmt = _statement(code, lineno)
        if stmt is not None:
            statements.append(stmt)
            lines.append(lineno)
        if hash_:
            statements.append(Comment(comment))
            lines.append(lineno)
    return PulseProgram(tuple(statements), tuple(lines))


def _num(value: float) -> str:
    return repr(float(value))


def format_statement(stmt: Statement) -> str:
    if isinstance(stmt, PulseStmt):
        return f"PULSE {_num(stmt.amplitude)} {_num(stmt.width_ms)}"
    if isinstance(stmt, SetHStmt):
        return f"SETH {_num(stmt.field)}"
    if isinstance(stmt, ReadStmt):
        return "READ" if stmt.label is None else f"READ {stmt.label}"
    if isinstance(stmt, InitStmt):
        return "INIT +" if stmt.direction > 0 else "INIT -"
    if isinstance(stmt, WaitStmt):
        return f"WAIT {_num(stmt.duration_ms)}"
    if isinstance(stmt, Comment):
        return f"#{stmt.text}"
    raise TypeError(f"not a statement: {stmt!r}")


def format(program: PulseProgram) -> str:  # noqa: A001
    """Canonical text; ``parse(format(p)) == p`` for every valid program."""
    if not program.statements:
        return ""
    return "\n".join(format_statement(s) for s in program.statements) + "\n"


@dataclasses.dataclass(frozen=True)
class TraceRecord:
    line: int
    statement: Statement
    p: float
    m: float
    h_dc: float
    lockin: LockInOutput | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"line": self.line, "op": format_statement(self.statement).split()[0]}
        out.update(dataclasses.asdict(self.statement))
        out.update(p=self.p, m=self.m, h_dc=self.h_dc)
        if self.lockin is not None:
            out.update(self.lockin.to_dict())
        return out


@dataclasses.dataclass
class ExecutionTrace:
    records: list[TraceRecord]
    device: Device

    def __len__(self) -> int:
        return len(self.records)

    def reads(self) -> list[TraceRecord]:
        return [r for r in self.records if r.lockin is not None]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r.to_dict()) + "\n" for r in self.records)


def execute(
    program: PulseProgram,
    device: Device,
    cfg: ReadoutConfig,
    rng: np.random.Generator | None = None,
) -> ExecutionTrace:
    """Replay ``program`` on ``device``; runtime errors are re-raised as ``ProgramError`` with the line."""
    if cfg.noise_rms > 0 and rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    records = []
    for i, stmt in enumerate(program.statements):
        if isinstance(stmt, Comment):
            continue
        line = program.line_of(i)
        lockin = None
        try:
            if isinstance(stmt, PulseStmt):
                device = device.apply(Pulse(stmt.amplitude, stmt.width_ms * 1e-3))
            elif isinstance(stmt, SetHStmt):
                device = device.set_h(stmt.field)
            elif isinstance(stmt, InitStmt):
                device = device.prepole(stmt.direction)
            elif isinstance(stmt, ReadStmt):
                lockin = measure(device, cfg, rng)
        except (MemtranstorError, ValueError) as ex:
            raise ProgramError(line, ex) from ex
        records.append(TraceRecord(line, stmt, device.p, device.m, device.magnetization.h_dc, lockin))
    return ExecutionTrace(records, device)
