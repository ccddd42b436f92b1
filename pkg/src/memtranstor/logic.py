"""
NOR and NAND gates computed in a single device.

A gate run has three stages: initialize to the positive-high alpha_E state,
apply the two inputs as sequential pulses, then read alpha_E and decide the
output bit.
"""

from __future__ import annotations

import dataclasses
from typing import Callable

import numpy as np

from .calibration import derive_thresholds
from .device import Device
from .errors import TruthTableMismatch
from .kinetics import Pulse
from .readout import ReadoutConfig, measure

INPUT_ROWS = ((0, 0), (0, 1), (1, 0), (1, 1))

BOOLEAN_FUNCTIONS: dict[str, Callable[[int, int], int]] = {
    "NOR": lambda a, b: int(not (a or b)),
    "NAND": lambda a, b: int(not (a and b)),
}


@dataclasses.dataclass(frozen=True)
class SignRule:
    def decide(self, alpha: float) -> int:
        return int(alpha > 0)


@dataclasses.dataclass(frozen=True)
class ThresholdRule:
    theta: float

    def decide(self, alpha: float) -> int:
        return int(alpha > self.theta)


@dataclasses.dataclass(frozen=True)
class GateConfig:
    name: str
    v_high: float
    function: str
    decision: SignRule | ThresholdRule = SignRule()
    v_low: float = 10.0
    pulse_width: float = 10e-3
    gap: float = 10e-3
    """Zero-field interval between the two inputs [s]."""

    def __post_init__(self) -> None:
        if not self.v_low < self.v_high:
            raise ValueError(f"{self.name}: v_low must be below v_high")
        if self.function not in BOOLEAN_FUNCTIONS:
            raise ValueError(f"{self.name}: unknown function {self.function!r}")

    def input_pulse(self, bit: int) -> Pulse:
        if bit not in (0, 1):
            raise ValueError(f"input must be 0 or 1: {bit}")
        return Pulse(self.v_high if bit else self.v_low, self.pulse_width)

    def expected(self, x1: int, x2: int) -> int:
        return BOOLEAN_FUNCTIONS[self.function](x1, x2)


def default_gates(device: Device, nor_b_theta: float | None = None) -> dict[str, GateConfig]:
    """
    The three demonstrated gates. The second NOR mode separates "positive high"
    from "positive low" with a threshold halfway between the initialized
    alpha_E and the alpha_E after one 60 V input, unless ``nor_b_theta`` is given.
    """
    if nor_b_theta is None:
        nor_b_theta = derive_thresholds(device, [], Pulse(60.0, 10e-3)).nor_b_theta
    return {
        "NOR_A": GateConfig("NOR_A", v_high=100.0, function="NOR"),
        "NOR_B": GateConfig("NOR_B", v_high=60.0, function="NOR", decision=ThresholdRule(nor_b_theta)),
        "NAND": GateConfig("NAND", v_high=58.0, function="NAND"),
    }


@dataclasses.dataclass(frozen=True)
class LogicRun:
    inputs: tuple[int, int]
    alpha_out: float
    output: int
    expected: int

    @property
    def passed(self) -> bool:
        return self.output == self.expected

    def to_dict(self) -> dict:
        return {
            "x1": self.inputs[0],
            "x2": self.inputs[1],
            "alpha_e": self.alpha_out,
            "output": self.output,
            "expected": self.expected,
            "pass": self.passed,
        }


def initialize(device: Device, gate: GateConfig | None = None) -> Device:
    """Pole the ferroelectric fully into the positive-high alpha_E state."""
    return device.prepole(device.positive_high_direction())


def compute(device: Device, gate: GateConfig, x1: int, x2: int) -> Device:
    """Initialization followed by the two input pulses; the gap carries no field."""
    device = initialize(device, gate)
    device = device.apply(gate.input_pulse(x1))
    device = device.apply(Pulse(0.0, gate.gap))
    return device.apply(gate.input_pulse(x2))


def run_gate(
    device: Device,
    gate: GateConfig,
    x1: int,
    x2: int,
    cfg: ReadoutConfig,
    rng: np.random.Generator | None = None,
) -> LogicRun:
    alpha = measure(compute(device, gate, x1, x2), cfg, rng).alpha_e_measured
    return LogicRun((x1, x2), alpha, gate.decision.decide(alpha), gate.expected(x1, x2))


@dataclasses.dataclass(frozen=True)
class TruthTableResult:
    gate: str
    runs: tuple[LogicRun, ...]

    @property
    def failures(self) -> list[LogicRun]:
        return [r for r in self.runs if not r.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def outputs(self) -> tuple[int, ...]:
        return tuple(r.output for r in self.runs)

    def raise_for_mismatch(self) -> None:
        if self.failures:
            raise TruthTableMismatch(self.gate, self.failures)


def truth_table(
    gate: GateConfig,
    device: Device,
    cfg: ReadoutConfig,
    rng: np.random.Generator | None = None,
) -> TruthTableResult:
    """All four input rows, each from a fresh initialization, in order 00, 01, 10, 11."""
    if cfg.noise_rms > 0 and rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    runs = tuple(run_gate(device, gate, x1, x2, cfg, rng) for x1, x2 in INPUT_ROWS)
    return TruthTableResult(gate.name, runs)
