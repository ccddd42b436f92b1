"""
Run configuration: one JSON document holding every tunable, with defaults for
all of them. Unknown keys are rejected and every component re-validates its
own values on load.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Any

from .calibration import RESET_REPEATS, Thresholds, derive_thresholds
from .device import Device
from .errors import ConfigError
from .kinetics import DeviceGeometry, Pulse, SwitchingParams, prepole
from .logic import GateConfig, SignRule, ThresholdRule
from .magnetics import MagnetizationState, MEComposition
from .memory import LevelTable, WriteRecipe, build_level_table
from .readout import ReadoutConfig


@dataclasses.dataclass(frozen=True)
class MagnetParams:
    h_coercive: float = 100.0
    h_width: float = 80.0
    h_limit: float = 10_000.0
    alpha_max: float = 1.0
    orientation_sign: int = -1
    remanence_direction: int = 1
    """Sign of the saturating field applied before the run; leaves m at remanence."""


@dataclasses.dataclass(frozen=True)
class MemoryParams:
    reset_voltage: float = -80.0
    reset_repeats: int = RESET_REPEATS
    set_voltages: tuple[float, ...] = (100.0, 58.0, 52.0)
    pulse_width: float = 10e-3
    min_gap: float = 0.1
    """Required separation of adjacent levels, in units of alpha_max."""

    def __post_init__(self) -> None:
        if self.reset_repeats < 1:
            raise ConfigError(f"reset_repeats must be >= 1: {self.reset_repeats}")
        if not self.reset_voltage < 0 < min(self.set_voltages, default=1.0):
            raise ConfigError("reset must be negative and set voltages positive")
        if not self.pulse_width > 0:
            raise ConfigError(f"pulse_width must be positive: {self.pulse_width}")


@dataclasses.dataclass(frozen=True)
class GateParams:
    v_low: float = 10.0
    nor_a_high: float = 100.0
    nor_b_high: float = 60.0
    nand_high: float = 58.0
    pulse_width: float = 10e-3
    gap: float = 10e-3
    nor_b_theta: float | None = None
    """Output threshold of the second NOR mode; derived from the model when null."""

    def __post_init__(self) -> None:
        if not self.v_low < min(self.nor_a_high, self.nor_b_high, self.nand_high):
            raise ConfigError("v_low must be below every logic-1 voltage")
        if not (self.pulse_width > 0 and self.gap >= 0):
            raise ConfigError("pulse_width must be positive and gap non-negative")


_SECTIONS = {
    "geometry": DeviceGeometry,
    "switching": SwitchingParams,
    "magnet": MagnetParams,
    "readout": ReadoutConfig,
    "memory": MemoryParams,
    "gates": GateParams,
}


def _build(cls: type, raw: dict[str, Any], section: str) -> Any:
    if not isinstance(raw, dict):
        raise ConfigError(f"section {section!r} must be an object")
    names = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(raw) - set(names)
    if unknown:
        raise ConfigError(f"unknown keys in section {section!r}: {sorted(unknown)}")
    values = {k: tuple(v) if isinstance(v, list) else v for k, v in raw.items()}
    try:
        return cls(**values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as ex:
        raise ConfigError(f"section {section!r}: {ex}") from ex


@dataclasses.dataclass(frozen=True)
class RunConfig:
    geometry: DeviceGeometry = DeviceGeometry()
    switching: SwitchingParams = SwitchingParams()
    magnet: MagnetParams = MagnetParams()
    readout: ReadoutConfig = ReadoutConfig()
    memory: MemoryParams = MemoryParams()
    gates: GateParams = GateParams()

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunConfig:
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - set(_SECTIONS)
        if unknown:
            raise ConfigError(f"unknown config sections: {sorted(unknown)}")
        cfg = cls(**{name: _build(_SECTIONS[name], raw, name) for name, raw in data.items()})
        # Cross-component checks run here so a bad file fails at load, not mid-run.
        try:
            cfg.level_table()
            cfg.gate_configs()
        except ConfigError:
            raise
        except ValueError as ex:
            raise ConfigError(str(ex)) from ex
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> RunConfig:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as ex:
            raise ConfigError(f"{path}: invalid JSON: {ex}") from ex
        return cls.from_dict(data)

    def to_dict(self) -> dict[str, Any]:
        out = {}
        for name in _SECTIONS:
            section = dataclasses.asdict(getattr(self, name))
            out[name] = {k: list(v) if isinstance(v, tuple) else v for k, v in section.items()}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def build_device(self) -> Device:
        mp = self.magnet
        if mp.remanence_direction not in (-1, 1):
            raise ConfigError(f"remanence_direction must be +1 or -1: {mp.remanence_direction}")
        magnetization = MagnetizationState.remanent(mp.h_coercive, mp.h_width, mp.h_limit, mp.remanence_direction)
        composition = MEComposition(mp.alpha_max, mp.orientation_sign)
        return Device(self.geometry, self.switching, prepole(None, 1), magnetization, composition)

    def recipes(self) -> list[WriteRecipe]:
        mem = self.memory
        reset = Pulse(mem.reset_voltage, mem.pulse_width)
        recipes = [WriteRecipe("reset", None, reset, mem.reset_repeats)]
        for v in mem.set_voltages:
            field = self.geometry.field_of_voltage(v)
            recipes.append(WriteRecipe(f"set-{field:.1f}", Pulse(v, mem.pulse_width), reset, mem.reset_repeats))
        return recipes

    def level_table(self) -> LevelTable:
        device = self.build_device()
        return build_level_table(device, self.recipes(), self.memory.min_gap * self.magnet.alpha_max)

    def thresholds(self) -> Thresholds:
        g = self.gates
        return derive_thresholds(
            self.build_device(),
            [r.pulses() for r in self.recipes()],
            Pulse(g.nor_b_high, g.pulse_width),
        )

    def gate_configs(self) -> dict[str, GateConfig]:
        g = self.gates
        theta = g.nor_b_theta if g.nor_b_theta is not None else self.thresholds().nor_b_theta
        common = dict(v_low=g.v_low, pulse_width=g.pulse_width, gap=g.gap)
        return {
            "NOR_A": GateConfig("NOR_A", g.nor_a_high, "NOR", SignRule(), **common),
            "NOR_B": GateConfig("NOR_B", g.nor_b_high, "NOR", ThresholdRule(theta), **common),
            "NAND": GateConfig("NAND", g.nand_high, "NAND", SignRule(), **common),
        }
