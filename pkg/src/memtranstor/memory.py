"""
Four-level nonvolatile memory on one device.

Every write first resets the polarization with a burst of negative pulses and
then, for three of the four levels, applies a single positive set pulse. Level
indices are assigned in ascending order of the resulting alpha_E, so reading is
plain quantization against midpoint thresholds.
"""

from __future__ import annotations

import csv
import dataclasses
import io
from typing import Sequence

import numpy as np

from .calibration import RESET_REPEATS, derive_thresholds
from .device import Device
from .kinetics import Pulse
from .readout import ReadoutConfig, measure, quantize


@dataclasses.dataclass(frozen=True)
class WriteRecipe:
    name: str
    set_pulse: Pulse | None
    reset_pulse: Pulse = Pulse(-80.0, 10e-3)
    reset_repeats: int = RESET_REPEATS

    def __post_init__(self) -> None:
        if self.reset_repeats < 1:
            raise ValueError(f"reset_repeats must be >= 1: {self.reset_repeats}")

    def pulses(self) -> list[Pulse]:
        seq = [self.reset_pulse] * self.reset_repeats
        if self.set_pulse is not None:
            seq.append(self.set_pulse)
        return seq


def default_recipes(width: float = 10e-3, reset_repeats: int = RESET_REPEATS) -> list[WriteRecipe]:
    """Reset at -80 V, set at +100, +58 or +52 V (-4.0, 5.0, 2.9, 2.6 kV/cm at 200 um)."""
    reset = Pulse(-80.0, width)
    return [
        WriteRecipe("reset", None, reset, reset_repeats),
        WriteRecipe("set-5.0", Pulse(100.0, width), reset, reset_repeats),
        WriteRecipe("set-2.9", Pulse(58.0, width), reset, reset_repeats),
        WriteRecipe("set-2.6", Pulse(52.0, width), reset, reset_repeats),
    ]


@dataclasses.dataclass(frozen=True)
class Level:
    index: int
    recipe: WriteRecipe
    alpha: float
    band: tuple[float, float]


@dataclasses.dataclass(frozen=True)
class LevelTable:
    levels: tuple[Level, ...]
    thresholds: tuple[float, ...]
    min_gap: float

    def __post_init__(self) -> None:
        alphas = [lv.alpha for lv in self.levels]
        gaps = np.diff(alphas)
        if len(gaps) and float(gaps.min()) < self.min_gap:
            raise ValueError(f"adjacent level gap {float(gaps.min()):.4g} below required {self.min_gap:.4g}")

    def __len__(self) -> int:
        return len(self.levels)

    @property
    def alphas(self) -> list[float]:
        return [lv.alpha for lv in self.levels]


def build_level_table(
    device: Device,
    recipes: Sequence[WriteRecipe] | None = None,
    min_gap: float | None = None,
) -> LevelTable:
    """
    Evaluate the recipes on ``device`` and order them by alpha_E. The default
    required gap between adjacent levels is 0.1 * alpha_max.
    """
    recipes = list(recipes) if recipes is not None else default_recipes()
    if min_gap is None:
        min_gap = 0.1 * device.composition.alpha_max
    th = derive_thresholds(device, [r.pulses() for r in recipes])
    order = sorted(range(len(recipes)), key=lambda k: th.state_alphas[k])
    edges = [-np.inf, *th.memory_thresholds, np.inf]
    levels = tuple(
        Level(index=i, recipe=recipes[k], alpha=th.state_alphas[k], band=(float(edges[i]), float(edges[i + 1])))
        for i, k in enumerate(order)
    )
    return LevelTable(levels=levels, thresholds=th.memory_thresholds, min_gap=min_gap)


def write_level(device: Device, level: int, table: LevelTable) -> Device:
    if not 0 <= level < len(table):
        raise ValueError(f"level {level} not in table of {len(table)} levels")
    for pulse in table.levels[level].recipe.pulses():
        device = device.apply(pulse)
    return device


def read_level(
    device: Device,
    table: LevelTable,
    cfg: ReadoutConfig,
    rng: np.random.Generator | None = None,
) -> int:
    return quantize(measure(device, cfg, rng).alpha_e_measured, table.thresholds)


@dataclasses.dataclass(frozen=True)
class CycleRecord:
    cycle: int
    level_written: int
    alpha_measured: float
    level_read: int


@dataclasses.dataclass
class EnduranceReport:
    records: list[CycleRecord]
    device: Device

    @property
    def errors(self) -> int:
        return sum(r.level_written != r.level_read for r in self.records)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["cycle", "level_written", "alpha_measured", "level_read"])
        for r in self.records:
            w.writerow([r.cycle, r.level_written, repr(r.alpha_measured), r.level_read])
        return buf.getvalue()


def cycle_endurance(
    device: Device,
    table: LevelTable,
    pattern: Sequence[int],
    n_cycles: int,
    cfg: ReadoutConfig,
    rng: np.random.Generator | None = None,
) -> EnduranceReport:
    """Write each level of ``pattern`` and read it back, ``n_cycles`` times over."""
    if n_cycles < 1:
        raise ValueError(f"n_cycles must be >= 1: {n_cycles}")
    if cfg.noise_rms > 0 and rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    records = []
    for cycle in range(n_cycles):
        for level in pattern:
            device = write_level(device, level, table)
            alpha = measure(device, cfg, rng).alpha_e_measured
            records.append(CycleRecord(cycle, level, alpha, quantize(alpha, table.thresholds)))
    return EnduranceReport(records=records, device=device)
