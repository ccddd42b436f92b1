"""
In-plane magnetization of the Ni electrodes and the resulting ME coefficient.

The M-H loop is a rate-independent two-branch tanh envelope: on the ascending
branch m = tanh((H - Hc) / w), on the descending branch m = tanh((H + Hc) / w).
The branch switches instantly whenever the sweep direction reverses.
"""

from __future__ import annotations

import dataclasses
import enum
import math

from .errors import ConfigError, FieldRangeError


class Branch(str, enum.Enum):
    ASCENDING = "ascending"
    DESCENDING = "descending"

    @property
    def sign(self) -> int:
        return 1 if self is Branch.ASCENDING else -1


def branch_magnetization(h: float, branch: Branch, h_coercive: float, h_width: float) -> float:
    return math.tanh((h - branch.sign * h_coercive) / h_width)


@dataclasses.dataclass(frozen=True)
class MagnetizationState:
    """
    Normalized magnetization ``m`` at bias ``h_dc`` [Oe].

    The default is the positive remanent state reached by saturating at +H and
    returning to zero field.
    """

    m: float = math.tanh(100.0 / 80.0)
    h_dc: float = 0.0
    branch: Branch = Branch.DESCENDING
    h_coercive: float = 100.0
    h_width: float = 80.0
    h_limit: float = 10_000.0
    """Largest admissible |H| [Oe]."""

    def __post_init__(self) -> None:
        if not -1.0 <= self.m <= 1.0:
            raise ValueError(f"m out of range: {self.m}")
        if not self.h_coercive >= 0:
            raise ConfigError(f"h_coercive invalid: {self.h_coercive}")
        if not self.h_width > 0:
            raise ConfigError(f"h_width invalid: {self.h_width}")
        if not self.h_limit > 0:
            raise ConfigError(f"h_limit invalid: {self.h_limit}")
        if abs(self.h_dc) > self.h_limit:
            raise FieldRangeError(f"h_dc {self.h_dc} Oe beyond limit {self.h_limit} Oe")

    @classmethod
    def remanent(
        cls,
        h_coercive: float = 100.0,
        h_width: float = 80.0,
        h_limit: float = 10_000.0,
        direction: int = 1,
    ) -> MagnetizationState:
        """Zero-field state after saturating towards ``direction``."""
        branch = Branch.DESCENDING if direction > 0 else Branch.ASCENDING
        m = branch_magnetization(0.0, branch, h_coercive, h_width)
        return cls(m=m, h_dc=0.0, branch=branch, h_coercive=h_coercive, h_width=h_width, h_limit=h_limit)

    def mirrored(self) -> MagnetizationState:
        """State with every field in its history negated."""
        branch = Branch.ASCENDING if self.branch is Branch.DESCENDING else Branch.DESCENDING
        return dataclasses.replace(self, m=-self.m, h_dc=-self.h_dc, branch=branch)


@dataclasses.dataclass(frozen=True)
class MEComposition:
    alpha_max: float = 1.0
    """ME coefficient scale [V cm^-1 Oe^-1]."""
    orientation_sign: int = -1
    """Device constant mapping the relative (p, m) orientation to the sign of alpha_E."""

    def __post_init__(self) -> None:
        if not self.alpha_max > 0:
            raise ConfigError(f"alpha_max must be positive: {self.alpha_max}")
        if self.orientation_sign not in (-1, 1):
            raise ConfigError(f"orientation_sign must be +1 or -1: {self.orientation_sign}")


def set_h_field(state: MagnetizationState, h_new: float) -> MagnetizationState:
    if not math.isfinite(h_new) or abs(h_new) > state.h_limit:
        raise FieldRangeError(f"H = {h_new} Oe beyond limit {state.h_limit} Oe")
    if h_new == state.h_dc:
        return state
    branch = Branch.ASCENDING if h_new > state.h_dc else Branch.DESCENDING
    m = branch_magnetization(h_new, branch, state.h_coercive, state.h_width)
    return dataclasses.replace(state, m=m, h_dc=h_new, branch=branch)


def alpha_e(p: float, m: float, comp: MEComposition) -> float:
    """ME voltage coefficient; bilinear in polarization and magnetization."""
    return comp.alpha_max * comp.orientation_sign * p * m


def triangle_fields(h_min: float, h_max: float, n_steps: int) -> list[float]:
    """h_max -> h_min -> h_max with ``n_steps`` intervals per leg (2*n_steps + 1 points)."""
    if not h_min < h_max:
        raise ValueError(f"need h_min < h_max, got {h_min}, {h_max}")
    if n_steps < 2:
        raise ValueError(f"n_steps must be >= 2: {n_steps}")
    step = (h_max - h_min) / n_steps
    down = [h_max - k * step for k in range(n_steps)] + [h_min]
    up = [h_min + k * step for k in range(1, n_steps)] + [h_max]
    return down + up


def sweep_h_loop(
    state: MagnetizationState,
    h_min: float,
    h_max: float,
    n_steps: int,
    p: float,
    comp: MEComposition,
) -> tuple[list[tuple[float, float, float]], MagnetizationState]:
    """
    Run one triangle period and return rows of (H [Oe], m, alpha_E) plus the
    final magnetization state, so consecutive periods can be chained.
    """
    rows = []
    for h in triangle_fields(h_min, h_max, n_steps):
        state = set_h_field(state, h)
        rows.append((h, state.m, alpha_e(p, state.m, comp)))
    return rows, state
