"""
Lumped switching kinetics of the ferroelectric layer.

Net polarization is a single fraction ``p`` in [-1, +1]. Reversal under a field
follows nucleation-limited (KAI) kinetics, F = 1 - exp(-x**beta), where the
reduced time x accumulates ``width / tau(E)`` over consecutive pulses of one
polarity and tau(E) = tau0 * exp(E_a / |E|) (Merz law). A pulse of opposite
polarity starts a fresh switching episode from the current ``p``.

Fields are in kV/cm, times in seconds, voltages in volts.
"""

from __future__ import annotations

import dataclasses
import math

from .errors import BreakdownError, ConfigError


@dataclasses.dataclass(frozen=True)
class DeviceGeometry:
    fe_thickness: float = 200e-6
    """Ferroelectric thickness [m]."""
    electrode_thickness: float = 1e-6
    """Ni electrode thickness [m]; informational."""
    electrode_area: float | None = None
    """Electrode area [m^2]; informational."""
    breakdown_voltage: float = 150.0
    """Largest admissible |pulse amplitude| [V]."""

    def __post_init__(self) -> None:
        if not (self.fe_thickness > 0 and math.isfinite(self.fe_thickness)):
            raise ConfigError(f"fe_thickness invalid: {self.fe_thickness}")
        if not self.breakdown_voltage > 0:
            raise ConfigError(f"breakdown_voltage invalid: {self.breakdown_voltage}")

    @property
    def fe_thickness_cm(self) -> float:
        return self.fe_thickness * 100.0

    def field_of_voltage(self, voltage: float) -> float:
        """Field across the ferroelectric in kV/cm."""
        return voltage / self.fe_thickness / 1e5

    def voltage_of_field(self, field: float) -> float:
        return field * 1e5 * self.fe_thickness


@dataclasses.dataclass(frozen=True)
class SwitchingParams:
    tau0: float = 0.80e-3
    """Attempt-time prefactor [s]."""
    activation_field: float = 8.8
    """Merz activation field [kV/cm]."""
    avrami_exponent: float = 2.0
    min_switching_field: float = 1.0
    """Fields with smaller magnitude [kV/cm] do not switch at all."""

    def __post_init__(self) -> None:
        if not (self.tau0 > 0 and math.isfinite(self.tau0)):
            raise ConfigError(f"tau0 invalid: {self.tau0}")
        if not (self.activation_field > 0 and math.isfinite(self.activation_field)):
            raise ConfigError(f"activation_field invalid: {self.activation_field}")
        if not self.avrami_exponent >= 1:
            raise ConfigError(f"avrami_exponent must be >= 1: {self.avrami_exponent}")
        if not self.min_switching_field >= 0:
            raise ConfigError(f"min_switching_field invalid: {self.min_switching_field}")

    def switching_time(self, field: float) -> float:
        """Characteristic time tau(E) [s]; infinite at zero field."""
        if field == 0:
            return math.inf
        arg = self.activation_field / abs(field)
        return self.tau0 * math.exp(arg) if arg < 700 else math.inf

    def reduced_time(self, field: float, width: float) -> float:
        """width / tau(E), computed without overflow; zero below the switching threshold."""
        if abs(field) < self.min_switching_field or field == 0:
            return 0.0
        return (width / self.tau0) * math.exp(-self.activation_field / abs(field))


def switched_fraction(x_total: float, beta: float) -> float:
    """KAI switched fraction for accumulated reduced time ``x_total``."""
    if x_total < 0:
        raise ValueError(f"x_total must be non-negative: {x_total}")
    return -math.expm1(-(x_total**beta))


@dataclasses.dataclass(frozen=True)
class Pulse:
    amplitude: float
    """Signed amplitude [V]."""
    width: float = 10e-3
    """Duration [s]."""

    def __post_init__(self) -> None:
        if not math.isfinite(self.amplitude):
            raise ValueError(f"pulse amplitude must be finite: {self.amplitude}")
        if not (self.width >= 0 and math.isfinite(self.width)):
            raise ValueError(f"pulse width invalid: {self.width}")


@dataclasses.dataclass(frozen=True)
class PolarizationState:
    p: float = 1.0
    onset_p: float = 1.0
    """Value of ``p`` when the current switching episode began."""
    onset_sign: int = 1
    """Polarity of the current episode."""
    accumulated_x: float = 0.0

    def __post_init__(self) -> None:
        if not -1.0 <= self.p <= 1.0:
            raise ValueError(f"p out of range: {self.p}")
        if self.onset_sign not in (-1, 1):
            raise ValueError(f"onset_sign must be +1 or -1: {self.onset_sign}")
        if self.accumulated_x < 0:
            raise ValueError(f"accumulated_x must be non-negative: {self.accumulated_x}")


def prepole(state: PolarizationState | None, direction: int) -> PolarizationState:
    """Saturate the polarization to ``direction`` and forget any switching history."""
    if direction not in (-1, 1):
        raise ValueError(f"direction must be +1 or -1: {direction}")
    d = float(direction)
    return PolarizationState(p=d, onset_p=d, onset_sign=direction, accumulated_x=0.0)


def apply_pulse(
    state: PolarizationState,
    pulse: Pulse,
    geom: DeviceGeometry,
    params: SwitchingParams,
) -> PolarizationState:
    if abs(pulse.amplitude) > geom.breakdown_voltage:
        raise BreakdownError(
            f"|{pulse.amplitude:g} V| exceeds the breakdown limit of {geom.breakdown_voltage:g} V"
        )
    field = geom.field_of_voltage(pulse.amplitude)
    dx = params.reduced_time(field, pulse.width)
    if dx == 0.0:
        return state

    sign = 1 if field > 0 else -1
    onset_p, x = state.onset_p, state.accumulated_x
    if sign != state.onset_sign:
        onset_p, x = state.p, 0.0
    x += dx
    f = switched_fraction(x, params.avrami_exponent)
    p = onset_p + (sign - onset_p) * f
    # guards against one-ulp rounding past saturation
    p = min(1.0, max(-1.0, p))
    return PolarizationState(p=p, onset_p=onset_p, onset_sign=sign, accumulated_x=x)
