"""Complete memtranstor state: ferroelectric kinetics plus electrode magnetization."""

from __future__ import annotations

import dataclasses

from . import kinetics, magnetics
from .kinetics import DeviceGeometry, PolarizationState, Pulse, SwitchingParams
from .magnetics import MagnetizationState, MEComposition


@dataclasses.dataclass(frozen=True)
class Device:
    """Value-semantic device; every operation returns a new instance."""

    geometry: DeviceGeometry = dataclasses.field(default_factory=DeviceGeometry)
    switching: SwitchingParams = dataclasses.field(default_factory=SwitchingParams)
    polarization: PolarizationState = dataclasses.field(default_factory=PolarizationState)
    magnetization: MagnetizationState = dataclasses.field(default_factory=MagnetizationState)
    composition: MEComposition = dataclasses.field(default_factory=MEComposition)

    @property
    def p(self) -> float:
        return self.polarization.p

    @property
    def m(self) -> float:
        return self.magnetization.m

    @property
    def alpha_e(self) -> float:
        return magnetics.alpha_e(self.p, self.m, self.composition)

    def apply(self, pulse: Pulse) -> Device:
        pol = kinetics.apply_pulse(self.polarization, pulse, self.geometry, self.switching)
        return dataclasses.replace(self, polarization=pol)

    def pulse(self, amplitude: float, width: float = 10e-3) -> Device:
        return self.apply(Pulse(amplitude, width))

    def prepole(self, direction: int) -> Device:
        return dataclasses.replace(self, polarization=kinetics.prepole(self.polarization, direction))

    def set_h(self, h: float) -> Device:
        return dataclasses.replace(self, magnetization=magnetics.set_h_field(self.magnetization, h))

    def positive_high_direction(self) -> int:
        """Polarity of ``p`` that makes alpha_E equal +alpha_max*|m| at the present ``m``."""
        product = self.composition.orientation_sign * self.m
        if product == 0:
            raise ValueError("magnetization is zero; no polarity gives a positive alpha_E")
        return 1 if product > 0 else -1
