"""
Dynamic ME readout: ac field excitation, device voltage response and a
rectangular-window digital lock-in over whole excitation periods.
"""

from __future__ import annotations

import bisect
import dataclasses
import math
from typing import Sequence

import numpy as np
import numpy.typing as npt

from .device import Device
from .errors import ConfigError, LengthError, ThresholdError
from .kinetics import DeviceGeometry


@dataclasses.dataclass(frozen=True)
class ReadoutConfig:
    h_ac_amplitude: float = 1.0
    """Excitation amplitude [Oe]."""
    frequency: float = 10e3
    """Excitation frequency [Hz]."""
    sample_rate: float = 1e6
    """Digitizer rate [Hz]."""
    n_cycles: int = 100
    noise_rms: float = 0.0
    """Additive white Gaussian voltage noise [V]; 0 disables."""
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not self.h_ac_amplitude > 0:
            raise ConfigError(f"h_ac_amplitude must be positive: {self.h_ac_amplitude}")
        if not self.frequency > 0:
            raise ConfigError(f"frequency must be positive: {self.frequency}")
        if not self.sample_rate >= 20 * self.frequency:
            raise ConfigError(
                f"sample_rate {self.sample_rate} Hz is below 20x the excitation frequency {self.frequency} Hz"
            )
        if not (isinstance(self.n_cycles, int) and self.n_cycles >= 1):
            raise ConfigError(f"n_cycles must be a positive integer: {self.n_cycles}")
        if not self.noise_rms >= 0:
            raise ConfigError(f"noise_rms must be non-negative: {self.noise_rms}")
        n = self.n_cycles * self.sample_rate / self.frequency
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise ConfigError("n_cycles * sample_rate / frequency must be a whole number of samples")

    @property
    def n_samples(self) -> int:
        return int(round(self.n_cycles * self.sample_rate / self.frequency))

    def signal_amplitude(self, alpha: float, geom: DeviceGeometry) -> float:
        """Peak ME voltage [V] for coefficient ``alpha``."""
        return alpha * geom.fe_thickness_cm * self.h_ac_amplitude

    def with_snr(self, snr_db: float, alpha_ref: float, geom: DeviceGeometry) -> ReadoutConfig:
        """Copy with noise set so the RMS signal of ``alpha_ref`` sits ``snr_db`` above the noise RMS."""
        signal_rms = abs(self.signal_amplitude(alpha_ref, geom)) / math.sqrt(2.0)
        return dataclasses.replace(self, noise_rms=signal_rms / 10 ** (snr_db / 20.0))


@dataclasses.dataclass(frozen=True)
class LockInOutput:
    x: float
    """In-phase component [V]."""
    y: float
    """Quadrature component [V]."""
    alpha_e_measured: float

    def to_dict(self) -> dict[str, float]:
        return {"x": self.x, "y": self.y, "alpha_e": self.alpha_e_measured}


def sample_times(cfg: ReadoutConfig, n: int | None = None) -> npt.NDArray[np.float64]:
    return np.arange(cfg.n_samples if n is None else n) / cfg.sample_rate


def _phase(cfg: ReadoutConfig, n: int) -> npt.NDArray[np.float64]:
    return 2.0 * np.pi * (cfg.frequency / cfg.sample_rate) * np.arange(n)


def synthesize_response(
    alpha_true: float,
    cfg: ReadoutConfig,
    geom: DeviceGeometry,
    rng: np.random.Generator | None = None,
) -> npt.NDArray[np.float64]:
    """
    Sampled ME voltage V_k = alpha * t_cm * h_ac * sin(2 pi f t_k) + noise.

    Without an explicit ``rng`` the noise is drawn from ``cfg.rng_seed``, so the
    same config always produces the same series.
    """
    n = cfg.n_samples
    series = cfg.signal_amplitude(alpha_true, geom) * np.sin(_phase(cfg, n))
    if cfg.noise_rms > 0:
        if rng is None:
            rng = np.random.default_rng(cfg.rng_seed)
        series = series + rng.normal(0.0, cfg.noise_rms, n)
    return series


def lockin_demodulate(
    series: npt.ArrayLike,
    cfg: ReadoutConfig,
    geom: DeviceGeometry,
) -> LockInOutput:
    v = np.asarray(series, dtype=np.float64)
    n = v.size
    periods = n * cfg.frequency / cfg.sample_rate
    if n == 0 or abs(periods - round(periods)) > 1e-9 * max(1.0, periods) or round(periods) < 1:
        raise LengthError(f"series of {n} samples is not a whole number of excitation periods")
    phase = _phase(cfg, n)
    x = 2.0 / n * float(np.dot(v, np.sin(phase)))
    y = 2.0 / n * float(np.dot(v, np.cos(phase)))
    alpha = x / (cfg.h_ac_amplitude * geom.fe_thickness_cm)
    return LockInOutput(x=x, y=y, alpha_e_measured=alpha)


def measure(
    device: Device,
    cfg: ReadoutConfig,
    rng: np.random.Generator | None = None,
) -> LockInOutput:
    """Non-destructive read of the device's ME coefficient."""
    series = synthesize_response(device.alpha_e, cfg, device.geometry, rng)
    return lockin_demodulate(series, cfg, device.geometry)


def quantize(alpha: float, thresholds: Sequence[float]) -> int:
    """Level index of ``alpha``; a value equal to a threshold goes to the upper level."""
    if len(thresholds) == 0:
        raise ThresholdError("threshold list is empty")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ThresholdError(f"thresholds must be strictly ascending: {list(thresholds)}")
    return bisect.bisect_right(list(thresholds), alpha)
