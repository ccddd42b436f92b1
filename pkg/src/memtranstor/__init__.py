"""Behavioral simulator of a memtranstor: multi-level memory and NOR/NAND logic in one device."""

from .device import Device
from .errors import MemtranstorError
from .kinetics import DeviceGeometry, PolarizationState, Pulse, SwitchingParams
from .magnetics import MagnetizationState, MEComposition
from .readout import LockInOutput, ReadoutConfig

__all__ = [
    "Device",
    "DeviceGeometry",
    "LockInOutput",
    "MEComposition",
    "MagnetizationState",
    "MemtranstorError",
    "PolarizationState",
    "Pulse",
    "ReadoutConfig",
    "SwitchingParams",
]
