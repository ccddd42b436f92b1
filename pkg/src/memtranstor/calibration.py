"""
Fit the switching kinetics to behavioral bounds on the switched fraction and
derive the alpha_E decision thresholds used by the memory and logic layers.

Each constraint bounds F after ``n_pulses`` identical pulses of one polarity.
The fit maximizes the smallest slack over all constraints with a coarse
log-grid followed by Nelder-Mead refinement of (log10 tau0, E_a).
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import math
import warnings
from typing import Any, Iterable, Sequence

import numpy as np
import numpy.typing as npt
import scipy.optimize

from .device import Device
from .errors import ConfigError, DegenerateBandError, InfeasibleWarning
from .kinetics import Pulse, SwitchingParams, switched_fraction


@dataclasses.dataclass(frozen=True)
class Constraint:
    field: float
    """Field magnitude [kV/cm]."""
    n_pulses: int
    width_ms: float
    lower: float | None = None
    upper: float | None = None
    note: str = ""

    def __post_init__(self) -> None:
        if self.lower is None and self.upper is None:
            raise ConfigError("constraint needs a lower or an upper bound")
        for b in (self.lower, self.upper):
            if b is not None and not 0.0 <= b <= 1.0:
                raise ConfigError(f"bounds must lie in [0, 1]: {self.lower}, {self.upper}")
        if self.n_pulses < 1:
            raise ConfigError(f"n_pulses must be >= 1: {self.n_pulses}")
        if not self.width_ms >= 0:
            raise ConfigError(f"width_ms must be non-negative: {self.width_ms}")

    def fraction(self, params: SwitchingParams) -> float:
        x = self.n_pulses * params.reduced_time(self.field, self.width_ms * 1e-3)
        return switched_fraction(x, params.avrami_exponent)

    def slack(self, params: SwitchingParams) -> float:
        f = self.fraction(params)
        slacks = []
        if self.lower is not None:
            slacks.append(f - self.lower)
        if self.upper is not None:
            slacks.append(self.upper - f)
        return min(slacks)


@dataclasses.dataclass(frozen=True)
class ConstraintSet:
    constraints: tuple[Constraint, ...]

    def __post_init__(self) -> None:
        if not self.constraints:
            raise ConfigError("constraint set is empty")

    def __len__(self) -> int:
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ConstraintSet:
        unknown = set(data) - {"constraints"}
        if unknown:
            raise ConfigError(f"unknown keys in constraint file: {sorted(unknown)}")
        allowed = {f.name for f in dataclasses.fields(Constraint)}
        items = []
        for raw in data.get("constraints", []):
            bad = set(raw) - allowed
            if bad:
                raise ConfigError(f"unknown constraint keys: {sorted(bad)}")
            items.append(Constraint(**raw))
        return cls(tuple(items))

    @classmethod
    def from_json(cls, text: str) -> ConstraintSet:
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict[str, Any]:
        return {"constraints": [dataclasses.asdict(c) for c in self.constraints]}


RESET_REPEATS = 4
"""Pulses in the memory reset burst; the reset constraint below is stated for the whole burst."""


def default_constraints() -> ConstraintSet:
    return ConstraintSet(
        (
            Constraint(0.5, 1, 10.0, upper=0.01, note="logic-0 input leaves P unchanged"),
            Constraint(2.9, 1, 10.0, lower=0.15, upper=0.45, note="one 58 V input: partial reversal"),
            Constraint(2.9, 2, 10.0, lower=0.55, note="two 58 V inputs: majority reversed"),
            Constraint(3.0, 1, 10.0, lower=0.15, upper=0.45, note="one 60 V input: partial reversal"),
            Constraint(3.0, 2, 10.0, lower=0.55, note="two 60 V inputs: majority reversed"),
            Constraint(5.0, 1, 10.0, lower=0.99, note="100 V input: full reversal"),
            Constraint(4.0, RESET_REPEATS, 10.0, lower=0.99, note="memory reset burst: full pole"),
        )
    )


def evaluate_constraints(
    params: SwitchingParams,
    constraints: Iterable[Constraint],
) -> npt.NDArray[np.float64]:
    """Signed slack per constraint; non-negative means satisfied."""
    return np.array([c.slack(params) for c in constraints], dtype=np.float64)


@dataclasses.dataclass(frozen=True)
class SearchBox:
    tau0: tuple[float, float] = (1e-5, 1e-1)
    """[s]"""
    activation_field: tuple[float, float] = (1.0, 30.0)
    """[kV/cm]"""
    betas: tuple[float, ...] = (1.0, 1.5, 2.0, 3.0)

    def __post_init__(self) -> None:
        for lo, hi in (self.tau0, self.activation_field):
            if not 0 < lo <= hi:
                raise ConfigError(f"search box bounds must be positive and ordered: {lo}, {hi}")
        if not self.betas or min(self.betas) < 1:
            raise ConfigError(f"betas must be non-empty and >= 1: {self.betas}")


@dataclasses.dataclass(frozen=True)
class FitResult:
    params: SwitchingParams
    residuals: npt.NDArray[np.float64]
    evaluations: int

    @property
    def feasible(self) -> bool:
        return bool(np.all(self.residuals >= 0))

    @property
    def min_slack(self) -> float:
        return float(np.min(self.residuals))


def fit(
    constraints: ConstraintSet,
    box: SearchBox = SearchBox(),
    budget: int = 4000,
    base: SwitchingParams = SwitchingParams(),
) -> FitResult:
    """
    Max-min-slack search. Deterministic for a given box and budget. Emits an
    ``InfeasibleWarning`` and returns the best point found when no feasible
    point exists within the budget.
    """
    if budget < 1:
        raise ConfigError(f"budget must be >= 1 evaluation: {budget}")
    constraints = tuple(constraints)
    used = 0

    def params_at(log_tau0: float, ea: float, beta: float) -> SwitchingParams:
        lt_lo, lt_hi = math.log10(box.tau0[0]), math.log10(box.tau0[1])
        log_tau0 = min(lt_hi, max(lt_lo, log_tau0))
        ea = min(box.activation_field[1], max(box.activation_field[0], ea))
        tau0 = min(box.tau0[1], max(box.tau0[0], 10.0**log_tau0))
        return dataclasses.replace(base, tau0=tau0, activation_field=ea, avrami_exponent=beta)

    def objective(params: SwitchingParams) -> float:
        nonlocal used
        used += 1
        return float(np.min(evaluate_constraints(params, constraints)))

    # Roughly half the budget goes to the grid, the rest to refinement.
    per_beta = max(1, budget // (2 * len(box.betas)))
    n_axis = max(1, int(math.isqrt(per_beta)))
    log_taus = np.linspace(math.log10(box.tau0[0]), math.log10(box.tau0[1]), n_axis)
    eas = np.geomspace(box.activation_field[0], box.activation_field[1], n_axis)

    best: tuple[float, float, float, float] | None = None  # (score, log_tau0, ea, beta)
    for beta, lt, ea in itertools.product(box.betas, log_taus, eas):
        if used >= budget:
            break
        score = objective(params_at(lt, ea, beta))
        if best is None or score > best[0]:
            best = (score, float(lt), float(ea), beta)
    assert best is not None

    remaining = budget - used
    if remaining > 0:
        _, lt0, ea0, beta = best
        simplex_scale = np.array(
            [
                max(1e-3, (log_taus[-1] - log_taus[0]) / max(1, n_axis - 1)),
                max(1e-3, (box.activation_field[1] - box.activation_field[0]) / max(1, n_axis - 1)),
            ]
        )
        start = np.array([lt0, ea0])
        initial_simplex = np.vstack([start, start + [simplex_scale[0], 0], start + [0, simplex_scale[1]]])
        res = scipy.optimize.minimize(
            lambda v: -objective(params_at(v[0], v[1], beta)),
            start,
            method="Nelder-Mead",
            options={
                "maxfev": remaining,
                "initial_simplex": initial_simplex,
                "xatol": 1e-10,
                "fatol": 1e-12,
            },
        )
        refined = params_at(res.x[0], res.x[1], beta)
        refined_score = float(np.min(evaluate_constraints(refined, constraints)))
        if refined_score > best[0]:
            best = (refined_score, math.log10(refined.tau0), refined.activation_field, beta)

    params = params_at(best[1], best[2], best[3])
    result = FitResult(params=params, residuals=evaluate_constraints(params, constraints), evaluations=used)
    if not result.feasible:
        warnings.warn(
            f"no feasible switching parameters within budget; best min slack {result.min_slack:.4g}",
            InfeasibleWarning,
            stacklevel=2,
        )
    return result


def midpoint_thresholds(alphas: Sequence[float], tol: float = 1e-9) -> list[float]:
    """Midpoints between adjacent sorted state values."""
    ordered = sorted(alphas)
    for a, b in zip(ordered, ordered[1:]):
        if b - a <= tol:
            raise DegenerateBandError(f"state alpha values {a:.6g} and {b:.6g} coincide")
    return [0.5 * (a + b) for a, b in zip(ordered, ordered[1:])]


@dataclasses.dataclass(frozen=True)
class Thresholds:
    state_alphas: tuple[float, ...]
    """alpha_E of each write recipe, in recipe order."""
    memory_thresholds: tuple[float, ...]
    initialized_alpha: float
    partial_alpha: float
    """alpha_E after initialization plus one logic-1 pulse of the second NOR mode."""
    nor_b_theta: float


def apply_sequence(device: Device, pulses: Iterable[Pulse]) -> Device:
    for pulse in pulses:
        device = device.apply(pulse)
    return device


def derive_thresholds(
    device: Device,
    recipes: Sequence[Sequence[Pulse]],
    partial_pulse: Pulse = Pulse(60.0, 10e-3),
    tol: float = 1e-9,
) -> Thresholds:
    """
    Forward-evaluate each write recipe and the one-pulse partial state on
    ``device`` and place thresholds at midpoints between the results.
    """
    alphas = tuple(apply_sequence(device, r).alpha_e for r in recipes)
    thresholds = midpoint_thresholds(alphas, tol)
    initialized = device.prepole(device.positive_high_direction())
    partial = initialized.apply(partial_pulse)
    if initialized.alpha_e - partial.alpha_e <= tol:
        raise DegenerateBandError("one partial pulse leaves alpha_E at the initialized value")
    return Thresholds(
        state_alphas=alphas,
        memory_thresholds=tuple(thresholds),
        initialized_alpha=initialized.alpha_e,
        partial_alpha=partial.alpha_e,
        nor_b_theta=0.5 * (initialized.alpha_e + partial.alpha_e),
    )
