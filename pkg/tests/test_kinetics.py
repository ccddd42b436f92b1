import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from memtranstor.errors import BreakdownError
from memtranstor.kinetics import (
    DeviceGeometry,
    PolarizationState,
    Pulse,
    SwitchingParams,
    apply_pulse,
    prepole,
    switched_fraction,
)

GEOM = DeviceGeometry()
PARAMS = SwitchingParams()

# Frozen from a DOP853 integration of dF/dt = beta (t/tau)^(beta-1) (1-F) / tau
# with the episode bookkeeping done by hand (rtol 1e-12).
ORACLE_58V_FROM_PLUS = (0.39326874266234924, -0.5289688928616654)
ORACLE_100V_FROM_PLUS = -0.9803909594085103
ORACLE_52V_FROM_MINUS = -0.6714339224665036


def kai_by_integration(beta: float, x_total: float) -> float:
    sol = solve_ivp(lambda x, f: beta * x ** (beta - 1) * (1 - f), (0, x_total), [0.0], rtol=1e-12, atol=1e-14)
    return float(sol.y[0, -1])


@pytest.mark.parametrize(
    "field_v, expected_kv_cm",
    [(100, 5.0), (58, 2.9), (52, 2.6), (-80, -4.0)],
)
def test_field_of_voltage(field_v, expected_kv_cm):
    assert GEOM.field_of_voltage(field_v) == pytest.approx(expected_kv_cm, rel=1e-12)


def test_switched_fraction_zero():
    assert switched_fraction(0.0, 2.0) == 0.0


@pytest.mark.parametrize("x_total", [1.0, 0.597])
def test_switched_fraction_matches_ode(x_total):
    assert switched_fraction(x_total, 2.0) == pytest.approx(kai_by_integration(2.0, x_total), abs=1e-9)
    if x_total == 1.0:
        assert switched_fraction(x_total, 2.0) == pytest.approx(0.6321, abs=1e-4)
    else:
        assert switched_fraction(x_total, 2.0) == pytest.approx(0.30, abs=5e-3)


def test_switched_fraction_rejects_negative():
    with pytest.raises(ValueError):
        switched_fraction(-1.0, 2.0)


def test_switching_time_strictly_decreasing():
    taus = [PARAMS.switching_time(e) for e in np.linspace(0.5, 20, 200)]
    assert all(b < a for a, b in zip(taus, taus[1:]))
    assert PARAMS.switching_time(2.9) == pytest.approx(16.63e-3, rel=1e-3)


def test_low_input_is_exact_noop():
    s = prepole(None, 1)
    assert apply_pulse(s, Pulse(10.0, 10e-3), GEOM, PARAMS) == s
    s = prepole(None, -1)
    assert apply_pulse(s, Pulse(10.0, 10e-3), GEOM, PARAMS) == s


@pytest.mark.parametrize("width", [0.0, 1e-3, 1.0])
def test_zero_field_is_identity(width):
    s = PolarizationState(p=0.3, onset_p=-1.0, onset_sign=1, accumulated_x=0.4)
    assert apply_pulse(s, Pulse(0.0, width), GEOM, PARAMS) is s


def test_two_58v_pulses_match_oracle():
    s = prepole(None, 1)
    s = apply_pulse(s, Pulse(-58.0, 10e-3), GEOM, PARAMS)
    assert s.p == pytest.approx(ORACLE_58V_FROM_PLUS[0], abs=1e-9)
    s = apply_pulse(s, Pulse(-58.0, 10e-3), GEOM, PARAMS)
    assert s.p == pytest.approx(ORACLE_58V_FROM_PLUS[1], abs=1e-9)


def test_full_reversal_and_partial_oracles():
    s = apply_pulse(prepole(None, 1), Pulse(-100.0, 10e-3), GEOM, PARAMS)
    assert s.p == pytest.approx(ORACLE_100V_FROM_PLUS, abs=1e-9)
    assert abs(s.p - (-1)) <= 0.02
    s = apply_pulse(prepole(None, -1), Pulse(52.0, 10e-3), GEOM, PARAMS)
    assert s.p == pytest.approx(ORACLE_52V_FROM_MINUS, abs=1e-9)


@pytest.mark.parametrize("direction", [1, -1])
def test_prepole_resets_episode(direction):
    s = PolarizationState(p=0.1, onset_p=-1.0, onset_sign=1, accumulated_x=0.77)
    out = prepole(s, direction)
    assert out == PolarizationState(float(direction), float(direction), direction, 0.0)


def test_prepole_rejects_bad_direction():
    with pytest.raises(ValueError):
        prepole(None, 0)


def test_breakdown():
    with pytest.raises(BreakdownError):
        apply_pulse(prepole(None, 1), Pulse(151.0, 10e-3), GEOM, PARAMS)
    apply_pulse(prepole(None, 1), Pulse(-150.0, 10e-3), GEOM, PARAMS)


def test_polarity_flip_starts_new_episode():
    s = apply_pulse(prepole(None, -1), Pulse(58.0, 10e-3), GEOM, PARAMS)
    s2 = apply_pulse(s, Pulse(-58.0, 10e-3), GEOM, PARAMS)
    assert s2.onset_p == s.p
    assert s2.onset_sign == -1
    assert s2.accumulated_x == pytest.approx(PARAMS.reduced_time(2.9, 10e-3))


def test_saturated_same_sign_pulse_noop():
    s = prepole(None, 1)
    assert apply_pulse(s, Pulse(100.0, 10e-3), GEOM, PARAMS).p == 1.0


pulses = st.builds(
    Pulse,
    amplitude=st.floats(-150, 150, allow_nan=False),
    width=st.floats(0, 0.1, allow_nan=False),
)


@settings(max_examples=300, deadline=None)
@given(st.sampled_from([-1, 1]), st.lists(pulses, max_size=20))
def test_p_stays_bounded_and_between_onset_and_sign(start, seq):
    s = prepole(None, start)
    for pulse in seq:
        s = apply_pulse(s, pulse, GEOM, PARAMS)
        assert -1.0 <= s.p <= 1.0
        assert s.accumulated_x >= 0
        lo, hi = sorted((s.onset_p, float(s.onset_sign)))
        assert lo - 1e-15 <= s.p <= hi + 1e-15


@settings(max_examples=300, deadline=None)
@given(
    st.floats(-150, 150, allow_nan=False),
    st.floats(1e-6, 0.05),
    st.floats(-1, 1),
)
def test_accumulation_identity(volts, width, p0):
    start = PolarizationState(p=p0, onset_p=p0, onset_sign=1 if volts <= 0 else -1, accumulated_x=0.0)
    twice = apply_pulse(apply_pulse(start, Pulse(volts, width), GEOM, PARAMS), Pulse(volts, width), GEOM, PARAMS)
    once = apply_pulse(start, Pulse(volts, 2 * width), GEOM, PARAMS)
    assert twice.accumulated_x == pytest.approx(once.accumulated_x, rel=1e-12, abs=0)
    assert twice.p == pytest.approx(once.p, rel=1e-12, abs=1e-15)


def test_monotone_in_field_and_width():
    volts = np.linspace(0, 150, 50)
    widths = np.linspace(0, 50e-3, 50)
    dp = np.array(
        [[abs(apply_pulse(prepole(None, 1), Pulse(-v, w), GEOM, PARAMS).p - 1.0) for w in widths] for v in volts]
    )
    assert np.all(np.diff(dp, axis=0) >= 0)
    assert np.all(np.diff(dp, axis=1) >= 0)


def test_determinism():
    seq = [Pulse(58.0, 10e-3), Pulse(-30.0, 3e-3), Pulse(100.0, 1e-3)]

    def run():
        s = prepole(None, -1)
        for pulse in seq:
            s = apply_pulse(s, pulse, GEOM, PARAMS)
        return s

    assert run() == run()


def test_params_validation():
    with pytest.raises(ValueError):
        SwitchingParams(avrami_exponent=0.5)
    with pytest.raises(ValueError):
        SwitchingParams(tau0=0)
    with pytest.raises(ValueError):
        DeviceGeometry(fe_thickness=-1)
    with pytest.raises(ValueError):
        Pulse(1.0, -1e-3)
    assert dataclasses.replace(PARAMS, tau0=1.0).tau0 == 1.0
    assert math.isinf(PARAMS.switching_time(0.0))
