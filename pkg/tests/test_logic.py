import dataclasses

import numpy as np
import pytest

from memtranstor.errors import TruthTableMismatch
from memtranstor.kinetics import Pulse
from memtranstor.logic import (
    INPUT_ROWS,
    ThresholdRule,
    compute,
    default_gates,
    initialize,
    run_gate,
    truth_table,
)
from memtranstor.readout import measure

M_REM = float(np.tanh(100 / 80))


@pytest.fixture
def gates(device):
    return default_gates(device)


def test_initialize_positive_high(device, readout):
    d = initialize(device)
    assert d.p == -1.0
    assert measure(d, readout).alpha_e_measured == pytest.approx(M_REM, rel=1e-9)
    assert initialize(d) == d


def test_low_input_after_init_noop(device):
    d = initialize(device)
    assert d.apply(Pulse(10.0, 10e-3)).alpha_e == d.alpha_e


@pytest.mark.parametrize(
    "gate, outputs",
    [("NOR_A", (1, 0, 0, 0)), ("NOR_B", (1, 0, 0, 0)), ("NAND", (1, 1, 1, 0))],
)
def test_truth_tables(gate, outputs, gates, device, readout):
    res = truth_table(gates[gate], device, readout)
    assert res.passed
    assert res.outputs == outputs
    res.raise_for_mismatch()


def test_nor_a_levels(gates, device, readout):
    runs = {r.inputs: r for r in truth_table(gates["NOR_A"], device, readout).runs}
    assert runs[(0, 0)].alpha_out > 0
    for row in [(0, 1), (1, 0), (1, 1)]:
        assert runs[row].alpha_out < 0


def test_nand_single_one_reduced_but_positive(gates, device, readout):
    runs = {r.inputs: r for r in truth_table(gates["NAND"], device, readout).runs}
    assert 0 < runs[(1, 0)].alpha_out < runs[(0, 0)].alpha_out
    assert runs[(1, 1)].alpha_out < 0


def test_nor_b_ordering(gates, device, readout):
    theta = gates["NOR_B"].decision.theta
    runs = {r.inputs: r.alpha_out for r in truth_table(gates["NOR_B"], device, readout).runs}
    assert runs[(0, 0)] > theta > runs[(1, 0)] > 0 > runs[(1, 1)]
    # midpoint of the initialized state and one 60 V pulse from -1 (ODE oracle p = -0.28479673435825625)
    assert theta == pytest.approx(0.5 * (M_REM + 0.28479673435825625 * M_REM), abs=1e-8)


def test_degenerate_threshold_reported(gates, device, readout):
    gate = dataclasses.replace(gates["NOR_B"], decision=ThresholdRule(2.0))
    res = truth_table(gate, device, readout)
    assert res.outputs == (0, 0, 0, 0)
    assert not res.passed
    assert [r.inputs for r in res.failures] == [(0, 0)]
    with pytest.raises(TruthTableMismatch) as info:
        res.raise_for_mismatch()
    assert info.value.rows[0].inputs == (0, 0)


@pytest.mark.parametrize("name", ["NOR_A", "NOR_B", "NAND"])
def test_input_order_symmetry(name, gates, device, readout):
    gate = gates[name]
    a = run_gate(device, gate, 1, 0, readout)
    b = run_gate(device, gate, 0, 1, readout)
    assert a.output == b.output
    assert a.alpha_out == pytest.approx(b.alpha_out, abs=1e-9)


def test_nonvolatile_after_delay(gates, device, readout):
    gate = gates["NAND"]
    d = compute(device, gate, 1, 0)
    waited = d.apply(Pulse(0.0, 100.0))
    assert gate.decision.decide(measure(waited, readout).alpha_e_measured) == gate.decision.decide(
        measure(d, readout).alpha_e_measured
    )


def test_reinitialization_erases_history(gates, device, readout):
    gate = gates["NOR_B"]
    d = device
    for x1, x2 in [(1, 1), (1, 0), (1, 1)]:
        d = compute(d, gate, x1, x2)
    assert truth_table(gate, d, readout).passed


def test_noisy_truth_tables(gates, device, readout):
    cfg = readout.with_snr(40.0, device.composition.alpha_max, device.geometry)
    for gate in gates.values():
        for seed in range(20):
            assert truth_table(gate, device, dataclasses.replace(cfg, rng_seed=seed)).passed


def test_gate_config_validation(gates):
    with pytest.raises(ValueError):
        dataclasses.replace(gates["NAND"], v_low=100.0)
    with pytest.raises(ValueError):
        gates["NAND"].input_pulse(2)
    assert [gates["NAND"].expected(*r) for r in INPUT_ROWS] == [1, 1, 1, 0]
