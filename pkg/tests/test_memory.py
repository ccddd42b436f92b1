import dataclasses

import numpy as np
import pytest

from memtranstor.memory import (
    build_level_table,
    cycle_endurance,
    default_recipes,
    read_level,
    write_level,
)
from memtranstor.readout import ReadoutConfig

# alpha_E = orientation_sign * p * tanh(100/80) with p frozen from the ODE oracle in test_kinetics
M_REM = float(np.tanh(100 / 80))
EXPECTED_ALPHAS = [
    -0.9803909594085103 * M_REM,  # reset then +100 V
    0.39326874266234924 * M_REM,  # reset then +58 V
    0.6714339224665036 * M_REM,  # reset then +52 V
    1.0 * M_REM,  # reset only
]


@pytest.fixture
def table(device):
    return build_level_table(device)


def test_recipes_use_paper_fields(device):
    fields = set()
    for r in default_recipes():
        for pulse in r.pulses():
            fields.add(round(device.geometry.field_of_voltage(pulse.amplitude), 6))
    assert fields == {-4.0, 5.0, 2.9, 2.6}


def test_level_alphas_match_oracle(table):
    np.testing.assert_allclose(table.alphas, EXPECTED_ALPHAS, atol=1e-7)
    assert [lv.recipe.name for lv in table.levels] == ["set-5.0", "set-2.9", "set-2.6", "reset"]
    assert table.alphas[0] < 0 < table.alphas[1]
    np.testing.assert_allclose(
        table.thresholds,
        [0.5 * (a + b) for a, b in zip(EXPECTED_ALPHAS, EXPECTED_ALPHAS[1:])],
        atol=1e-7,
    )


def test_bands_disjoint_with_margin(table, device):
    gaps = np.diff(table.alphas)
    assert gaps.min() >= 0.1 * device.composition.alpha_max
    for a, b in zip(table.levels, table.levels[1:]):
        assert a.band[1] == b.band[0]
        assert a.band[0] < a.alpha < a.band[1]


def test_reset_only_is_negative_pole(device, table):
    d = write_level(device.prepole(1), 3, table)
    assert d.p == pytest.approx(-1.0, abs=1e-12)
    d = write_level(device, 0, table)
    assert d.p == pytest.approx(1.0, abs=0.02)


def test_write_idempotent(device, table):
    for start in range(4):
        for k in range(4):
            base = write_level(device, start, table)
            once = write_level(base, k, table)
            twice = write_level(once, k, table)
            assert twice.p == pytest.approx(once.p, abs=1e-9)


def test_round_trip_noiseless(device, table, readout):
    for k in range(4):
        assert read_level(write_level(device, k, table), table, readout) == k


def test_repeated_reads_identical(device, table, readout):
    d = write_level(device, 1, table)
    assert {read_level(d, table, readout) for _ in range(100)} == {1}


def test_noisy_misread_rate(device, table, readout):
    cfg = readout.with_snr(40.0, device.composition.alpha_max, device.geometry)
    rng = np.random.default_rng(7)
    errors = 0
    for trial in range(1000):
        k = trial % 4
        errors += read_level(write_level(device, k, table), table, cfg, rng) != k
    assert errors / 1000 < 0.01


def test_cycling_report(device, table, readout):
    report = cycle_endurance(device, table, [0, 1, 2, 3], 10, readout)
    assert len(report.records) == 40
    assert report.errors == 0
    for c in range(10):
        alphas = [r.alpha_measured for r in report.records if r.cycle == c]
        assert alphas == sorted(alphas)
        np.testing.assert_allclose(alphas, EXPECTED_ALPHAS, atol=1e-7)
    csv_text = report.to_csv()
    assert csv_text.splitlines()[0] == "cycle,level_written,alpha_measured,level_read"
    assert len(csv_text.splitlines()) == 41


def test_single_level_single_cycle(device, table, readout):
    report = cycle_endurance(device, table, [2], 1, readout)
    assert [(r.level_written, r.level_read) for r in report.records] == [(2, 2)]


def test_bad_level(device, table):
    with pytest.raises(ValueError):
        write_level(device, 4, table)


def test_min_gap_enforced(device):
    with pytest.raises(ValueError):
        build_level_table(device, min_gap=0.5)
