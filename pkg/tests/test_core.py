"""Domain types, table interpolation, frequency grids, dB helpers."""

import numpy as np
import pytest

import echochain as ec


def test_interp_single_point_table():
    t = ec.FrequencyTable(np.array([100e3]), np.array([2.0]))
    assert ec.interp_table(t, 100e3) == 2.0
    # clamped everywhere for a single point
    assert ec.interp_table(t, 50e3) == 2.0


def test_interp_midpoint():
    t = ec.FrequencyTable(np.array([100e3, 200e3]), np.array([1.0, 3.0]))
    assert ec.interp_table(t, 150e3) == pytest.approx(2.0)


def test_interp_clamps_beyond_ends():
    t = ec.FrequencyTable(np.array([100e3, 200e3]), np.array([1.0, 3.0]))
    assert ec.interp_table(t, 250e3) == 3.0
    assert ec.interp_table(t, 10e3) == 1.0


def test_interp_monotone_preserving():
    rng = np.random.default_rng(42)
    for _ in range(20):
        n = rng.integers(2, 12)
        freqs = np.sort(rng.uniform(1e3, 1e6, n))
        freqs += np.arange(n)  # guarantee strictly ascending
        vals = np.sort(rng.normal(size=n))
        t = ec.FrequencyTable(freqs, vals)
        q = np.sort(rng.uniform(0.5e3, 1.2e6, 50))
        out = t(q)
        assert np.all(np.diff(out) >= -1e-12)


def test_empty_table_rejected():
    with pytest.raises(ec.ConfigError):
        ec.FrequencyTable(np.array([]), np.array([]))


def test_dft_grid_four_point():
    got = ec.dft_frequency_grid(4, 100.0, 1000.0)
    assert np.array_equal(got, np.array([950.0, 975.0, 1000.0, 1025.0]))


def test_dft_grid_two_point():
    got = ec.dft_frequency_grid(2, 100.0, 0.0)
    assert np.array_equal(got, np.array([-50.0, 0.0]))


@pytest.mark.parametrize("n", [2, 8, 64, 1024])
def test_dft_grid_contains_centre_and_spans_rate(n):
    grid = ec.dft_frequency_grid(n, 96e3, 210e3)
    assert 210e3 in grid
    assert grid[-1] - grid[0] == pytest.approx(96e3 * (n - 1) / n)
    step = np.diff(grid)
    assert np.allclose(step, 96e3 / n)


def test_dft_grid_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        ec.dft_frequency_grid(12, 100.0, 0.0)


def test_db_round_trip():
    rng = np.random.default_rng(1)
    x = 10 ** rng.uniform(-12, 6, 200)
    back = ec.from_db(ec.to_db(x))
    assert np.all(np.abs(back - x) <= 1e-12 * x)


def test_complex_series_validation():
    with pytest.raises(ValueError):
        ec.ComplexSeries(np.array([1.0, np.nan]), 1000.0)
    with pytest.raises(ValueError):
        ec.ComplexSeries(np.array([1.0]), 0.0)
    s = ec.ComplexSeries(np.array([1 + 2j]), 10.0, start_index_offset=3)
    assert s.times()[0] == pytest.approx(0.3)


def test_ping_definition_validation():
    with pytest.raises(ec.ConfigError):
        ec.PingDefinition(f_start=200e3, f_stop=100e3, duration=1e-3,
                          transmit_power=1.0, adc_rate=1e6)
    with pytest.raises(ec.ConfigError):
        ec.PingDefinition(f_start=100e3, f_stop=600e3, duration=1e-3,
                          transmit_power=1.0, adc_rate=1e6)
    d = ec.PingDefinition(f_start=100e3, f_stop=200e3, duration=1e-3,
                          transmit_power=1.0, adc_rate=1e6)
    assert d.centre_frequency == 150e3
    assert d.bandwidth == 100e3


def test_system_config_rejects_non_four_sector():
    fgrid = np.array([100e3, 300e3])
    with pytest.raises(ec.ConfigError):
        ec.SystemConfig(
            z_receiver=1000 + 0j, z_transducer=75 + 0j,
            angle_sensitivity_minor=20.0, angle_sensitivity_major=20.0,
            gain_table=ec.FrequencyTable(fgrid, np.array([100.0, 100.0])),
            psi_nominal=0.008, f_nominal=200e3,
            beamwidth_minor=0.12, beamwidth_major=0.12,
            num_sectors=3,
        )


def test_beam_gain_identity_on_axis(sys_flat):
    assert ec.beam_gain(sys_flat, 0.0, 0.0, 210e3) == 1.0


def test_beam_gain_half_power_at_half_beamwidth(sys_flat):
    b = ec.beam_gain(sys_flat, sys_flat.beamwidth_minor / 2, 0.0, sys_flat.f_nominal)
    assert 10 * np.log10(b) == pytest.approx(-10 * np.log10(2.0), abs=1e-9)


def test_beam_gain_narrows_with_frequency(sys_flat):
    lo = ec.beam_gain(sys_flat, 0.02, 0.01, 160e3)
    hi = ec.beam_gain(sys_flat, 0.02, 0.01, 260e3)
    assert hi < lo
