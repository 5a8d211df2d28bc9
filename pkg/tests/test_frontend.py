"""Stage design and the filter/decimate cascade."""

import numpy as np
import pytest

import echochain as ec
from echochain.frontend import apply_filter_stages


def test_design_example_product_ten(base_defn):
    # 1.5 MHz ADC, 100 kHz band, factor 1.5: largest product is 10
    plan = ec.design_plan(base_defn, 1.5)
    assert plan.total_decimation == 10
    assert plan.output_rate == 150000.0


def test_design_pure_filter_when_product_one(base_defn):
    plan = ec.design_plan(base_defn, 12.0)  # 1.5e6 / (12*100e3) -> 1
    assert plan.total_decimation == 1
    assert plan.output_rate == base_defn.adc_rate
    assert len(plan.stages) == 1


def test_rate_arithmetic_eight_two():
    stages = (
        ec.FilterStage(np.ones(3) / 3, 8),
        ec.FilterStage(np.ones(3) / 3, 2),
    )
    plan = ec.DecimationPlan(stages=stages, input_rate=1.5e6, output_rate=1.5e6 / 16)
    assert plan.output_rate == 93750.0


def test_inconsistent_rate_rejected():
    stages = (ec.FilterStage(np.ones(3) / 3, 4),)
    with pytest.raises(ec.ConfigError):
        ec.DecimationPlan(stages=stages, input_rate=1e6, output_rate=300e3)


def test_unattainable_rate(base_defn):
    with pytest.raises(ec.ConfigError):
        ec.design_plan(base_defn, 20.0)  # needs 2 MHz output from 1.5 MHz ADC
    with pytest.raises(ValueError):
        ec.design_plan(base_defn, 1.0)


def test_impulse_through_single_stage_returns_taps():
    h = np.array([0.25, 0.5, 0.25], dtype=complex)
    plan = ec.DecimationPlan(stages=(ec.FilterStage(h, 1),), input_rate=1e3,
                             output_rate=1e3)
    x = ec.ComplexSeries(np.array([1.0 + 0j]), 1e3)
    out = ec.filter_decimate(x, plan)
    assert np.allclose(out.samples, h)


def test_dc_gain_steady_state(plan):
    n = 4000
    x = ec.ComplexSeries(np.ones(n, dtype=complex), plan.input_rate)
    out = ec.filter_decimate(x, plan)
    mid = out.samples[len(out) // 3 : 2 * len(out) // 3]
    assert np.allclose(np.abs(mid), 1.0, atol=2e-4)


def test_length_arithmetic_two_stages():
    h = np.ones(5, dtype=complex) / 5
    stages = (ec.FilterStage(h, 2), ec.FilterStage(h, 2))
    plan = ec.DecimationPlan(stages=stages, input_rate=1e3, output_rate=250.0)
    n = 1000
    out = ec.filter_decimate(ec.ComplexSeries(np.ones(n, complex), 1e3), plan)
    assert abs(len(out) - n / 4) < 4


def test_linearity(plan):
    rng = np.random.default_rng(5)
    n = 2000
    x = rng.normal(size=n) + 1j * rng.normal(size=n)
    y = rng.normal(size=n) + 1j * rng.normal(size=n)
    a, b = 1.7 - 0.3j, -0.6 + 2.1j
    fx = ec.filter_decimate(ec.ComplexSeries(x, plan.input_rate), plan).samples
    fy = ec.filter_decimate(ec.ComplexSeries(y, plan.input_rate), plan).samples
    fxy = ec.filter_decimate(
        ec.ComplexSeries(a * x + b * y, plan.input_rate), plan
    ).samples
    scale = np.max(np.abs(fxy))
    assert np.max(np.abs(fxy - (a * fx + b * fy))) < 1e-12 * max(scale, 1.0)


def test_cascade_equals_composed_single_stage(plan):
    """Noble identity: cascade of (h1, D1), (h2, D2) equals one stage with
    h1 * upsample(h2, D1) decimated by D1*D2, checked on an in-band tone."""
    assert len(plan.stages) == 2
    (s1, s2) = plan.stages
    h2_up = np.zeros((len(s2.coefficients) - 1) * s1.decimation + 1, dtype=complex)
    h2_up[:: s1.decimation] = s2.coefficients
    combined = np.convolve(s1.coefficients, h2_up)
    total = s1.decimation * s2.decimation

    fs = plan.input_rate
    n = 6000
    t = np.arange(n) / fs
    tone = np.exp(2j * np.pi * 20e3 * t)  # inside the passband

    casc, _, _ = apply_filter_stages(tone, 0, plan.stages)
    single, _, _ = apply_filter_stages(
        tone, 0, (ec.FilterStage(combined, total),)
    )
    m = min(casc.size, single.size)
    sl = slice(m // 3, 2 * m // 3)  # steady state
    err = np.max(np.abs(casc[sl] - single[sl])) / np.max(np.abs(single[sl]))
    assert err < 1e-9


def test_inband_preserved_outband_suppressed(plan):
    fs = plan.input_rate
    n = 60000
    t = np.arange(n) / fs

    def gain(freq):
        tone = ec.ComplexSeries(np.exp(2j * np.pi * freq * t), fs)
        out = ec.filter_decimate(tone, plan).samples
        mid = out[out.size // 3 : 2 * out.size // 3]
        return np.max(np.abs(mid))

    for f in (0.0, 15e3, 40e3, plan.passband_edge * 0.95):
        g = gain(f)
        assert abs(20 * np.log10(g)) < 0.5, f
    for f in (plan.stopband_edge * 1.02, 100e3, 200e3):
        g = gain(f)
        assert 20 * np.log10(g) < -60.0, f


def test_offsets_integer_for_designed_plan(plan):
    x = ec.ComplexSeries(np.ones(5000, complex), plan.input_rate)
    out, off, total = apply_filter_stages(x.samples, 0, plan.stages)
    assert off.denominator == 1
    assert total == plan.total_decimation
