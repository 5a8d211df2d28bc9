"""Shared fixtures: a 160-260 kHz / 2.048 ms reference configuration.

Gain-table shapes matter for round-trip exactness: the simulator scales
echoes at the centre frequency only, so tests that check per-bin spectra
use tables that make the per-bin system response flat across the band
(g0 proportional to f for single targets, to f^2 for volume fields, which
cancels the wavelength and equivalent-beam-angle frequency dependence).
"""

from dataclasses import replace

import numpy as np
import pytest

import echochain as ec

F_START = 160e3
F_STOP = 260e3
F_C = 210e3
DURATION = 2.048e-3
ADC_RATE = 1.5e6
SOUND_SPEED = 1500.0
G0_FC = 10 ** 2.5


@pytest.fixture(scope="session")
def base_defn():
    return ec.PingDefinition(
        f_start=F_START,
        f_stop=F_STOP,
        duration=DURATION,
        transmit_power=1000.0,
        adc_rate=ADC_RATE,
        taper_fraction=0.01,
    )


@pytest.fixture(scope="session")
def plan(base_defn):
    return ec.design_plan(base_defn, 1.5)


@pytest.fixture(scope="session")
def defn(base_defn, plan):
    return replace(base_defn, filter_plan=plan.stages)


@pytest.fixture(scope="session")
def mf(defn, plan):
    tx = ec.normalize_transmit(ec.generate_lfm(defn))
    return ec.build_matched_filter(tx, plan.stages)


def make_system(gain_shape="flat"):
    fgrid = np.linspace(120e3, 300e3, 361)
    if gain_shape == "flat":
        gains = np.full_like(fgrid, G0_FC)
    elif gain_shape == "linear":
        gains = G0_FC * fgrid / F_C
    elif gain_shape == "quadratic":
        gains = G0_FC * (fgrid / F_C) ** 2
    else:
        raise ValueError(gain_shape)
    return ec.SystemConfig(
        z_receiver=1000 + 0j,
        z_transducer=75 + 0j,
        angle_sensitivity_minor=21.0,
        angle_sensitivity_major=19.0,
        gain_table=ec.FrequencyTable(fgrid, gains),
        psi_nominal=0.008,
        f_nominal=F_C,
        beamwidth_minor=0.12,
        beamwidth_major=0.12,
    )


def make_env(alpha_db_per_m=0.0):
    return ec.Environment(
        sound_speed=SOUND_SPEED,
        absorption_table=ec.FrequencyTable.constant(alpha_db_per_m, 1.0, 1e6),
    )


@pytest.fixture(scope="session")
def sys_flat():
    return make_system("flat")


@pytest.fixture(scope="session")
def sys_lin():
    return make_system("linear")


@pytest.fixture(scope="session")
def sys_quad():
    return make_system("quadratic")


@pytest.fixture(scope="session")
def env0():
    return make_env(0.0)


def detect_params(mf, threshold_db=-60.0, **kw):
    kw.setdefault("max_half_window", (len(mf.autocorr) - 1) // 2)
    return ec.DetectionParams(threshold_db=threshold_db, **kw)


def run_chain(scene, defn, sys_, env, mf, record_range=None, domain="decimated"):
    """Synthesize one ping and pulse-compress it (decimating first when the
    scene was rendered at the ADC rate)."""
    sectors = ec.synthesize_ping(
        scene, defn, sys_, env, mf, record_range=record_range, domain=domain
    )
    if domain == "adc":
        dp = ec.DecimationPlan(
            stages=defn.filter_plan,
            input_rate=defn.adc_rate,
            output_rate=mf.replica.sample_rate,
        )
        sectors = [ec.filter_decimate(s, dp) for s in sectors]
    return ec.pulse_compress(sectors, mf, sys_, env)
