"""Synthetic ping generator: the ground-truth oracle for round-trip tests.

Scenes are rendered by inverting the single-target and volume power
budgets at the centre frequency: each point target contributes a delayed,
amplitude-scaled copy of the matched-filter replica whose processed peak
recovers its backscattering cross section exactly (noise-free, zero
absorption, on-axis).  Off-axis targets get per-sector phase offsets that
invert the split-aperture angle estimator and a two-way beam amplitude
factor evaluated at the centre frequency.  Volume fields are Poisson point
scatterers with uniform random phase, drawn in range shells whose expected
count is density * psi(f_c) * r^2 dr, which makes the ensemble-mean
recovered Sv equal 10 log10(density * sigma_bs).

Echo delays are quantized to the decimated sample grid (in ADC-rate
synthesis they are placed on the grid times the total decimation), so
configured ranges land on range-axis samples exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ComplexSeries,
    ConfigError,
    Environment,
    FrequencyTable,
    PingDefinition,
    SystemConfig,
    beam_gain,
    interp_table,
)
from .beamproc import power_scale
from .sv import psi_scaled
from .waveform import MatchedFilter, generate_lfm, normalize_transmit

__all__ = ["PointTarget", "VolumeField", "Scene", "synthesize_ping"]

RESPONSE_FIR_TAPS = 129


@dataclass(frozen=True)
class PointTarget:
    """One discrete scatterer.

    ``sigma_bs`` is the backscattering cross section at the centre
    frequency, m^2; ``response`` optionally shapes the echo spectrum with a
    linear amplitude response (normalized internally to 1 at f_c).
    """

    range_m: float
    sigma_bs: float
    theta: float = 0.0
    phi: float = 0.0
    response: FrequencyTable | None = None

    def __post_init__(self):
        if self.range_m <= 0:
            raise ConfigError("target range must be positive")
        if self.sigma_bs <= 0:
            raise ConfigError("sigma_bs must be positive")


@dataclass(frozen=True)
class VolumeField:
    """Homogeneous Poisson field of identical on-axis-equivalent scatterers."""

    density: float
    sigma_bs: float
    range_start: float
    range_stop: float

    def __post_init__(self):
        if self.density < 0:
            raise ConfigError("density must be non-negative")
        if self.sigma_bs <= 0:
            raise ConfigError("sigma_bs must be positive")
        if not (0 < self.range_start < self.range_stop):
            raise ConfigError("need 0 < range_start < range_stop")


@dataclass(frozen=True)
class Scene:
    point_targets: tuple = ()
    volume_field: VolumeField | None = None
    noise_power: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "point_targets", tuple(self.point_targets))
        if self.noise_power < 0:
            raise ConfigError("noise_power must be non-negative")


# quadrant order 1..4 = (aft,star), (aft,port), (fore,port), (fore,star);
# signs multiply gamma*sin(angle)/2 for the minor (fore/aft) and major
# (star/port) axes
_QUADRANT_SIGNS = ((-1, +1), (-1, -1), (+1, -1), (+1, +1))


def _echo_amplitude(sigma_bs, r, theta, phi, defn, sys, env):
    """Sector sample amplitude whose processed peak inverts the power budget."""
    f_c = defn.centre_frequency
    lam = env.sound_speed / f_c
    g0 = float(interp_table(sys.gain_table, f_c))
    b = float(beam_gain(sys, theta, phi, f_c))
    alpha = float(interp_table(env.absorption_table, f_c))
    peak_power = (
        defn.transmit_power
        * lam**2
        * (g0 * b) ** 2
        * sigma_bs
        / (16.0 * math.pi**2 * r**4)
        * 10.0 ** (-2.0 * alpha * r / 10.0)
    )
    return math.sqrt(peak_power / power_scale(sys))


def _response_fir(table: FrequencyTable, f_c: float, rate: float):
    """Zero-phase FIR realizing a normalized amplitude response.

    Frequency-sampling design on the baseband grid about f_c; returns the
    taps and the integer delay to subtract when placing the filtered echo.
    """
    n = RESPONSE_FIR_TAPS
    freqs = f_c + np.fft.fftfreq(n, 1.0 / rate)
    desired = np.asarray(table(freqs), dtype=float) / float(table(f_c))
    taps = np.roll(np.fft.ifft(desired), (n - 1) // 2)
    return taps, (n - 1) // 2


def _place(record, waveform, start):
    if start < 0 or start + waveform.size > record.size:
        raise ConfigError("target echo falls outside the record")
    record[start : start + waveform.size] += waveform


def synthesize_ping(
    scene: Scene,
    defn: PingDefinition,
    sys: SystemConfig,
    env: Environment,
    mf: MatchedFilter,
    record_range: float | None = None,
    domain: str = "decimated",
) -> list:
    """Render one ping as per-sector raw sample series.

    ``domain="decimated"`` outputs at the replica rate, emulating an ideal
    front end; ``domain="adc"`` outputs the normalized transmit waveform at
    the ADC rate for full-chain tests (run the result through
    :func:`echochain.frontend.filter_decimate` before pulse compression).
    """
    if domain not in ("decimated", "adc"):
        raise ValueError("domain must be 'decimated' or 'adc'")
    rng = np.random.default_rng(scene.seed)
    f_dec = mf.replica.sample_rate
    c = env.sound_speed

    if domain == "decimated":
        base = mf.replica.samples
        rate = f_dec
        upsample = 1
        offset = mf.replica.start_index_offset
    else:
        tx = normalize_transmit(generate_lfm(defn))
        base = tx.samples
        rate = defn.adc_rate
        upsample = int(round(rate / f_dec))
        offset = 0

    ranges = [t.range_m for t in scene.point_targets]
    if scene.volume_field is not None:
        ranges.append(scene.volume_field.range_stop)
    if record_range is None:
        if not ranges:
            raise ConfigError("empty scene needs an explicit record_range")
        record_range = 1.05 * max(ranges) + 2.0
    n_record = (
        int(math.ceil(2.0 * record_range / c * f_dec)) * upsample
        + base.size
        + RESPONSE_FIR_TAPS
    )

    record = np.zeros(n_record, dtype=np.complex128)
    sectors = [record.copy() for _ in range(sys.num_sectors)]

    for tgt in scene.point_targets:
        delta = round(2.0 * tgt.range_m / c * f_dec) * upsample
        a = _echo_amplitude(
            tgt.sigma_bs, tgt.range_m, tgt.theta, tgt.phi, defn, sys, env
        )
        waveform = base
        start = delta
        if tgt.response is not None:
            taps, delay = _response_fir(tgt.response, defn.centre_frequency, rate)
            waveform = np.convolve(base, taps)
            start = delta - delay
        half_minor = 0.5 * sys.angle_sensitivity_minor * math.sin(tgt.theta)
        half_major = 0.5 * sys.angle_sensitivity_major * math.sin(tgt.phi)
        # Averaging four phase-offset sectors attenuates the mean by
        # cos(half_minor) * cos(half_major); that array-factor loss is part
        # of the beam model already, so scale sector amplitudes to keep the
        # sector mean at exactly the budget amplitude.
        coherence = math.cos(half_minor) * math.cos(half_major)
        if coherence < 0.1:
            raise ConfigError("bearing too far off axis for the sector phase model")
        for q, (s_minor, s_major) in enumerate(_QUADRANT_SIGNS):
            phase = s_minor * half_minor + s_major * half_major
            _place(
                sectors[sys.sector_map[q]],
                (a / coherence) * np.exp(1j * phase) * waveform,
                start,
            )

    field = scene.volume_field
    if field is not None and field.density > 0:
        psi = psi_scaled(sys, defn.centre_frequency)
        expected = field.density * psi * (field.range_stop**3 - field.range_start**3) / 3.0
        count = int(rng.poisson(expected))
        u = rng.random(count)
        radii = np.cbrt(field.range_start**3 + u * (field.range_stop**3 - field.range_start**3))
        phases = rng.uniform(0.0, 2.0 * np.pi, count)
        shared = np.zeros(n_record, dtype=np.complex128)
        for r, ph in zip(radii, phases):
            delta = round(2.0 * r / c * f_dec) * upsample
            a = _echo_amplitude(field.sigma_bs, float(r), 0.0, 0.0, defn, sys, env)
            _place(shared, a * np.exp(1j * ph) * base, delta)
        for s in sectors:
            s += shared

    if scene.noise_power > 0:
        # per-sample, per-sector noise power expressed in matched-load W
        var = scene.noise_power / power_scale(sys)
        sigma = math.sqrt(var / 2.0)
        for s in sectors:
            s += sigma * (
                rng.standard_normal(n_record) + 1j * rng.standard_normal(n_record)
            )

    return [ComplexSeries(s, rate, offset) for s in sectors]
