"""Per-sector pulse compression, sector combination, split-aperture angle
estimation, and conversion of complex samples to received electric power.

Quadrant layout (viewed from above, ship-mounted):

    fore = (sectors 3 + 4) / 2      star = (sectors 1 + 4) / 2
    aft  = (sectors 1 + 2) / 2      port = (sectors 2 + 3) / 2

Data channels are mapped onto that layout via ``SystemConfig.sector_map``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .core import ComplexSeries, ConfigError, Environment, SystemConfig
from .waveform import MatchedFilter

__all__ = [
    "CompressedPing",
    "AngleSeries",
    "pulse_compress",
    "estimate_angles",
    "received_power",
    "power_scale",
]


@dataclass(frozen=True)
class CompressedPing:
    """Pulse-compressed sector signals on a common, delay-aligned time axis.

    Sample ``n`` of every series corresponds to two-way travel time
    ``n / sample_rate`` (plus the shared integer offset), so ``range_axis``
    is strictly increasing from zero.
    """

    per_sector: tuple
    mean: ComplexSeries
    fore: ComplexSeries
    aft: ComplexSeries
    star: ComplexSeries
    port: ComplexSeries
    range_axis: np.ndarray

    @property
    def sample_rate(self) -> float:
        return self.mean.sample_rate

    def __len__(self):
        return len(self.mean)


@dataclass(frozen=True)
class AngleSeries:
    """Per-sample echo arrival angles; NaN marks samples where the scaled
    electrical phase fell outside the arcsine domain."""

    minor: np.ndarray
    major: np.ndarray
    electrical_minor: np.ndarray
    electrical_major: np.ndarray

    @property
    def valid_minor(self) -> np.ndarray:
        return ~np.isnan(self.minor)

    @property
    def valid_major(self) -> np.ndarray:
        return ~np.isnan(self.major)


def pulse_compress(
    per_sector, mf: MatchedFilter, sys: SystemConfig, env: Environment
) -> CompressedPing:
    """Correlate each sector with the replica and build mean and half signals.

    Each sector is convolved with the conjugated time-reverse of the replica
    and normalized by the replica energy, so feeding the replica itself back
    in yields a peak of exactly 1 + 0j at zero delay.  The output axis is
    shifted by the replica length (and any offset mismatch between data and
    replica) so a point echo's peak lands at its true two-way delay;
    negative-delay correlation ramp-up samples are dropped.
    """
    if len(per_sector) != sys.num_sectors:
        raise ConfigError("expected %d sector channels" % sys.num_sectors)
    rate = mf.replica.sample_rate
    offs = {s.start_index_offset for s in per_sector}
    if any(s.sample_rate != rate for s in per_sector) or len(offs) != 1:
        raise ValueError("sector series must share the replica rate and offset")

    template = np.conj(mf.replica.samples[::-1])
    m = len(mf.replica)
    # full-conv index j corresponds to lag j - (m - 1); add the offset
    # difference between data stream and replica to get true delay samples
    shift = per_sector[0].start_index_offset - mf.replica.start_index_offset
    first = max(0, (m - 1) - shift)
    out_offset = first - (m - 1) + shift

    compressed = []
    for s in per_sector:
        full = fftconvolve(s.samples, template) / mf.l2_norm_sq
        compressed.append(ComplexSeries(full[first:], rate, out_offset))

    n = len(compressed[0])
    stack = np.stack([c.samples for c in compressed])
    mean = ComplexSeries(stack.mean(axis=0), rate, out_offset)

    q = [compressed[i] for i in sys.sector_map]  # quadrant order 1..4
    halves = {
        "fore": 0.5 * (q[2].samples + q[3].samples),
        "aft": 0.5 * (q[0].samples + q[1].samples),
        "star": 0.5 * (q[0].samples + q[3].samples),
        "port": 0.5 * (q[1].samples + q[2].samples),
    }

    delay = (np.arange(n) + out_offset) / rate
    range_axis = 0.5 * env.sound_speed * delay

    return CompressedPing(
        per_sector=tuple(compressed),
        mean=mean,
        fore=ComplexSeries(halves["fore"], rate, out_offset),
        aft=ComplexSeries(halves["aft"], rate, out_offset),
        star=ComplexSeries(halves["star"], rate, out_offset),
        port=ComplexSeries(halves["port"], rate, out_offset),
        range_axis=range_axis,
    )


def estimate_angles(cp: CompressedPing, sys: SystemConfig) -> AngleSeries:
    """Split-aperture angles from the half-signal phase differences.

    The electrical angles are fore*conj(aft) and star*conj(port); physical
    angles follow from arcsin(phase / sensitivity).  Samples whose scaled
    phase magnitude exceeds 1 are flagged NaN rather than clamped.
    """
    y_minor = cp.fore.samples * np.conj(cp.aft.samples)
    y_major = cp.star.samples * np.conj(cp.port.samples)

    def angles(y, sensitivity):
        ratio = np.arctan2(y.imag, y.real) / sensitivity
        out = np.full(ratio.shape, np.nan)
        ok = np.abs(ratio) <= 1.0
        out[ok] = np.arcsin(ratio[ok])
        return out

    return AngleSeries(
        minor=angles(y_minor, sys.angle_sensitivity_minor),
        major=angles(y_major, sys.angle_sensitivity_major),
        electrical_minor=y_minor,
        electrical_major=y_major,
    )


def power_scale(sys: SystemConfig) -> float:
    """Multiplier taking |sample|^2 of the sector-mean signal to W in a
    matched receiver load."""
    ratio = abs(sys.z_receiver + sys.z_transducer) / abs(sys.z_receiver)
    return sys.num_sectors * ratio**2 / (8.0 * abs(sys.z_transducer))


def received_power(y: ComplexSeries, sys: SystemConfig) -> np.ndarray:
    """Received electric power per sample, W, assuming a matched load."""
    return power_scale(sys) * np.abs(y.samples) ** 2
