"""Single-target processing: point scattering strength, detection, and the
calibrated frequency-dependent target strength spectrum.

The spectrum normalizes the DFT of the extracted target window by the DFT
of a matching slice of the matched-filter autocorrelation, which removes
the transmit spectrum and compression response bin by bin and leaves the
target's own response (times the system's calibration terms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .core import (
    ComplexSeries,
    Environment,
    PingDefinition,
    SystemConfig,
    beam_gain,
    dft_frequency_grid,
    interp_table,
)
from .beamproc import AngleSeries, CompressedPing, power_scale, received_power
from .waveform import MatchedFilter

__all__ = [
    "DetectionParams",
    "SingleTargetDetection",
    "TsSpectrum",
    "point_scattering_strength",
    "detect_single_targets",
    "ts_spectrum",
]

# Relative magnitude below which autocorrelation-spectrum bins are treated
# as out of band and excluded from the normalized ratio.
SPECTRUM_FLOOR = 1e-6


def point_scattering_strength(
    cp: CompressedPing, sys: SystemConfig, env: Environment, defn: PingDefinition
) -> np.ndarray:
    """Per-sample point scattering strength Sp(n), dB re 1 m^2.

    Range compensation is 40 log10 r plus two-way absorption at the centre
    frequency; the system term uses the on-axis gain at f_c.  Samples at
    zero range come out as -inf.
    """
    f_c = defn.centre_frequency
    lam = env.sound_speed / f_c
    alpha = float(interp_table(env.absorption_table, f_c))
    g0 = float(interp_table(sys.gain_table, f_c))
    sys_term = 10.0 * math.log10(
        defn.transmit_power * lam**2 * g0**2 / (16.0 * math.pi**2)
    )
    p = received_power(cp.mean, sys)
    r = cp.range_axis
    with np.errstate(divide="ignore", invalid="ignore"):
        sp = 10.0 * np.log10(p) + 40.0 * np.log10(r) + 2.0 * alpha * r - sys_term
    sp[r <= 0] = -np.inf
    return sp


@dataclass(frozen=True)
class DetectionParams:
    """Single-target detector settings.

    ``max_angle_std`` bounds the standard deviation of each angle series
    across the -6 dB extent of a candidate peak; ``max_half_window`` caps
    the extracted window at the matched-filter autocorrelation half-support
    (pass ``(len(mf.autocorr) - 1) // 2``).
    """

    threshold_db: float
    min_separation: int = 16
    max_angle_std: float = 0.1
    window_stop_db: float = 18.0
    extent_db: float = 6.0
    max_half_window: int | None = None


@dataclass(frozen=True)
class SingleTargetDetection:
    peak_sample: int
    range: float
    bearing: tuple
    window: ComplexSeries
    samples_before: int
    samples_after: int


def _extent(sp, peak, drop_db, cap):
    """Samples to keep on each side of ``peak`` before Sp falls ``drop_db``
    below the peak value, each side capped at ``cap``."""
    level = sp[peak] - drop_db
    before = 0
    while peak - before - 1 >= 0 and sp[peak - before - 1] > level and before < cap:
        before += 1
    after = 0
    while peak + after + 1 < sp.size and sp[peak + after + 1] > level and after < cap:
        after += 1
    return before, after


def detect_single_targets(
    cp: CompressedPing,
    sp: np.ndarray,
    angles: AngleSeries,
    params: DetectionParams,
) -> list:
    """Locate isolated single-target echoes.

    Candidates are local maxima of Sp above the threshold separated by at
    least ``min_separation`` samples; a candidate is accepted when both
    angle series are defined and steady (std below ``max_angle_std``)
    across its -6 dB extent.  The extracted window runs to the -18 dB
    points, at least one sample and at most the autocorrelation
    half-support on each side.
    """
    clean = np.where(np.isfinite(sp), sp, -1e30)
    peaks, _ = find_peaks(
        clean, height=params.threshold_db, distance=max(1, params.min_separation)
    )
    cap = params.max_half_window if params.max_half_window is not None else sp.size
    detections = []
    for k in peaks:
        eb, ea = _extent(clean, k, params.extent_db, cap)
        span = slice(k - eb, k + ea + 1)
        th = angles.minor[span]
        ph = angles.major[span]
        if np.any(np.isnan(th)) or np.any(np.isnan(ph)):
            continue
        if np.std(th) > params.max_angle_std or np.std(ph) > params.max_angle_std:
            continue
        wb, wa = _extent(clean, k, params.window_stop_db, cap)
        wb, wa = max(1, wb), max(1, wa)
        window = ComplexSeries(
            cp.mean.samples[k - wb : k + wa + 1],
            cp.mean.sample_rate,
            cp.mean.start_index_offset + (k - wb),
        )
        detections.append(
            SingleTargetDetection(
                peak_sample=int(k),
                range=float(cp.range_axis[k]),
                bearing=(float(angles.minor[k]), float(angles.major[k])),
                window=window,
                samples_before=wb,
                samples_after=wa,
            )
        )
    return detections


@dataclass(frozen=True)
class TsSpectrum:
    """Calibrated TS per retained frequency bin."""

    frequencies: np.ndarray
    ts: np.ndarray
    power: np.ndarray


def ts_spectrum(
    det: SingleTargetDetection,
    mf: MatchedFilter,
    sys: SystemConfig,
    env: Environment,
    defn: PingDefinition,
    n_dft: int,
) -> TsSpectrum:
    """Frequency-dependent target strength for one detection.

    A slice of the matched-filter autocorrelation matching the target
    window (same samples before/after the peak, never more than the full
    support) normalizes the window's DFT bin by bin.  Bins outside the
    transmit band, or where the autocorrelation spectrum is below
    ``SPECTRUM_FLOOR`` of its maximum, are excluded.
    """
    window = det.window.samples
    if n_dft < window.size:
        raise ValueError("n_dft must cover the target window")

    zero = mf.zero_lag_index
    auto = mf.autocorr.samples
    nb = min(det.samples_before, zero)
    na = min(det.samples_after, auto.size - 1 - zero)
    auto_red = auto[zero - nb : zero + na + 1]

    spec_t = np.fft.fftshift(np.fft.fft(window, n_dft))
    spec_a = np.fft.fftshift(np.fft.fft(auto_red, n_dft))
    rate = mf.replica.sample_rate
    freqs = dft_frequency_grid(n_dft, rate, defn.centre_frequency)

    keep = np.abs(spec_a) >= SPECTRUM_FLOOR * np.max(np.abs(spec_a))
    keep &= (freqs >= defn.f_start) & (freqs <= defn.f_stop)
    freqs = freqs[keep]
    ratio = np.abs(spec_t[keep] / spec_a[keep])

    power = power_scale(sys) * ratio**2

    theta, phi = det.bearing
    lam = env.sound_speed / freqs
    alpha = interp_table(env.absorption_table, freqs)
    gain = interp_table(sys.gain_table, freqs) * beam_gain(sys, theta, phi, freqs)
    with np.errstate(divide="ignore"):
        ts = (
            10.0 * np.log10(power)
            + 40.0 * math.log10(det.range)
            + 2.0 * alpha * det.range
            - 10.0 * np.log10(defn.transmit_power * lam**2 * gain**2 / (16.0 * np.pi**2))
        )
    return TsSpectrum(frequencies=freqs, ts=ts, power=power)
