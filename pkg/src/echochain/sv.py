"""Volume backscattering strength: band-compressed per-sample Sv and the
sliding-window frequency-resolved Sv spectrogram.

Spherical spreading is compensated in amplitude before the sliding DFT (the
window can span a range interval over which r^2 changes appreciably);
absorption, which varies slowly across a window, is applied per frequency
bin afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    Environment,
    PingDefinition,
    SystemConfig,
    dft_frequency_grid,
    interp_table,
)
from .beamproc import CompressedPing, power_scale, received_power
from .ts import SPECTRUM_FLOOR
from .waveform import MatchedFilter

__all__ = [
    "psi_scaled",
    "sv_samples",
    "hann_normalized",
    "SvSpectrogram",
    "sv_spectrum",
]


def psi_scaled(sys: SystemConfig, f) -> np.ndarray:
    """Two-way equivalent beam angle at frequency f, sr.

    Scales the empirical value at the nominal frequency by (f_n / f)^2.
    """
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0):
        raise ValueError("frequency must be positive")
    out = sys.psi_nominal * (sys.f_nominal / f) ** 2
    return float(out) if out.ndim == 0 else out


def sv_samples(
    cp: CompressedPing,
    mf: MatchedFilter,
    sys: SystemConfig,
    env: Environment,
    defn: PingDefinition,
) -> np.ndarray:
    """Per-sample volume backscattering strength Sv(n), dB re 1 m^-1,
    compressed over the operating band.

    The reference volume uses the effective pulse duration of the
    compressed pulse and the equivalent beam angle at f_c.  Zero-power or
    zero-range samples come out as -inf.
    """
    f_c = defn.centre_frequency
    lam = env.sound_speed / f_c
    alpha = float(interp_table(env.absorption_table, f_c))
    g0 = float(interp_table(sys.gain_table, f_c))
    sys_term = 10.0 * math.log10(
        defn.transmit_power
        * lam**2
        * env.sound_speed
        * mf.effective_duration
        * psi_scaled(sys, f_c)
        * g0**2
        / (32.0 * math.pi**2)
    )
    p = received_power(cp.mean, sys)
    r = cp.range_axis
    with np.errstate(divide="ignore", invalid="ignore"):
        sv = 10.0 * np.log10(p) + 20.0 * np.log10(r) + 2.0 * alpha * r - sys_term
    sv[r <= 0] = -np.inf
    return sv


def hann_normalized(n_w: int) -> np.ndarray:
    """Hann window of length ``n_w`` scaled so the sum of squares is n_w."""
    i = np.arange(n_w)
    w = 0.5 - 0.5 * np.cos(2.0 * np.pi * i / n_w)
    return w / (np.linalg.norm(w) / math.sqrt(n_w))


@dataclass(frozen=True)
class SvSpectrogram:
    """Sliding-window Sv(m): one row per window centre, one column per
    retained frequency bin."""

    centers: np.ndarray
    ranges: np.ndarray
    frequencies: np.ndarray
    sv: np.ndarray
    window_duration: float
    hop: int


def sv_spectrum(
    cp: CompressedPing,
    mf: MatchedFilter,
    sys: SystemConfig,
    env: Environment,
    defn: PingDefinition,
    n_w: int,
    hop: int,
) -> SvSpectrogram:
    """Frequency-resolved Sv via a sliding normalized Hann window.

    Per window: the spreading-compensated mean signal is windowed and
    DFT'd, normalized bin-wise by the DFT of the full matched-filter
    autocorrelation (zero-padded to the window length), converted to power
    and to Sv with per-bin wavelength, absorption, gain, and equivalent
    beam angle.  The window range is the geometric mean of the edge ranges.
    Windows that would extend past the data (or into non-positive range)
    are skipped rather than zero-padded.
    """
    n_w = int(n_w)
    if n_w < 2 or (n_w & (n_w - 1)) != 0:
        raise ValueError("n_w must be a power of 2")
    if n_w < 2 * defn.duration * cp.sample_rate:
        raise ValueError("n_w must span at least twice the pulse duration")
    if hop < 1:
        raise ValueError("hop must be >= 1")

    rate = cp.sample_rate
    r = cp.range_axis
    spread_comp = cp.mean.samples * r
    window = hann_normalized(n_w)

    # Autocorrelation spectrum on the same grid.  If the support exceeds
    # n_w, keep the n_w lags centred on the peak.
    auto = mf.autocorr.samples
    zero = mf.zero_lag_index
    lo = max(0, zero - n_w // 2)
    hi = min(auto.size, zero + n_w // 2)
    spec_a = np.fft.fftshift(np.fft.fft(auto[lo:hi], n_w))

    freqs_all = dft_frequency_grid(n_w, rate, defn.centre_frequency)
    keep = np.abs(spec_a) >= SPECTRUM_FLOOR * np.max(np.abs(spec_a))
    freqs = freqs_all[keep]
    spec_a = spec_a[keep]

    lam = env.sound_speed / freqs
    alpha = interp_table(env.absorption_table, freqs)
    g0 = interp_table(sys.gain_table, freqs)
    tau_slide = n_w / rate
    sys_term = 10.0 * np.log10(
        defn.transmit_power
        * lam**2
        * env.sound_speed
        * tau_slide
        * psi_scaled(sys, freqs)
        * g0**2
        / (32.0 * math.pi**2)
    )

    half = n_w // 2
    first_positive = int(np.searchsorted(r, 0.0, side="right"))
    start = first_positive + half
    centers = np.arange(start, len(cp) - half + 1, hop, dtype=int)

    scale = power_scale(sys)
    rows = np.empty((centers.size, freqs.size))
    ranges = np.empty(centers.size)
    for i, c in enumerate(centers):
        seg = spread_comp[c - half : c + half] * window
        spec = np.fft.fftshift(np.fft.fft(seg))[keep]
        power = scale * np.abs(spec / spec_a) ** 2
        r_c = math.sqrt(r[c - half] * r[c + half - 1])
        ranges[i] = r_c
        with np.errstate(divide="ignore"):
            rows[i] = 10.0 * np.log10(power) + 2.0 * alpha * r_c - sys_term

    return SvSpectrogram(
        centers=centers,
        ranges=ranges,
        frequencies=freqs,
        sv=rows,
        window_duration=tau_slide,
        hop=int(hop),
    )
