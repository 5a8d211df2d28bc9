"""Transmit chirp generation and matched-filter construction.

The matched filter replica is the normalized ideal transmit signal pushed
through the same filter/decimation stages as the received data, so the two
share group delay and spectral shaping exactly and pulse compression lags
map directly to echo delay.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import windows

from .core import ComplexSeries, PingDefinition
from .frontend import apply_filter_stages

__all__ = [
    "generate_lfm",
    "normalize_transmit",
    "MatchedFilter",
    "build_matched_filter",
]


def generate_lfm(defn: PingDefinition) -> ComplexSeries:
    """Complex baseband linear chirp at the ADC rate.

    Instantaneous absolute frequency sweeps f_start -> f_stop over the
    nominal duration; at baseband that is a symmetric sweep about zero.
    The envelope is rectangular with raised-cosine ramps spanning
    ``taper_fraction`` of the duration at each end (a Tukey window), so
    ``taper_fraction = 0.5`` is a full Hann envelope.
    """
    n = round(defn.duration * defn.adc_rate)
    if n < 2:
        raise ValueError("chirp must span at least 2 samples")
    t = np.arange(n) / defn.adc_rate
    f0 = defn.f_start - defn.centre_frequency
    sweep_rate = (defn.f_stop - defn.f_start) / defn.duration
    phase = 2.0 * np.pi * (f0 * t + 0.5 * sweep_rate * t * t)
    envelope = windows.tukey(n, alpha=2.0 * defn.taper_fraction, sym=True)
    return ComplexSeries(envelope * np.exp(1j * phase), defn.adc_rate, 0)


def normalize_transmit(y_tx: ComplexSeries) -> ComplexSeries:
    """Scale so the peak magnitude is exactly 1."""
    peak = np.max(np.abs(y_tx.samples)) if len(y_tx) else 0.0
    if peak == 0.0:
        raise ValueError("cannot normalize an all-zero signal")
    return ComplexSeries(y_tx.samples / peak, y_tx.sample_rate, y_tx.start_index_offset)


@dataclass(frozen=True)
class MatchedFilter:
    """Replica, its energy, its unit-peak autocorrelation, and the
    effective pulse duration.

    ``autocorr`` stores lag k at array index ``k - autocorr.start_index_offset``;
    the zero-lag sample (value exactly 1) sits at index ``-start_index_offset``.
    """

    replica: ComplexSeries
    l2_norm_sq: float
    autocorr: ComplexSeries
    effective_duration: float
    nominal_duration: float

    @property
    def zero_lag_index(self) -> int:
        return -self.autocorr.start_index_offset


def build_matched_filter(y_tx_norm: ComplexSeries, plan) -> MatchedFilter:
    """Build the replica through the receive stages and derive its
    autocorrelation and effective duration.

    ``plan`` is the sequence of filter stages used on received data (it may
    be empty, leaving the replica at the input rate).  The autocorrelation
    is the replica correlated with itself over all lags, normalized by the
    replica energy so the zero-lag value is exactly 1.  The effective
    duration integrates the squared autocorrelation magnitude over a window
    of twice the nominal pulse duration centred on the peak, divided by the
    peak value and the decimated rate.
    """
    stages = tuple(getattr(plan, "stages", plan))
    out, off, total = apply_filter_stages(
        y_tx_norm.samples, y_tx_norm.start_index_offset, stages
    )
    rate = y_tx_norm.sample_rate / total
    replica = ComplexSeries(out, rate, int(round(off)))

    energy = float(np.sum(np.abs(out) ** 2))
    if energy == 0.0:
        raise RuntimeError("matched filter replica has zero energy")

    m = len(out)
    auto = np.correlate(out, out, mode="full") / energy
    zero_lag = m - 1
    autocorr = ComplexSeries(auto, rate, -zero_lag)

    power = np.abs(auto) ** 2
    nominal = len(y_tx_norm) / y_tx_norm.sample_rate
    half = round(nominal * rate)
    lo = max(0, zero_lag - half)
    hi = min(power.size, zero_lag + half + 1)
    tau_eff = float(np.sum(power[lo:hi]) / (np.max(power) * rate))

    return MatchedFilter(
        replica=replica,
        l2_norm_sq=energy,
        autocorr=autocorr,
        effective_duration=tau_eff,
        nominal_duration=nominal,
    )
