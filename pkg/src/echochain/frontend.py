"""Receive-side multirate chain: stage filter design and filter+decimate.

Each stage convolves with a linear-phase FIR lowpass and keeps every D-th
sample (first retained sample is index 0 of the stage's full convolution
output).  Group delay is folded into the series' ``start_index_offset`` so
downstream alignment stays exact; plans built by :func:`design_plan` choose
tap counts that keep every accumulated offset an integer number of output
samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import signal

from .core import ComplexSeries, ConfigError, FilterStage, PingDefinition

__all__ = ["DecimationPlan", "design_plan", "filter_decimate", "apply_filter_stages"]

# Kaiser design target.  A Hamming windowed sinc tops out near 53 dB of
# stopband rejection, short of the 60 dB suppression the chain must deliver.
_STOP_ATTEN_DB = 65.0


@dataclass(frozen=True)
class DecimationPlan:
    """Filter/decimation stages taking ``input_rate`` to ``output_rate``.

    ``passband_edge`` / ``stopband_edge`` are baseband frequencies (Hz)
    bounding the designed transition region: magnitude response is flat to
    within the ripple spec below the former and down >= 60 dB above the
    latter.
    """

    stages: tuple
    input_rate: float
    output_rate: float
    passband_edge: float = 0.0
    stopband_edge: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        prod = 1
        for st in self.stages:
            prod *= st.decimation
        if self.output_rate != self.input_rate / prod:
            raise ConfigError("output_rate inconsistent with stage decimations")

    @property
    def total_decimation(self) -> int:
        prod = 1
        for st in self.stages:
            prod *= st.decimation
        return prod


def _split_factors(total: int) -> list:
    """Split a decimation product into one or two stage factors."""
    if total <= 3:
        return [total]
    for p in range(2, int(total**0.5) + 1):
        if total % p == 0:
            return [total // p, p]
    return [total]  # prime: single stage


def _design_stage(rate_in, decimation, pass_edge, stop_edge, tail_product):
    """Kaiser windowed-sinc lowpass for one stage.

    Tap count is rounded up so the group delay (numtaps-1)/2 is a multiple
    of ``tail_product`` (this stage's decimation times all later ones),
    keeping the accumulated start_index_offset integral.
    """
    transition = stop_edge - pass_edge
    if transition <= 0:
        raise ConfigError("no transition band available; rate factor too tight")
    numtaps, beta = signal.kaiserord(_STOP_ATTEN_DB, transition / (rate_in / 2.0))
    half = int(np.ceil((numtaps - 1) / 2 / tail_product)) * tail_product
    numtaps = 2 * half + 1
    taps = signal.firwin(
        numtaps,
        0.5 * (pass_edge + stop_edge),
        window=("kaiser", beta),
        fs=rate_in,
    )
    return FilterStage(taps.astype(np.complex128), decimation)


def design_plan(defn: PingDefinition, target_rate_factor: float) -> DecimationPlan:
    """Design the stage cascade for a ping definition.

    Decimation is the largest integer product keeping the output rate at or
    above ``target_rate_factor`` times the chirp bandwidth; one stage for
    small products, two for composite ones.  Filters are windowed-sinc
    (Kaiser) lowpass at baseband, >= 60 dB stopband, <= 0.5 dB passband
    ripple over the chirp band.
    """
    if target_rate_factor < 1.1:
        raise ValueError("target_rate_factor must be >= 1.1")
    f_s = defn.adc_rate
    bw = defn.bandwidth
    min_rate = target_rate_factor * bw
    if f_s < min_rate:
        raise ConfigError("ADC rate below the requested output rate")
    total = int(f_s // min_rate)
    factors = _split_factors(total)
    f_out = f_s / total

    pass_edge = 0.51 * bw if bw > 0 else 0.05 * f_out
    stages = []
    rate = f_s
    remaining = total
    stop_edge = pass_edge
    for d in factors:
        rate_next = rate / d
        if d == 1:
            # Pure noise-suppression filter; no aliasing to protect against.
            stop_edge = pass_edge + 0.5 * max(bw, 0.1 * f_out)
        else:
            stop_edge = rate_next - 0.5 * f_out
        stages.append(_design_stage(rate, d, pass_edge, stop_edge, remaining))
        rate = rate_next
        remaining //= d

    return DecimationPlan(
        stages=tuple(stages),
        input_rate=f_s,
        output_rate=f_out,
        passband_edge=pass_edge,
        stopband_edge=stop_edge,
    )


def apply_filter_stages(samples, offset, stages):
    """Run Eq.-style stage cascade on raw samples.

    Returns (filtered samples, new offset as Fraction, total decimation).
    Offset accounting: full convolution with a length-L linear-phase filter
    delays content by (L-1)/2 input samples; keeping indices 0, D, 2D ...
    maps offset o to (o - (L-1)/2) / D at the lower rate.
    """
    out = np.asarray(samples, dtype=np.complex128)
    off = Fraction(int(offset))
    total = 1
    for st in stages:
        out = np.convolve(out, st.coefficients)
        off = (off - Fraction(len(st.coefficients) - 1, 2)) / st.decimation
        out = out[:: st.decimation]
        total *= st.decimation
    return out, off, total


def filter_decimate(y: ComplexSeries, plan: DecimationPlan) -> ComplexSeries:
    """Filter and decimate a raw series through every stage of the plan.

    Offsets from plans built by :func:`design_plan` are exact integers; for
    hand-built plans with incommensurate group delays the offset is rounded
    to the nearest output sample.
    """
    if y.sample_rate != plan.input_rate:
        raise ValueError("series rate does not match plan input rate")
    out, off, _ = apply_filter_stages(y.samples, y.start_index_offset, plan.stages)
    return ComplexSeries(out, plan.output_rate, int(round(off)))
