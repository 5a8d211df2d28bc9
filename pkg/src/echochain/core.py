"""Shared domain types for the broadband echosounder processing chain.

Everything downstream (waveform generation, the receive chain, pulse
compression, TS and Sv estimation, the simulator) works on complex baseband
sample series and a small set of configuration records defined here.

Conventions fixed by this module:

* All signals are complex baseband about the chirp centre frequency
  ``f_c = (f_start + f_stop) / 2``.  The implied demodulator is
  ``exp(-j 2 pi f_c t)`` applied to the real ADC stream, so positive
  baseband frequency means "above f_c".
* Power quantities are W (dB re 1 W), target strength dB re 1 m^2,
  volume backscattering strength dB re 1 m^-1.
* Calibration curves (gain, absorption) are supplied as sampled tables and
  evaluated by clamped linear interpolation; no built-in absorption model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConfigError",
    "FrequencyTable",
    "ComplexSeries",
    "FilterStage",
    "PingDefinition",
    "SystemConfig",
    "Environment",
    "to_db",
    "from_db",
    "interp_table",
    "dft_frequency_grid",
    "beam_gain",
]


class ConfigError(ValueError):
    """Raised for invalid or inconsistent configuration values."""


def to_db(x):
    """Linear power-like quantity to dB.  Zero maps to -inf."""
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(x)


def from_db(db):
    """dB to linear power-like quantity."""
    return np.power(10.0, np.asarray(db) / 10.0)


@dataclass(frozen=True)
class FrequencyTable:
    """Sampled function of frequency, evaluated by clamped linear interpolation.

    Used for calibration gain g0(f) (linear) and absorption alpha(f) (dB/m).
    A single-point table acts as a constant.
    """

    frequencies: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if f.size == 0:
            raise ConfigError("frequency table needs at least one point")
        if f.shape != v.shape or f.ndim != 1:
            raise ConfigError("frequency table axes must be 1-D and equal length")
        if f.size > 1 and np.any(np.diff(f) <= 0):
            raise ConfigError("frequency table must be strictly ascending")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, value, f_lo=1.0, f_hi=None):
        if f_hi is None:
            return cls(np.array([f_lo]), np.array([float(value)]))
        return cls(np.array([f_lo, f_hi]), np.array([float(value)] * 2))

    def __call__(self, f):
        return np.interp(f, self.frequencies, self.values)


def interp_table(table: FrequencyTable, f):
    """Evaluate a sampled frequency table at ``f`` (clamped at the ends)."""
    return table(f)


@dataclass(frozen=True)
class ComplexSeries:
    """Uniformly sampled complex-valued sequence.

    ``start_index_offset`` is alignment bookkeeping: sample ``k`` of the
    array sits at time ``(k + start_index_offset) / sample_rate`` on the
    shared time axis whose origin is the transmit instant.
    """

    samples: np.ndarray
    sample_rate: float
    start_index_offset: int = 0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.complex128)
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if s.size and not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "start_index_offset", int(self.start_index_offset))

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def times(self) -> np.ndarray:
        """Time of each sample relative to the transmit instant, seconds."""
        n = np.arange(self.samples.size) + self.start_index_offset
        return n / self.sample_rate


@dataclass(frozen=True)
class FilterStage:
    """One filter-and-decimate stage of the receive chain."""

    coefficients: np.ndarray
    decimation: int

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.complex128)
        if c.size < 1:
            raise ConfigError("filter stage needs at least one coefficient")
        if int(self.decimation) < 1:
            raise ConfigError("decimation factor must be >= 1")
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "decimation", int(self.decimation))


@dataclass(frozen=True)
class PingDefinition:
    """Transmit chirp parameters plus the receive filter/decimation plan."""

    f_start: float
    f_stop: float
    duration: float
    transmit_power: float
    adc_rate: float
    taper_fraction: float = 0.01
    filter_plan: tuple = ()

    def __post_init__(self):
        if not (0.0 < self.f_start <= self.f_stop < self.adc_rate / 2.0):
            raise ConfigError("need 0 < f_start <= f_stop < adc_rate/2")
        if self.duration <= 0:
            raise ConfigError("duration must be positive")
        if self.transmit_power <= 0:
            raise ConfigError("transmit_power must be positive")
        if not (0.0 <= self.taper_fraction <= 0.5):
            raise ConfigError("taper_fraction must be in [0, 0.5]")
        object.__setattr__(self, "filter_plan", tuple(self.filter_plan))

    @property
    def centre_frequency(self) -> float:
        return 0.5 * (self.f_start + self.f_stop)

    @property
    def bandwidth(self) -> float:
        return self.f_stop - self.f_start


@dataclass(frozen=True)
class SystemConfig:
    """Transceiver/transducer constants and calibration tables.

    Only four-sector split-aperture systems are supported.  ``sector_map``
    maps quadrant position (aft-star, aft-port, fore-port, fore-star) to the
    data channel index carrying that quadrant, for recordings whose channel
    order differs from the reference layout.
    """

    z_receiver: complex
    z_transducer: complex
    angle_sensitivity_minor: float
    angle_sensitivity_major: float
    gain_table: FrequencyTable
    psi_nominal: float
    f_nominal: float
    beamwidth_minor: float
    beamwidth_major: float
    num_sectors: int = 4
    sector_map: tuple = (0, 1, 2, 3)

    def __post_init__(self):
        if self.num_sectors != 4:
            raise ConfigError("only four-sector systems are supported")
        if abs(self.z_receiver) == 0 or abs(self.z_transducer) == 0:
            raise ConfigError("impedances must be nonzero")
        if np.any(self.gain_table.values <= 0):
            raise ConfigError("gain table must be strictly positive")
        if self.psi_nominal <= 0:
            raise ConfigError("psi_nominal must be positive")
        if self.f_nominal <= 0:
            raise ConfigError("f_nominal must be positive")
        if self.beamwidth_minor <= 0 or self.beamwidth_major <= 0:
            raise ConfigError("beamwidths must be positive")
        if sorted(self.sector_map) != [0, 1, 2, 3]:
            raise ConfigError("sector_map must be a permutation of 0..3")
        object.__setattr__(self, "sector_map", tuple(int(i) for i in self.sector_map))


@dataclass(frozen=True)
class Environment:
    """Water column description: sound speed and absorption."""

    sound_speed: float
    absorption_table: FrequencyTable
    reference_range: float = 1.0

    def __post_init__(self):
        if self.sound_speed <= 0:
            raise ConfigError("sound_speed must be positive")
        if np.any(self.absorption_table.values < 0):
            raise ConfigError("absorption must be non-negative")


def dft_frequency_grid(n_dft: int, f_dec: float, f_c: float) -> np.ndarray:
    """Absolute frequency of each DFT bin, ascending.

    Bin ``m`` of an ``n_dft``-point DFT of complex baseband data carries
    baseband frequency ``fftfreq(n_dft) * f_dec``; this returns the
    fftshift-ordered absolute frequencies ``f_c + [-f_dec/2, f_dec/2)``.
    Align spectra with ``np.fft.fftshift`` before using this grid.
    """
    n_dft = int(n_dft)
    if n_dft < 1 or (n_dft & (n_dft - 1)) != 0:
        raise ValueError("n_dft must be a power of 2")
    if f_dec <= 0:
        raise ValueError("f_dec must be positive")
    return f_c + (np.arange(n_dft) - n_dft // 2) * (f_dec / n_dft)


_HALF_POWER_DB = 10.0 * math.log10(2.0)


def beam_gain(sys: SystemConfig, theta, phi, f) -> np.ndarray:
    """One-way beam pattern value b(theta, phi, f), linear power ratio <= 1.

    Two-axis quadratic model in dB with beamwidths scaled as
    ``bw(f) = bw(f_nominal) * f_nominal / f``; exactly 1 on axis and one
    half-power point per axis at half the beamwidth.  Echo power scales by
    b^2 two-way, so the power-budget gain is ``g0(f) * b(theta, phi, f)``.
    """
    f = np.asarray(f, dtype=float)
    scale = f / sys.f_nominal
    bw_th = sys.beamwidth_minor / scale
    bw_ph = sys.beamwidth_major / scale
    comp_db = _HALF_POWER_DB * (
        (2.0 * theta / bw_th) ** 2 + (2.0 * phi / bw_ph) ** 2
    )
    return np.power(10.0, -comp_db / 10.0)
