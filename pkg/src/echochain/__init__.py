"""echochain: broadband split-beam echosounder processing and simulation.

Turns per-sector broadband (linear chirp) echosounder samples into
calibrated frequency-dependent target strength and volume backscattering
strength, and synthesizes ground-truth pings for round-trip verification.
"""

from .core import (
    ComplexSeries,
    ConfigError,
    Environment,
    FilterStage,
    FrequencyTable,
    PingDefinition,
    SystemConfig,
    beam_gain,
    dft_frequency_grid,
    from_db,
    interp_table,
    to_db,
)
from .frontend import DecimationPlan, design_plan, filter_decimate
from .waveform import MatchedFilter, build_matched_filter, generate_lfm, normalize_transmit
from .beamproc import (
    AngleSeries,
    CompressedPing,
    estimate_angles,
    pulse_compress,
    received_power,
)
from .ts import (
    DetectionParams,
    SingleTargetDetection,
    TsSpectrum,
    detect_single_targets,
    point_scattering_strength,
    ts_spectrum,
)
from .sv import SvSpectrogram, hann_normalized, psi_scaled, sv_samples, sv_spectrum
from .simulator import PointTarget, Scene, VolumeField, synthesize_ping
from .pingfile import FileFormatError, PingRecord, read_ping_file, write_ping_file

__version__ = "0.1.0"

__all__ = [
    "ComplexSeries",
    "ConfigError",
    "Environment",
    "FilterStage",
    "FrequencyTable",
    "PingDefinition",
    "SystemConfig",
    "beam_gain",
    "dft_frequency_grid",
    "from_db",
    "interp_table",
    "to_db",
    "DecimationPlan",
    "design_plan",
    "filter_decimate",
    "MatchedFilter",
    "build_matched_filter",
    "generate_lfm",
    "normalize_transmit",
    "AngleSeries",
    "CompressedPing",
    "estimate_angles",
    "pulse_compress",
    "received_power",
    "DetectionParams",
    "SingleTargetDetection",
    "TsSpectrum",
    "detect_single_targets",
    "point_scattering_strength",
    "ts_spectrum",
    "SvSpectrogram",
    "hann_normalized",
    "psi_scaled",
    "sv_samples",
    "sv_spectrum",
    "PointTarget",
    "Scene",
    "VolumeField",
    "synthesize_ping",
    "FileFormatError",
    "PingRecord",
    "read_ping_file",
    "write_ping_file",
]
