"""On-disk ping container and JSON codecs for the configuration records.

Layout (all little-endian):

    magic  "BBEC"                       4 bytes
    version                             u16   (currently 1)
    header length                       u32
    header                              UTF-8 JSON (ping definition, system
                                        config, environment, format info)
    ping count                          u32
    per ping:
        sector count                    u32
        samples per sector              u32
        sample rate (Hz)                f64
        start index offset              i64
        sector-major interleaved I/Q    float32 * (sectors * samples * 2)

Block lengths are self-describing, and a write -> read round trip is
bit-exact (sample data is stored as float32 pairs).
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass

import numpy as np

from .core import (
    ComplexSeries,
    Environment,
    FilterStage,
    FrequencyTable,
    PingDefinition,
    SystemConfig,
)

__all__ = [
    "FileFormatError",
    "PingRecord",
    "write_ping_file",
    "read_ping_file",
    "ping_definition_to_dict",
    "ping_definition_from_dict",
    "system_config_to_dict",
    "system_config_from_dict",
    "environment_to_dict",
    "environment_from_dict",
]

MAGIC = b"BBEC"
VERSION = 1


class FileFormatError(ValueError):
    """Raised when a ping file does not conform to the container layout."""


@dataclass(frozen=True)
class PingRecord:
    """One ping: per-sector decimated sample series."""

    sectors: tuple

    @property
    def num_sectors(self) -> int:
        return len(self.sectors)


# ---------------------------------------------------------------------------
# JSON codecs


def _complex_to_json(z):
    return [float(np.real(z)), float(np.imag(z))]


def _table_to_json(t: FrequencyTable):
    return {"frequencies_hz": t.frequencies.tolist(), "values": t.values.tolist()}


def _table_from_json(d) -> FrequencyTable:
    return FrequencyTable(np.asarray(d["frequencies_hz"]), np.asarray(d["values"]))


def ping_definition_to_dict(defn: PingDefinition) -> dict:
    return {
        "f_start_hz": defn.f_start,
        "f_stop_hz": defn.f_stop,
        "duration_s": defn.duration,
        "transmit_power_w": defn.transmit_power,
        "adc_rate_hz": defn.adc_rate,
        "taper_fraction": defn.taper_fraction,
        "filter_plan": [
            {
                "coefficients_re": st.coefficients.real.tolist(),
                "coefficients_im": st.coefficients.imag.tolist(),
                "decimation": st.decimation,
            }
            for st in defn.filter_plan
        ],
    }


def ping_definition_from_dict(d: dict) -> PingDefinition:
    stages = tuple(
        FilterStage(
            np.asarray(st["coefficients_re"]) + 1j * np.asarray(st["coefficients_im"]),
            st["decimation"],
        )
        for st in d.get("filter_plan", [])
    )
    return PingDefinition(
        f_start=d["f_start_hz"],
        f_stop=d["f_stop_hz"],
        duration=d["duration_s"],
        transmit_power=d["transmit_power_w"],
        adc_rate=d["adc_rate_hz"],
        taper_fraction=d.get("taper_fraction", 0.01),
        filter_plan=stages,
    )


def system_config_to_dict(sys_: SystemConfig) -> dict:
    return {
        "num_sectors": sys_.num_sectors,
        "z_receiver_ohm": _complex_to_json(sys_.z_receiver),
        "z_transducer_ohm": _complex_to_json(sys_.z_transducer),
        "angle_sensitivity_minor": sys_.angle_sensitivity_minor,
        "angle_sensitivity_major": sys_.angle_sensitivity_major,
        "gain_table": _table_to_json(sys_.gain_table),
        "psi_nominal_sr": sys_.psi_nominal,
        "f_nominal_hz": sys_.f_nominal,
        "beamwidth_minor_rad": sys_.beamwidth_minor,
        "beamwidth_major_rad": sys_.beamwidth_major,
        "sector_map": list(sys_.sector_map),
    }


def system_config_from_dict(d: dict) -> SystemConfig:
    zr = d["z_receiver_ohm"]
    zt = d["z_transducer_ohm"]
    return SystemConfig(
        num_sectors=d.get("num_sectors", 4),
        z_receiver=complex(zr[0], zr[1]),
        z_transducer=complex(zt[0], zt[1]),
        angle_sensitivity_minor=d["angle_sensitivity_minor"],
        angle_sensitivity_major=d["angle_sensitivity_major"],
        gain_table=_table_from_json(d["gain_table"]),
        psi_nominal=d["psi_nominal_sr"],
        f_nominal=d["f_nominal_hz"],
        beamwidth_minor=d["beamwidth_minor_rad"],
        beamwidth_major=d["beamwidth_major_rad"],
        sector_map=tuple(d.get("sector_map", (0, 1, 2, 3))),
    )


def environment_to_dict(env: Environment) -> dict:
    return {
        "sound_speed_m_s": env.sound_speed,
        "absorption_table_db_m": _table_to_json(env.absorption_table),
        "reference_range_m": env.reference_range,
    }


def environment_from_dict(d: dict) -> Environment:
    return Environment(
        sound_speed=d["sound_speed_m_s"],
        absorption_table=_table_from_json(d["absorption_table_db_m"]),
        reference_range=d.get("reference_range_m", 1.0),
    )


# ---------------------------------------------------------------------------
# Binary container


def write_ping_file(path, defn, sys_, env, pings) -> None:
    """Write header and ping blocks; the file appears atomically.

    ``pings`` is a sequence of PingRecord or of per-sector ComplexSeries
    sequences.  All pings must have consistent sector counts.
    """
    records = []
    for p in pings:
        sectors = tuple(p.sectors if isinstance(p, PingRecord) else p)
        records.append(sectors)
    counts = {len(r) for r in records}
    if len(counts) > 1:
        raise ValueError("inconsistent sector counts across pings")

    header = json.dumps(
        {
            "format": "echochain-ping-container",
            "version": VERSION,
            "ping_definition": ping_definition_to_dict(defn),
            "system_config": system_config_to_dict(sys_),
            "environment": environment_to_dict(env),
        },
        sort_keys=True,
    ).encode("utf-8")

    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<HI", VERSION, len(header)))
            fh.write(header)
            fh.write(struct.pack("<I", len(records)))
            for sectors in records:
                n = len(sectors[0]) if sectors else 0
                if any(len(s) != n for s in sectors):
                    raise ValueError("sector lengths differ within a ping")
                rate = sectors[0].sample_rate if sectors else 0.0
                off = sectors[0].start_index_offset if sectors else 0
                fh.write(struct.pack("<IIdq", len(sectors), n, rate, off))
                for s in sectors:
                    iq = np.empty(2 * n, dtype="<f4")
                    iq[0::2] = s.samples.real
                    iq[1::2] = s.samples.imag
                    fh.write(iq.tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_exact(fh, n, what):
    buf = fh.read(n)
    if len(buf) != n:
        raise FileFormatError(f"truncated file while reading {what}")
    return buf


def read_ping_file(path):
    """Read a ping container; returns (definition, system, environment, pings)."""
    with open(path, "rb") as fh:
        if _read_exact(fh, 4, "magic") != MAGIC:
            raise FileFormatError("bad magic; not an echochain ping container")
        version, hlen = struct.unpack("<HI", _read_exact(fh, 6, "header sizes"))
        if version != VERSION:
            raise FileFormatError(f"unsupported container version {version}")
        try:
            header = json.loads(_read_exact(fh, hlen, "header").decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FileFormatError(f"malformed header: {exc}") from exc
        defn = ping_definition_from_dict(header["ping_definition"])
        sys_ = system_config_from_dict(header["system_config"])
        env = environment_from_dict(header["environment"])

        (n_pings,) = struct.unpack("<I", _read_exact(fh, 4, "ping count"))
        pings = []
        for _ in range(n_pings):
            n_sec, n_samp, rate, off = struct.unpack(
                "<IIdq", _read_exact(fh, 24, "ping block header")
            )
            sectors = []
            for _ in range(n_sec):
                raw = np.frombuffer(
                    _read_exact(fh, 8 * n_samp, "sample data"), dtype="<f4"
                )
                samples = raw[0::2].astype(np.float64) + 1j * raw[1::2].astype(np.float64)
                sectors.append(ComplexSeries(samples, rate, off))
            pings.append(PingRecord(tuple(sectors)))
        if fh.read(1):
            raise FileFormatError("trailing bytes after final ping block")
    return defn, sys_, env, pings
