"""Command-line interface: simulate scenes and export echograms, angles,
TS spectra, and Sv spectrograms as CSV.

All subcommands are thin shells over the library; outputs are written
atomically (temp file + rename) and CSV numbers always use period decimal
separators regardless of locale.
"""

from __future__ import annotations

import argparse
import json
import os
import sys as _sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import beamproc, frontend, pingfile, simulator, sv as sv_mod, ts as ts_mod
from .core import ConfigError, FrequencyTable
from .waveform import build_matched_filter, generate_lfm, normalize_transmit

__all__ = ["main"]


def _max_workers() -> int:
    raw = os.environ.get("ECHOCHAIN_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        n = min(8, os.cpu_count() or 1)
    return n


def _map_ordered(fn, items):
    items = list(items)
    workers = min(_max_workers(), max(1, len(items)))
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".10g")


def _write_csv(path, columns, rows) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _matched_filter(defn):
    tx = normalize_transmit(generate_lfm(defn))
    return build_matched_filter(tx, defn.filter_plan)


def _compress_record(record, defn, sys_, env, mf):
    sectors = record.sectors
    if sectors and sectors[0].sample_rate == defn.adc_rate and defn.filter_plan:
        plan = frontend.DecimationPlan(
            stages=defn.filter_plan,
            input_rate=defn.adc_rate,
            output_rate=mf.replica.sample_rate,
        )
        sectors = [frontend.filter_decimate(s, plan) for s in sectors]
    return beamproc.pulse_compress(sectors, mf, sys_, env)


# ---------------------------------------------------------------------------
# scene files


def _point_target_from_dict(d) -> simulator.PointTarget:
    if "sigma_bs_m2" in d:
        sigma = float(d["sigma_bs_m2"])
    elif "ts_db" in d:
        sigma = 10.0 ** (float(d["ts_db"]) / 10.0)
    else:
        raise ConfigError("point target needs sigma_bs_m2 or ts_db")
    response = None
    if d.get("response") is not None:
        response = FrequencyTable(
            np.asarray(d["response"]["frequencies_hz"]),
            np.asarray(d["response"]["values"]),
        )
    return simulator.PointTarget(
        range_m=float(d["range_m"]),
        sigma_bs=sigma,
        theta=float(d.get("theta_rad", 0.0)),
        phi=float(d.get("phi_rad", 0.0)),
        response=response,
    )


def _scene_from_dict(d) -> simulator.Scene:
    vf = None
    if d.get("volume_field") is not None:
        v = d["volume_field"]
        vf = simulator.VolumeField(
            density=float(v["density_per_m3"]),
            sigma_bs=float(v["sigma_bs_m2"]),
            range_start=float(v["range_start_m"]),
            range_stop=float(v["range_stop_m"]),
        )
    return simulator.Scene(
        point_targets=tuple(
            _point_target_from_dict(t) for t in d.get("point_targets", ())
        ),
        volume_field=vf,
        noise_power=float(d.get("noise_power_w", 0.0)),
        seed=int(d.get("seed", 0)),
    )


def _load_scene_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    defn = pingfile.ping_definition_from_dict(doc["ping"])
    if not defn.filter_plan:
        factor = float(doc.get("processing", {}).get("target_rate_factor", 1.4))
        plan = frontend.design_plan(defn, factor)
        from dataclasses import replace

        defn = replace(defn, filter_plan=plan.stages)
    sys_ = pingfile.system_config_from_dict(doc["system"])
    env = pingfile.environment_from_dict(doc["environment"])
    scene = _scene_from_dict(doc.get("scene", {}))
    return doc, defn, sys_, env, scene


def _read_input(path):
    defn, sys_, env, pings = pingfile.read_ping_file(path)
    mf = _matched_filter(defn)
    return defn, sys_, env, pings, mf


# ---------------------------------------------------------------------------
# subcommands


def _cmd_simulate(args) -> int:
    doc, defn, sys_, env, scene = _load_scene_file(args.scene)
    mf = _matched_filter(defn)
    num_pings = int(doc.get("num_pings", 1))
    record_range = doc.get("record_range_m")
    domain = doc.get("domain", "decimated")

    from dataclasses import replace

    def one(i):
        sc = replace(scene, seed=scene.seed + i)
        sectors = simulator.synthesize_ping(
            sc, defn, sys_, env, mf, record_range=record_range, domain=domain
        )
        return pingfile.PingRecord(tuple(sectors))

    records = _map_ordered(one, range(num_pings))
    pingfile.write_ping_file(args.out, defn, sys_, env, records)
    return 0


def _cmd_pc(args) -> int:
    defn, sys_, env, pings, mf = _read_input(args.infile)

    def one(item):
        idx, record = item
        cp = _compress_record(record, defn, sys_, env, mf)
        sp = ts_mod.point_scattering_strength(cp, sys_, env, defn)
        svn = sv_mod.sv_samples(cp, mf, sys_, env, defn)
        mag_sq = np.abs(cp.mean.samples) ** 2
        return [
            (idx, r, m, s, v)
            for r, m, s, v in zip(cp.range_axis, mag_sq, sp, svn)
        ]

    rows = []
    for chunk in _map_ordered(one, enumerate(pings)):
        rows.extend(chunk)
    _write_csv(args.out, ["ping", "range_m", "pc_mag_sq", "sp_db", "sv_db"], rows)
    return 0


def _cmd_angles(args) -> int:
    defn, sys_, env, pings, mf = _read_input(args.infile)

    def one(item):
        idx, record = item
        cp = _compress_record(record, defn, sys_, env, mf)
        ang = beamproc.estimate_angles(cp, sys_)
        return [
            (idx, r, th, ph)
            for r, th, ph in zip(cp.range_axis, ang.minor, ang.major)
        ]

    rows = []
    for chunk in _map_ordered(one, enumerate(pings)):
        rows.extend(chunk)
    _write_csv(args.out, ["ping", "range_m", "theta_rad", "phi_rad"], rows)
    return 0


def _cmd_ts(args) -> int:
    defn, sys_, env, pings, mf = _read_input(args.infile)
    params = ts_mod.DetectionParams(
        threshold_db=args.threshold_db,
        min_separation=args.min_separation,
        max_angle_std=args.max_angle_std,
        max_half_window=(len(mf.autocorr) - 1) // 2,
    )
    n_dft = args.n_dft
    if n_dft == 0:
        n_dft = 1 << int(np.ceil(np.log2(len(mf.autocorr))))

    def one(item):
        idx, record = item
        cp = _compress_record(record, defn, sys_, env, mf)
        sp = ts_mod.point_scattering_strength(cp, sys_, env, defn)
        ang = beamproc.estimate_angles(cp, sys_)
        out = []
        for det in ts_mod.detect_single_targets(cp, sp, ang, params):
            spec = ts_mod.ts_spectrum(det, mf, sys_, env, defn, n_dft)
            for f, value in zip(spec.frequencies, spec.ts):
                out.append(
                    (idx, det.range, det.bearing[0], det.bearing[1], f, value)
                )
        return out

    rows = []
    for chunk in _map_ordered(one, enumerate(pings)):
        rows.extend(chunk)
    _write_csv(
        args.out,
        ["ping", "range_m", "theta_rad", "phi_rad", "frequency_hz", "ts_db"],
        rows,
    )
    return 0


def _cmd_sv(args) -> int:
    defn, sys_, env, pings, mf = _read_input(args.infile)

    def one(item):
        idx, record = item
        cp = _compress_record(record, defn, sys_, env, mf)
        gram = sv_mod.sv_spectrum(cp, mf, sys_, env, defn, args.window, args.hop)
        out = []
        for i in range(gram.centers.size):
            for f, value in zip(gram.frequencies, gram.sv[i]):
                out.append((idx, gram.ranges[i], f, value))
        return out

    rows = []
    for chunk in _map_ordered(one, enumerate(pings)):
        rows.extend(chunk)
    _write_csv(args.out, ["ping", "range_m", "frequency_hz", "sv_db"], rows)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="echochain",
        description="Broadband echosounder processing chain and simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="render a scene description to a ping file")
    p.add_argument("--scene", required=True, help="scene JSON path")
    p.add_argument("--out", required=True, help="output ping file (.bbec)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("pc", help="pulse-compressed echogram columns as CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_pc)

    p = sub.add_parser("angles", help="split-aperture angles per sample as CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_angles)

    p = sub.add_parser("ts", help="detect single targets and export TS spectra")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threshold-db", type=float, default=-60.0)
    p.add_argument("--min-separation", type=int, default=16)
    p.add_argument("--max-angle-std", type=float, default=0.1)
    p.add_argument("--n-dft", type=int, default=0, help="0 = auto (power of 2)")
    p.set_defaults(func=_cmd_ts)

    p = sub.add_parser("sv", help="sliding-window Sv spectrogram as CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--window", type=int, required=True, help="samples, power of 2")
    p.add_argument("--hop", type=int, default=0, help="samples; 0 = window/2")
    p.set_defaults(func=_cmd_sv)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "sv":
        if args.window < 2 or (args.window & (args.window - 1)) != 0:
            parser.error("--window must be a power of 2 (sliding DFT length)")
        if args.hop == 0:
            args.hop = args.window // 2

    if args.command == "ts" and args.n_dft and (args.n_dft & (args.n_dft - 1)) != 0:
        parser.error("--n-dft must be a power of 2")

    try:
        return args.func(args)
    except (ConfigError, pingfile.FileFormatError, ValueError, OSError, KeyError) as exc:
        print(f"echochain {args.command}: error: {exc}", file=_sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
