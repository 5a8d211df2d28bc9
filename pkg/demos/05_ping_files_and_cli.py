"""Ping containers and the command-line interface.

Builds a scene description, renders it to the binary ping container with
the `echochain simulate` subcommand, then exports echogram columns, angle
series, and a TS spectrum as CSV.  Everything the CLI does is a thin shell
over the library, so the file written here can equally be read back with
echochain.read_ping_file and processed directly.

Run:  python demos/05_ping_files_and_cli.py
"""

import json
import os
import subprocess
import sys
import tempfile

import numpy as np

import echochain as ec
from echochain import pingfile

workdir = tempfile.mkdtemp(prefix="echochain_demo_")
print("working in", workdir)

# --- describe the scene as JSON -------------------------------------------
defn = ec.PingDefinition(
    f_start=160e3, f_stop=260e3, duration=2.048e-3,
    transmit_power=1000.0, adc_rate=1.5e6, taper_fraction=0.01,
)
fgrid = np.linspace(120e3, 300e3, 181)
sysc = ec.SystemConfig(
    z_receiver=1000 + 0j, z_transducer=75 + 0j,
    angle_sensitivity_minor=21.0, angle_sensitivity_major=19.0,
    gain_table=ec.FrequencyTable(fgrid, 10 ** 2.5 * fgrid / 210e3),
    psi_nominal=0.008, f_nominal=210e3,
    beamwidth_minor=0.12, beamwidth_major=0.12,
)
env = ec.Environment(sound_speed=1500.0,
                     absorption_table=ec.FrequencyTable.constant(0.0, 1e3, 1e6))

scene_doc = {
    "ping": pingfile.ping_definition_to_dict(defn),
    "processing": {"target_rate_factor": 1.5},
    "system": pingfile.system_config_to_dict(sysc),
    "environment": pingfile.environment_to_dict(env),
    "scene": {
        "point_targets": [
            {"range_m": 35.0, "ts_db": -45.0},
            {"range_m": 48.0, "ts_db": -42.0, "theta_rad": 0.01},
        ],
        "noise_power_w": 1e-12,
        "seed": 11,
    },
    "num_pings": 2,
    "record_range_m": 55.0,
}
scene_path = os.path.join(workdir, "scene.json")
with open(scene_path, "w") as fh:
    json.dump(scene_doc, fh, indent=2)


def run(*args):
    cmd = [sys.executable, "-m", "echochain.cli", *args]
    print("$", " ".join(args))
    subprocess.run(cmd, check=True)


pings = os.path.join(workdir, "pings.bbec")
run("simulate", "--scene", scene_path, "--out", pings)

# the container round-trips bit-exactly and carries the full configuration
d2, s2, e2, records = ec.read_ping_file(pings)
print(f"read back {len(records)} pings x {records[0].num_sectors} sectors, "
      f"{len(records[0].sectors[0])} samples at "
      f"{records[0].sectors[0].sample_rate/1e3:.0f} kHz")

run("pc", "--in", pings, "--out", os.path.join(workdir, "pc.csv"))
run("angles", "--in", pings, "--out", os.path.join(workdir, "angles.csv"))
run("ts", "--in", pings, "--out", os.path.join(workdir, "ts.csv"),
    "--threshold-db", "-55")
run("sv", "--in", pings, "--out", os.path.join(workdir, "sv.csv"),
    "--window", "1024", "--hop", "512")

with open(os.path.join(workdir, "ts.csv")) as fh:
    lines = fh.read().splitlines()
print(f"ts.csv: {len(lines) - 1} rows, header: {lines[0]}")
for line in lines[1:3]:
    print("   ", line)
print("outputs in", workdir)
