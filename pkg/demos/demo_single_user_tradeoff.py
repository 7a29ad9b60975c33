"""Single-user design walkthrough: the radar/communication SINR tradeoff.

Solves the closed-form design on the reference 8-antenna channel for a range
of user SINR targets and prints the resulting operating points, including the
two endpoints (radar-optimal and communication-optimal) and the time-sharing
reference. Writes the same table to demos/output/tradeoff.csv.
"""

import pathlib

import numpy as np

from dfrcbeam.config import load_config
from dfrcbeam.experiments import run_tradeoff, write_rows
from dfrcbeam.fixtures import fixture_path

out_dir = pathlib.Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

config = load_config(fixture_path("tradeoff_single_user"))
rows = run_tradeoff(config)

print(f"scenario: {config.name}  (N_t = N_r = 8, budget 20 dBm)")
print(f"{'point':16s} {'target dB':>10s} {'radar dB':>9s} {'user dB':>8s} {'chord dB':>9s}")
for row in rows:
    if not row.get("feasible", False):
        print(f"{row['point']:16s} {row['gamma_db']:10.2f}  -- infeasible --")
        continue
    cu = row["cu_sinrs_db"][0]
    chord = row.get("timeshare_radar_sinr_db", float("nan"))
    print(
        f"{row['point']:16s} {row['gamma_db']:10.2f} {row['radar_sinr_db']:9.2f} "
        f"{cu:8.2f} {chord:9.2f}"
    )

write_rows(rows, out_dir / "tradeoff.csv", "csv")
print(f"\nwrote {out_dir / 'tradeoff.csv'}")
print("render with: figkit tradeoff --in demos/output/tradeoff.csv --out tradeoff.svg")
