"""Beampattern walkthrough: where the nulls come from.

Solves the single-user design at two constraint levels and tabulates the
joint transmit-receive pattern at the scene's key angles. The interference
suppression lives in the receive beam, so the joint pattern shows deep nulls
at the interferer angles while the transmit pattern alone does not.
"""

import pathlib

from dfrcbeam.config import load_config
from dfrcbeam.experiments import run_beampattern, write_rows
from dfrcbeam.fixtures import fixture_path

out_dir = pathlib.Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

rows = run_beampattern(load_config(fixture_path("beampattern_single_user")))
key_angles = (-60.0, -30.0, 0.0, 30.0, 60.0)
for gamma_db in (15.0, 25.0):
    sel = {r["angle_deg"]: r for r in rows if r["gamma_db"] == gamma_db}
    print(f"user target {gamma_db:.0f} dB:")
    print(f"  {'angle':>6s} {'transmit dB':>12s} {'joint dB':>10s}")
    for angle in key_angles:
        r = sel[angle]
        print(f"  {angle:6.0f} {r['tx_pattern_db']:12.1f} {r['joint_pattern_db']:10.1f}")

write_rows(rows, out_dir / "beampattern.csv", "csv")
print(f"\nwrote {out_dir / 'beampattern.csv'}")
print("render with: figkit beampattern --in demos/output/beampattern.csv --out beampattern.svg")
