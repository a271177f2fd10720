"""Threshold sensitivity sweep over the discount rate, drift, volatility and switching cost.

Usage: python3 scripts/sensitivity_sweep.py [CONFIG] [OUT_CSV]
"""

import sys

from droneswitch.config import baseline_scenario, load_scenario
from droneswitch.experiments import sensitivity_table, write_rows

REFERENCE = {
    ("rho", 0.04): (57.38, 82.84),
    ("sigma", 0.05): (69.11, 73.85),
    ("F", 1500.0): (62.92, 82.06),
}


def main(config=None, dest="sensitivity.csv"):
    sc = load_scenario(config) if config else baseline_scenario()
    rows = sensitivity_table(sc)
    write_rows(rows, dest)
    print(f"{'param':>6s} {'value':>8s} {'Q*':>8s} {'Q_L':>8s} {'Q_L-Q*':>8s} {'Q_H':>8s} {'Q_H-Q*':>8s}  reference")
    for r in rows:
        pub = REFERENCE.get((r["parameter"], r["value"]), "")
        print(f"{r['parameter']:>6s} {r['value']:8g} {r['q_star']:8.2f} {r['q_low']:8.2f} {r['q_low_gap']:8.2f} "
              f"{r['q_high']:8.2f} {r['q_high_gap']:8.2f}  {pub}")
    print(f"wrote {dest}")


if __name__ == "__main__":
    main(*sys.argv[1:])
