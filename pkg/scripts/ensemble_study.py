"""Net savings of the IC, deterministic and stochastic-threshold policies across seeds.

Usage: python3 scripts/ensemble_study.py [N_SEEDS] [OUT_CSV]
"""

import sys

from droneswitch.config import baseline_scenario
from droneswitch.experiments import build_policies, ensemble_study, write_rows


def main(n_seeds="200", dest="ensemble.csv"):
    sc = baseline_scenario()
    specs = build_policies(sc, ("IC", "Deterministic", "StochasticThreshold", "always-DT"))
    study = ensemble_study(sc, int(n_seeds), specs=specs)
    write_rows(study["policies"], dest)
    for row in study["policies"]:
        print(f"{row['policy']:>20s}  mean {row['mean']:14.2f}  std {row['std']:10.2f}  "
              f"switches {row['mean_switches']:6.2f}  vs IC {row['pct_vs_first']:+.4f}%")
    sav = study["savings"]
    diff = sav[:, 2] - sav[:, 1]
    se = diff.std(ddof=1) / len(diff) ** 0.5
    print(f"stochastic - deterministic: {diff.mean():+.2f} (SE {se:.2f}) over {len(diff)} seeds")
    print(f"wrote {dest}")


if __name__ == "__main__":
    main(*sys.argv[1:])
