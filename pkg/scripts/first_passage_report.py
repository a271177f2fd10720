"""Closed-form expected transition time against Monte Carlo hitting times.

Usage: python3 scripts/first_passage_report.py [N_PATHS]
"""

import sys

from droneswitch.experiments import first_passage_report


def main(n_paths="100000"):
    for Q0, target, mu, sigma in ((50.0, 79.7, 0.01, 0.1), (50.0, 79.7, 0.02, 0.1), (79.7, 63.8, -0.01, 0.1)):
        rep = first_passage_report(Q0, target, mu, sigma, n_paths=int(n_paths))
        print(f"{Q0:g} -> {target:g} (mu={mu:g}, sigma={sigma:g}): closed form {rep['closed_form']:.2f}, "
              f"MC {rep['monte_carlo']:.2f} +- {rep['monte_carlo_se']:.2f} ({rep['censored']} censored), "
              f"ln-ratio/nu {rep['textbook']:.2f}")


if __name__ == "__main__":
    main(*sys.argv[1:])
