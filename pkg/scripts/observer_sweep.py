#!/usr/bin/env python3
"""Sweep simulated observers across thresholds and tabulate what the
adaptive procedure reports back.

Useful to eyeball the bias/variance of the staircase itself: for each
true threshold, how often each scale level is reported, and how many
trials a session takes.

    python3 scripts/observer_sweep.py --distance 0.5 --runs 200
"""

import argparse
from collections import Counter

import numpy as np

from stereoacuity.geometry import DisplayProfile, build_level_table
from stereoacuity.ol import is_ol
from stereoacuity.staircase import PsychometricObserver, simulate


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--ppi", type=float, default=264.0)
    parser.add_argument("--distance", type=float, default=0.5)
    parser.add_argument("--runs", type=int, default=200)
    parser.add_argument("--slope", type=float, default=15.0)
    parser.add_argument("--lapse", type=float, default=0.02)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    profile = DisplayProfile(ppi=args.ppi)
    table = build_level_table(profile, args.distance)
    levels = table.arcsec_values(rounded=True)
    print(f"scale at {args.distance} m: {levels}")
    print(f"{'theta':>7} {'mean_trials':>11} {'OL%':>5}  outcome distribution")

    for theta in [lv * f for lv in levels[::3] for f in (0.8, 1.1)]:
        observer = PsychometricObserver(
            threshold_arcsec=theta, slope_arcsec=args.slope, lapse_rate=args.lapse
        )
        outcomes = Counter()
        trials = []
        for run in range(args.runs):
            seed = int(np.random.SeedSequence([args.seed, run]).generate_state(1)[0])
            record = simulate(observer, table, seed)
            key = "OL" if is_ol(record.outcome) else round(record.outcome)
            outcomes[key] += 1
            trials.append(len(record.trials))
        ol_pct = 100.0 * outcomes.get("OL", 0) / args.runs
        top = ", ".join(f"{k}:{v}" for k, v in outcomes.most_common(4))
        print(f"{theta:7.1f} {np.mean(trials):11.1f} {ol_pct:5.1f}  {top}")


if __name__ == "__main__":
    main()
