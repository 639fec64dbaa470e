"""Writes the synthetic survey fixture used by the CLI tests.

The file mimics the layout of a fasting-glucose extract: `SEQN` (respondent
id), `LBXGLU` (plasma glucose in mg/dL, empty when not measured),
`RIDEXMON` (examination period, 1 or 2), `RIAGENDR` (1 or 2) and `delta`.
Values are simulated; no survey data is involved.

    python tools/make_nhanes_fixture.py tests/data/nhanes_fixture.csv
"""

import argparse
import csv

import numpy as np

N_ROWS = 3036
N_OBSERVED = 2890

# observation probability per (RIDEXMON, RIAGENDR) cell; missingness
# depends only on the cell
CELL_PROPENSITY = {(1, 1): 0.94, (1, 2): 0.96, (2, 1): 0.945, (2, 2): 0.962}


def simulate(seed):
    rng = np.random.default_rng(seed)
    period = rng.integers(1, 3, size=N_ROWS)
    sex = rng.integers(1, 3, size=N_ROWS)
    # right-skewed glucose: lognormal bulk around 100 mg/dL plus a diabetic tail
    base = rng.lognormal(mean=np.log(100.0), sigma=0.12, size=N_ROWS)
    tail = rng.random(N_ROWS) < 0.1
    base[tail] = rng.lognormal(mean=np.log(150.0), sigma=0.35, size=tail.sum())
    base += np.where(sex == 1, 3.0, 0.0)
    glucose = np.clip(np.round(base), 45, 480)

    # draw exactly N_ROWS - N_OBSERVED missing rows, weighted by 1 - pi(cell)
    miss_weight = np.array([1.0 - CELL_PROPENSITY[(p, s)] for p, s in zip(period, sex)])
    missing = rng.choice(N_ROWS, size=N_ROWS - N_OBSERVED, replace=False, p=miss_weight / miss_weight.sum())
    delta = np.ones(N_ROWS, dtype=int)
    delta[missing] = 0
    return period, sex, glucose, delta


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("output")
    parser.add_argument("--seed", type=int, default=3036)
    args = parser.parse_args()
    period, sex, glucose, delta = simulate(args.seed)
    with open(args.output, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["SEQN", "LBXGLU", "RIDEXMON", "RIAGENDR", "delta"])
        for i in range(N_ROWS):
            value = f"{glucose[i]:.0f}" if delta[i] else ""
            writer.writerow([73557 + i, value, period[i], sex[i], delta[i]])


if __name__ == "__main__":
    main()
