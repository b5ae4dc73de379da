"""Shrink the last arc to a point and watch tau11 approach its genus-1 limit.

Prints the relative error and error * |ln eps|; a roughly constant second
column means logarithmic convergence.

    python scripts/degeneration_sweep.py
"""

import warnings

import numpy as np

from fhtsvd.checks import genus_one_ratio
from fhtsvd.surface import IntervalSystem, build_period_data

warnings.simplefilter("ignore", RuntimeWarning)

BASE = (-5.0, -3.3, -2.0, 0.1)
CENTRE = 1.5


def main():
    target = genus_one_ratio(BASE)
    print(f"genus-1 ratio = {target:.12f}")
    print(f"{'eps':>8} {'Im tau11':>14} {'rel.err':>10} {'err*|ln eps|':>13}")
    for eps in 10.0 ** -np.arange(1, 6.5, 0.5):
        pd = build_period_data(IntervalSystem(BASE + (CENTRE - eps, CENTRE + eps)))
        err = abs(pd.tau11.imag - target) / target
        print(f"{eps:8.1e} {pd.tau11.imag:14.10f} {err:10.4f} {err * abs(np.log(eps)):13.4f}")


if __name__ == "__main__":
    main()
