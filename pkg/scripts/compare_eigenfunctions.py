"""Asymptotic singular functions against the Nystrom oracle.

For each index prints the overlap on the margin grid, the L^2(1/w) norms
of the asymptotic pair and the sign-change count of f_n; with --out the
plot-ready fn_<n>.csv files are written as well.

    python scripts/compare_eigenfunctions.py [--n 2 30] [--out DIR]
"""

import argparse
import warnings

from fhtsvd.checks import chebyshev_inner_grid, overlap, sign_changes
from fhtsvd.cli import write_eigenfunctions
from fhtsvd.reports import Pipeline, RunConfig

warnings.simplefilter("ignore", RuntimeWarning)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", nargs=2, type=int, default=(2, 26), metavar=("FIRST", "LAST"))
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    lo, hi = args.n
    config = RunConfig(n_max=max(22, hi), out=args.out or ".")
    pl = Pipeline(config)
    cheb = chebyshev_inner_grid(pl.system, 2000)
    print(f"{'n':>3} {'kappa':>10} {'overlap':>9} {'|f|^2':>7} {'|h|^2':>7} {'changes':>8}")
    for n in range(lo, hi + 1):
        kappa, z, f, _, fo = pl.eigenfunction_table(n)
        nf, nh = pl.solver.asymptotic_norms(kappa)
        f_full, _ = pl.solver.asymptotic_singular_functions(kappa, cheb, margin=0.0)
        print(f"{n:3d} {kappa:10.5f} {overlap(f, fo, z, pl.system):9.6f} {nf:7.4f} {nh:7.4f} "
              f"{sign_changes(f_full):8d}")
        if args.out:
            write_eigenfunctions(config, n, pl)


if __name__ == "__main__":
    main()
