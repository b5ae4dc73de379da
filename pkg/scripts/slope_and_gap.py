"""Exact versus approximate spectrum for one interval configuration.

Prints the decay-rate fit, the aligned kappa gaps, and the gaps obtained
when the spectral line uses the doubled jump vector instead of the one
matching a bounded d-function.

    python scripts/slope_and_gap.py [--endpoints=-5,-3.3,-2,0.1,1,2] [--n-max 22]
"""

import argparse
import warnings

import numpy as np

from fhtsvd.reports import MAIN_EXAMPLE, Pipeline, RunConfig, optimal_shift

warnings.simplefilter("ignore", RuntimeWarning)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--endpoints", default=",".join(map(str, MAIN_EXAMPLE)))
    ap.add_argument("--n-max", type=int, default=22)
    args = ap.parse_args()
    pl = Pipeline(RunConfig(endpoints=[float(s) for s in args.endpoints.split(",")], n_max=args.n_max))
    sp = pl.solver
    spec = pl.oracle()

    n = spec.n[5:]
    slope, icpt = np.polyfit(n, np.log(spec.lambdas[n]), 1)
    pred = -sp.period
    print(f"Im tau11 = {pl.pd.tau11.imag:.10f}   predicted slope = {pred:.6f}")
    print(f"fitted slope (n=5..{args.n_max}) = {slope:.6f}   intercept = {icpt:.4f}   "
          f"relative error = {abs(slope - pred) / abs(pred):.2e}")

    idx, ka = pl.approximate_roots()
    approx = np.full(spec.n.size, np.nan)
    approx[idx] = ka
    shift = optimal_shift(spec.n, approx, spec.kappas)
    print(f"\nindex shift = {shift}")
    print(f"{'n':>3} {'kappa_approx':>14} {'kappa_exact':>14} {'|gap|':>10} {'gap*sqrt(k)':>12}")
    for m in idx:
        if m + shift <= args.n_max:
            g = abs(spec.kappas[m + shift] - approx[m])
            print(f"{m:3d} {approx[m]:14.8f} {spec.kappas[m + shift]:14.8f} {g:10.6f} {g * np.sqrt(approx[m]):12.6f}")

    # same root search on the line built from the doubled jump vector
    from scipy.optimize import brentq

    def published(k):
        W = sp.abel.published_spectral_line(np.atleast_1d(k))
        return (sp._phase(W) * sp.theta.theta(W - sp.abel.W0)).real

    grid = np.arange(1e-3, spec.kappas[-1] + 2, sp.period / 32)
    vals = published(grid)
    alt = np.array([brentq(lambda k: published(k)[0], grid[i], grid[i + 1])
                    for i in np.nonzero(vals[:-1] * vals[1:] < 0)[0]])
    m = min(alt.size, spec.n.size)
    print("\nwith the doubled jump vector:")
    for k in (1, 8, 15, m - 1):
        print(f"  n={k:2d}  root={alt[k]:10.5f}  exact={spec.kappas[k]:10.5f}  gap={spec.kappas[k] - alt[k]:+.4f}")
    print(f"doubled delta: {sp.gfun.published_delta}   bounded delta: {sp.gfun.delta}")

if __name__ == "__main__":
    main()
