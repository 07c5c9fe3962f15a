"""Cogenerator powers on the Jordan shift semigroup.

For each k, sweeps n and reports ||V^n h|| for the sign test vector, the
first component at 0 against the Laguerre prediction, and the fitted growth
exponent. ``--compare-steps`` repeats the sweep on several grid steps to show
the discretisation error of the first component.
"""

import argparse

from cogenlab.shift import DEFAULT_STEP, sharpness_exponent, sharpness_sweep


def gap(rows, k):
    h0 = 1.0 if k == 0 else 0.0
    return max(abs(r.first_component_at_0 - (h0 - r.laguerre_lower_bound)) / r.laguerre_lower_bound for r in rows)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--n-min", type=int, default=10)
    ap.add_argument("--n-max", type=int, default=120)
    ap.add_argument("--t-max", type=float, default=400.0)
    ap.add_argument("--compare-steps", type=float, nargs="*", default=None)
    args = ap.parse_args()

    ns = range(args.n_min, args.n_max + 1)
    steps = args.compare_steps or [DEFAULT_STEP]
    for k in args.k:
        for step in steps:
            rows = sharpness_sweep(k, ns, step=step, t_max=args.t_max)
            fit = sharpness_exponent(rows)
            print(
                f"k={k} step=1/{round(1 / step)}: exponent {fit.exponent:.4f} (expected {k + 0.5}), "
                f"worst relative gap at 0: {gap(rows, k):.2e}"
            )
        last = rows[-1]
        print(f"    n={last.n}: ||V^n h|| = {last.vn_h_norm:.6g}, (V^n h)_1(0) = {last.first_component_at_0:.6g}")


if __name__ == "__main__":
    main()
