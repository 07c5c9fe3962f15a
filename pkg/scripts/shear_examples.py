"""Closed-form checks on the 2x2 shear generators.

Prints the cogenerator norms against their closed forms, the contractivity
verdicts around the critical parameters, both contractivity thresholds and
the contractive-cogenerator / non-contractive-semigroup fixture.
"""

import argparse

import numpy as np

from cogenlab.cogenerator import cayley, hy_contraction_check
from cogenlab.families import critical_beta, shear, shear_cayley_norm, shear_inverse
from cogenlab.matrix_core import INF, op_p_norm
from cogenlab.semigroup import contractivity_check, threshold_search


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--betas", type=float, nargs="+", default=[0.5, 1.5, 2.0, 3.0])
    ap.add_argument("--ps", type=float, nargs="+", default=[2.5, 3.0, 4.0, INF])
    args = ap.parse_args()

    print("beta      p     ||V||_p (computed)   closed form      rel. error")
    for beta in args.betas:
        V = cayley(shear(beta))
        for p in args.ps:
            got, want = op_p_norm(V, p), shear_cayley_norm(beta, p)
            print(f"{beta:<8g}  {p:<5g} {got:<20.15g} {want:<16.12g} {abs(got - want) / want:.1e}")

    print("\ncritical beta where ||V||_p = 1, and semigroup contractivity there")
    for p in args.ps:
        b = critical_beta(p)
        rep = contractivity_check(shear(b), p, witnesses=[[b / 2, 1.0]])
        print(f"p={p:<5g} beta={b:.10f} ||V||={op_p_norm(cayley(shear(b)), p):.12f} semigroup contractive: {rep.passed}")

    print("\nthresholds in p=inf")
    print(f"  shear          beta* = {threshold_search(shear, INF, (0.5, 2.0)):.6f}")
    print(f"  inverse shear  beta* = {threshold_search(shear_inverse, INF, (1.0, 3.0)):.6f}")

    A = shear(3.0)
    V = cayley(A)
    hy = hy_contraction_check(V, INF)
    print("\nbeta=3, p=inf")
    print(f"  ||V||_inf = {op_p_norm(V, INF):.15g}, distance of 1 to sigma(V) = {np.min(np.abs(np.linalg.eigvals(V) - 1)):.4f}")
    print(f"  resolvent contraction bound holds: {hy.passed} (worst mu = {hy.worst_param:.6f}, margin {hy.margin:.3e})")
    print(f"  semigroup contractive: {contractivity_check(A, INF).passed}")


if __name__ == "__main__":
    main()
