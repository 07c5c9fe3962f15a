"""Run the three contraction criteria on the 20 consistency fixtures and on
random generators, and report any disagreement."""

import argparse

import numpy as np

from cogenlab.cogenerator import cayley, hy_contraction_check, vtau_contraction_check
from cogenlab.families import consistency_fixtures
from cogenlab.semigroup import contractivity_check


def verdicts(A, p):
    return (
        contractivity_check(A, p).passed,
        hy_contraction_check(cayley(A), p).passed,
        vtau_contraction_check(A, p).passed,
    )


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--random", type=int, default=0, help="extra random 3x3 generators per norm")
    args = ap.parse_args()

    bad = 0
    print(f"{'fixture':<22} p     expected  semigroup  resolvent  V_tau")
    for gid, A, p, expected in consistency_fixtures(args.seed):
        v = verdicts(A, p)
        flag = "" if len(set(v)) == 1 and v[0] == expected else "  <-- disagreement"
        bad += bool(flag)
        print(f"{gid:<22} {p:<5g} {str(expected):<9} {str(v[0]):<10} {str(v[1]):<10} {v[2]}{flag}")

    rng = np.random.default_rng(args.seed)
    for p in (2.0, np.inf):
        for i in range(args.random):
            A = rng.standard_normal((3, 3)) - 1.5 * np.eye(3)
            v = verdicts(A, p)
            if len(set(v)) != 1:
                bad += 1
                print(f"random #{i} p={p:g}: {v}")
    print(f"\n{bad} disagreement(s)")


if __name__ == "__main__":
    main()
