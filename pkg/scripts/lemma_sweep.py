"""Run the region checks on the boost model across reference voltages and
alpha multipliers, printing which checks hold.

    python scripts/lemma_sweep.py [--count N] [--seed S]
"""

import argparse

import numpy as np

from switchsurf import boost as bst
from switchsurf.errors import NoSwitchedEquilibrium
from switchsurf.geometry import verify_lemmas
from switchsurf.lyapunov import SamplingSpec

GATING = ("L1-1", "L2-1", "L2-2", "L2-3", "L2-4", "L2-5")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    p = bst.BoostParams()
    print("x02    scale  " + "  ".join(f"{n:6s}" for n in GATING))
    for x02 in (2.0, 5.0, 10.0, 15.0):
        try:
            eq = bst.select_equilibrium(bst.boost_equilibria(p, x02))
        except NoSwitchedEquilibrium as exc:
            print(f"{x02:<6g} {exc}")
            continue
        L = bst.boost_lyapunov(p, eq)
        lin, _ = bst.boost_rules(p, eq, L)
        sys_ = bst.boost_system(p).system
        box = SamplingSpec.around(eq.x0, np.array([0.05, 10.0]), args.count, args.seed)
        for scale in (1.0, 2.0, 10.0):
            rep = verify_lemmas(L.with_alpha(scale * L.alpha), sys_, eq, lin, box)
            cells = "  ".join(f"{'ok' if rep.checks[n].passed else 'FAIL':6s}" for n in GATING)
            print(f"{x02:<6g} {scale:<6g} {cells}")


if __name__ == "__main__":
    main()
