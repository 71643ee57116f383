"""Closed-loop boost converter comparison of the linear and quadratic rules.

    python scripts/run_boost_demo.py [--out DIR] [--x02 VOLTS] [--root N]

Writes one trajectory CSV per rule plus a JSON summary.
"""

import argparse
import json
import os
import time

from switchsurf import boost as bst
from switchsurf.filippov import write_trajectory_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out/boost_demo")
    ap.add_argument("--x02", type=float, default=10.0)
    ap.add_argument("--root", type=int, default=None)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    t0 = time.perf_counter()
    demo = bst.boost_demo(bst.BoostParams(), args.x02, root=args.root)
    elapsed = time.perf_counter() - t0
    eq = demo.equilibrium
    print(f"x0 = {eq.x0.tolist()}  lambda0 = {eq.lambda0:.6f}  alpha = {demo.lyapunov.alpha:.6e}")
    for name, tr in demo.trajectories.items():
        rep = demo.reports[name]
        write_trajectory_csv(tr, os.path.join(args.out, f"traj_{name}.csv"))
        print(f"{name:9s} stop at t = {rep.t_stop}  crossings = {tr.count('crossing')}  "
              f"slides = {tr.count('slide_start')}  monotone = {rep.monotone}")
    with open(os.path.join(args.out, "summary.json"), "w") as fh:
        json.dump(demo.to_dict(), fh, indent=2, sort_keys=True)
    print(f"done in {elapsed:.1f} s -> {args.out}")


if __name__ == "__main__":
    main()
