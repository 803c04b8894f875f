"""Infidelity of the first-order branch against exact Liouvillian evolution.

Halving kappa*t should cut the infidelity by about four.
"""

import argparse
import math
import time

from tfdpdc import liouville as lv
from tfdpdc import pdc


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta-omega0", type=float, default=math.log(2))
    ap.add_argument("--kappas", type=float, nargs="+", default=[0.005, 0.01, 0.02, 0.04, 0.08])
    ap.add_argument("--cutoffs", type=int, nargs=3, default=[16, 3, 3])
    args = ap.parse_args()

    a, b, c = args.cutoffs
    base = lv.PdcConfig(cutoff_a=a, cutoff_b=b, cutoff_c=c)
    initial = pdc.build_initial_state(args.beta_omega0, base)
    print(f"dimension {base.basis().total_dim}")
    print("kappa*t   infidelity     ratio   seconds")
    prev = None
    for k in args.kappas:
        cfg = lv.PdcConfig(kappa=k, cutoff_a=a, cutoff_b=b, cutoff_c=c)
        t0 = time.perf_counter()
        val = lv.branch_infidelity(initial, cfg)
        dt = time.perf_counter() - t0
        ratio = "" if prev is None else f"{val / prev:.3f}"
        print(f"{k:<9g} {val:.6e}  {ratio:>7}  {dt:.2f}")
        prev = val


if __name__ == "__main__":
    main()
