"""Photon numbers before and after conversion at beta*omega0 = ln 2."""

import argparse
import math

from tfdpdc import pdc
from tfdpdc.liouville import PdcConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta-omega0", type=float, default=math.log(2))
    ap.add_argument("--cutoff", type=int, default=40)
    args = ap.parse_args()

    cfg = PdcConfig(cutoff_a=args.cutoff, cutoff_b=1, cutoff_c=1)
    rep = pdc.photon_number_report(args.beta_omega0, cfg)
    print(f"beta*omega0      {args.beta_omega0!r}")
    print(f"<N0> before      {rep.n0_before:.12f}")
    print(f"<N0> after       {rep.n0_after:.12f}")
    print(f"<N1>, <N2> after {rep.n1_after:.12f} {rep.n2_after:.12f}  (hat+tilde)")
    print(f"hat-only <N1>    {rep.n1_hat_after:.12f}")
    print(f"example sum      {pdc.worked_example_sum(args.cutoff):.12f}")
    print("n  p_before        p_after")
    for (n, pb), (_, pa) in zip(rep.profile_before[:12], rep.residual_profile[:12]):
        print(f"{n:<2} {pb:.12f}  {pa:.12f}")


if __name__ == "__main__":
    main()
