"""Pump occupation before/after conversion over a beta grid, written as CSV."""

import argparse

import numpy as np

from tfdpdc import io, pdc
from tfdpdc.liouville import PdcConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--start", type=float, default=0.2)
    ap.add_argument("--stop", type=float, default=4.0)
    ap.add_argument("--num", type=int, default=39)
    ap.add_argument("--cutoff", type=int, default=60)
    ap.add_argument("--out", default="beta_sweep.csv")
    args = ap.parse_args()

    cfg = PdcConfig(cutoff_a=args.cutoff, cutoff_b=1, cutoff_c=1)
    rows = []
    for bw in np.linspace(args.start, args.stop, args.num):
        rep = pdc.photon_number_report(float(bw), cfg)
        rows.append((float(bw), rep.n0_before, rep.n0_after, rep.n0_after - rep.n0_before,
                     rep.tail_weight))
    io.write_csv(args.out, ("beta_omega0", "n0_before", "n0_after", "gain", "tail_weight"), rows)
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
