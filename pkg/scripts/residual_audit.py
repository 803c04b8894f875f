"""Compare the two residual pump-number formulas over a range of temperatures."""

import argparse

import numpy as np

from tfdpdc import pdc


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cutoff", type=int, default=200)
    ap.add_argument("--values", type=float, nargs="+",
                    default=list(np.round(np.linspace(0.25, 4.0, 16), 4)))
    args = ap.parse_args()

    print("beta*omega0  main            simplified       discrepancy")
    for bw in args.values:
        a = pdc.residual_simplified_eval(bw, args.cutoff)
        print(f"{bw:<11g} {a.main:<15.9f} {a.simplified:<16.9f} {a.discrepancy:.9f}")


if __name__ == "__main__":
    main()
