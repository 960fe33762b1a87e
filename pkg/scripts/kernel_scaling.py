"""Oseen kernel norm against t on the torus, with the fitted log-log slope.

Local slopes between neighbouring times show the drift towards -1/2 as t shrinks.
"""

import argparse

import numpy as np

from dyadic_ns.harness import KERNEL_TIMES, kernel_slope


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--grid", type=int, default=256)
    args = ap.parse_args()
    slope, vals = kernel_slope(args.dim, args.grid)
    local = np.diff(np.log(vals)) / np.diff(np.log(KERNEL_TIMES))
    print(f"{'t':>10s} {'norm':>12s} {'local slope':>12s}")
    for i, (t, v) in enumerate(zip(KERNEL_TIMES, vals)):
        ls = f"{local[i - 1]:12.4f}" if i else " " * 12
        print(f"{t:10.3e} {v:12.5e} {ls}")
    print(f"fitted slope {slope:.4f} (target -0.5 +- 0.05)")


if __name__ == "__main__":
    main()
