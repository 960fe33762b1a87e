"""Small-time behaviour of rough data: sup over t < delta of sqrt(t)|u(t)|_inf.

Prints the table for several seeds and the ratios between successive deltas.
With a t**a law the ratio between halvings tends to 2**-a.
"""

import argparse

import numpy as np

from dyadic_ns.harness import HarnessConfig, small_time_ratios


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--steps", type=int, default=64)
    args = ap.parse_args()
    cfg = HarnessConfig(steps=args.steps)
    print("seed  " + "  ".join(f"delta=T/{2**i:<3d}" for i in range(4)) + "  ratios")
    for seed in range(args.seeds):
        rep, _ = small_time_ratios(cfg, seed)
        s = rep.sup_sqrt_t
        ratios = s[1:] / s[:-1]
        print(f"{seed:4d}  " + "  ".join(f"{v:11.4e}" for v in s) + "  " + " ".join(f"{x:.4f}" for x in ratios))
    print(f"t floor = {rep.t_floor:.3e}; t**0.3 would give ratio {2 ** -0.3:.4f}")
    print("exponent estimate from last seed:", np.round(-np.log2(ratios), 3))


if __name__ == "__main__":
    main()
