"""Exploratory sup-mass scans over spherical harmonics of degree <= d on the round sphere.

For each d the family is all harmonic polynomials of degree at most d, of
dimension (d + 1)^2. The scan reports its sup mass in units of 2 pi.
Nothing here is gating.

Usage: python scripts/harmonic_scan.py [--degrees 1,2,3] [--budget N]
"""
import argparse
import time

import numpy as np

from widthlab.lab import parse_families
from widthlab.sweepouts import harmonic_family, sup_mass_scan


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--degrees", default="1,2,3")
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    print(f"{'d':>2} {'dim':>4} {'sup mass':>10} {'/ 2 pi':>7} {'time':>6}")
    for d in parse_families(args.degrees):
        F = harmonic_family(d)
        t = time.perf_counter()
        res = sup_mass_scan(F, args.budget, args.seed)
        dt = time.perf_counter() - t
        print(f"{d:>2} {F.dimension:>4} {res.sup_mass:10.5f} {res.sup_mass / (2 * np.pi):7.3f} {dt:5.1f}s")


if __name__ == "__main__":
    main()
