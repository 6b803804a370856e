"""Candidate table, width scenarios and the index-bound check on a near-round ellipsoid.

Usage: python scripts/ellipsoid_counterexample.py [--surface 0.95,1,1.05]
"""
import argparse

from widthlab.lab import counterexample_report, width_assignment
from widthlab.spectral import candidate_table
from widthlab.surface import EllipsoidParams


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--surface", default="0.95,1,1.05")
    args = p.parse_args()
    E = EllipsoidParams.parse(args.surface)
    T = candidate_table(E)
    print(f"surface {E}; principal lengths " + ", ".join(f"{x:.6f}" for x in T.lengths))
    print(f"{'label':<5} {'mass':>10} {'index':>5} {'null':>4}  source")
    for r in T.rows:
        print(f"{r.label:<5} {r.mass:10.6f} {r.index:>5} {r.nullity:>4}  {r.index_source}")
    print("flags:", ", ".join(f"{k}={v}" for k, v in T.flags.items()))
    a = width_assignment(E, T)
    rep = counterexample_report(E, a)
    for s in rep["scenarios"]:
        w = s["witness"]
        where = f"{w['label']} at k={w['k']} has index+nullity {w['index'] + w['nullity']}" if w else "none"
        print(f"omit {s['omitted']:<3} [{s['group']}] witness: {where}")
    print("verdict:", rep["verdict"])


if __name__ == "__main__":
    main()
