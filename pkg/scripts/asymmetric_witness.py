"""Solve for the m1 = m2 trapezoid of height 7 and write its vertices for plotting.

The solution has equal base masses but unequal legs, so equal masses on one
base do not force an isosceles shape.
"""

import argparse
import csv

from trapcc.geometry import embed, height
from trapcc.golden import golden
from trapcc.solver import solve_equal_mass


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--init", type=float, nargs=2, default=(4.4, 7.6), metavar=("C", "D"))
    parser.add_argument("--height", type=float, default=7.0)
    parser.add_argument("--output", default="asymmetric_witness.csv")
    args = parser.parse_args()

    sol = solve_equal_mass((1, 2), tuple(args.init), 8.0, args.height)
    r, m = sol.distances, sol.masses
    ref = golden("E3")
    print("distances  " + "  ".join(f"{k}={v:.15g}" for k, v in r.to_dict().items()))
    print("masses     " + "  ".join(f"m{k}={v:.15g}" for k, v in enumerate(m.as_tuple(), 1)))
    print(f"legs r14={r.r14:.12g} vs r23={r.r23:.12g}; height {height(r):.12g}")
    dev = max(abs(getattr(r, k) - getattr(ref, k)) / getattr(ref, k) for k in r.to_dict())
    print(f"max relative deviation from stored E3: {dev:.2e}")

    emb = embed(r)
    with open(args.output, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("label", "x", "y", "mass"))
        for k, ((x, y), mass) in enumerate(zip(emb.points(), m.as_tuple()), 1):
            writer.writerow((f"p{k}", repr(float(x)), repr(float(y)), repr(mass)))
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
