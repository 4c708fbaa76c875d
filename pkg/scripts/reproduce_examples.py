"""Recompute masses, multipliers and residuals for the named configurations."""

import argparse

from trapcc.ccsystem import evaluate, potential_inertia
from trapcc.geometry import height
from trapcc.golden import GOLDEN_RATIOS, NAMES, golden


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("names", nargs="*", default=list(NAMES))
    args = parser.parse_args()
    for name in args.names:
        r = golden(name)
        sol = evaluate(r)
        m = sol.masses
        u, i = potential_inertia(r, m)
        print(f"== {name}  ({sol.shape.tag.value}, in_omega={sol.in_omega}, h={height(r):.15g})")
        print(f"   masses   " + "  ".join(f"m{k}={v:.17g}" for k, v in enumerate(m.as_tuple(), 1)))
        print(f"   ratios   m1/m2={m.m1 / m.m2:.17g}  m1/m4={m.m1 / m.m4:.17g}")
        if name in GOLDEN_RATIOS:
            want = GOLDEN_RATIOS[name]
            print(f"   stored   m1/m2={want[0]}  m1/m4={want[1]}")
        print(f"   lambda={sol.multipliers.lam:.17g}  sigma={sol.multipliers.sigma:.17g}")
        print(f"   U={u:.17g}  I={i:.17g}")
        print("   residuals " + "  ".join(f"{k}={v:.1e}" for k, v in sol.residuals.items()))


if __name__ == "__main__":
    main()
