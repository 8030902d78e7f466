"""Print m, M and M/m for every sharp claim on the standard |x| grid."""

import argparse

from hyperballs.radii import CLAIMS, SHARP_CLAIMS, q_threshold


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r", type=float, default=0.5, help="radius (scaled into the validity range for q claims)")
    args = ap.parse_args()
    print(f"{'claim':8} {'|x|':>5} {'r':>10} {'m':>12} {'M':>12} {'M/m':>9}")
    for name in SHARP_CLAIMS:
        c = CLAIMS[name]
        for ax in (0.0, 0.2, 0.4, 0.6, 0.8):
            r = min(args.r, 0.9 * q_threshold(ax)) if c.needs_r0 else args.r
            b = c.radii(ax, r)
            print(f"{name:8} {ax:5.1f} {r:10.6f} {b.m:12.8f} {b.M:12.8f} {b.ratio:9.6f}")


if __name__ == "__main__":
    main()
