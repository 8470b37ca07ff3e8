"""Collision gallery: limit ideals of the preset curves and their convergence.

Writes one CSV row per (preset, t) with the distance from L(t) to the limit,
then prints a summary table.

    python scripts/run_gallery.py [--out gallery.csv] [--order 3]
"""

import argparse
import csv
import sys

from smooth_ideals.limits import collision_gallery, default_schedule


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="gallery.csv")
    ap.add_argument("--order", type=int, default=3)
    ap.add_argument("--samples", type=int, default=9, help="schedule length, 0.1 * 2^-k")
    args = ap.parse_args(argv)

    entries = collision_gallery(default_schedule(n=args.samples), args.order)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["preset", "t", "distance"])
        for e in entries:
            for t, dist in e.report.samples:
                w.writerow([e.preset.name, format(t, ".17g"), format(dist, ".17g")])

    print(f"{'preset':<22}{'certified':<11}{'expected dist':<15}local type")
    for e in entries:
        local = ", ".join(f"({', '.join(f'{v:.3g}' for v in c['point'])}) dim {c['dimension']} nil {c['nilpotency']}" for c in e.local_type)
        print(f"{e.preset.name:<22}{str(e.report.certified):<11}{e.expected_distance:<15.2e}{local}")
    print(f"samples written to {args.out}")
    return 0 if all(e.report.certified for e in entries) else 3


if __name__ == "__main__":
    sys.exit(main())
