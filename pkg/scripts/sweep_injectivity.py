"""Injectivity probe over a grid of (m, d) and transversal degrees.

For each setting, sample pairs of distinct ideal points and record the
smallest subspace separation among pairs that share a spectrum.  The
degree bound ``deg = d`` is included on purpose: there ``F`` is not
transverse to codimension ``d + 1`` ideals and ``L`` alone carries nothing.

    python scripts/sweep_injectivity.py [--samples 200] [--seed 0]
"""

import argparse
import sys

from smooth_ideals.errors import IdealSpaceError
from smooth_ideals.idealspace import injectivity_probe, monomial_transversal


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-d", type=int, default=4)
    args = ap.parse_args(argv)

    print(f"{'m':>2} {'d':>2} {'deg<':>4}  {'passed':<7}{'shared':>7}  {'min sep':<10}transverse(d+1)")
    failures = 0
    for m in (1, 2):
        for d in range(1, args.max_d + 1):
            for deg in (d, d + 1, d + 2):
                try:
                    r = injectivity_probe(monomial_transversal(m, deg), d, args.samples, args.seed)
                except IdealSpaceError as exc:
                    failures += 1
                    print(f"{m:>2} {d:>2} {deg:>4}  error: {type(exc).__name__}: {exc}")
                    continue
                failures += not r.passed
                print(f"{m:>2} {d:>2} {deg:>4}  {str(r.passed):<7}{r.equal_spectrum_pairs:>7}  "
                      f"{r.min_separation:<10.3g}{r.transversal_ok}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
