"""Run the self-test suites under many seeds and tabulate failures.

    python scripts/seed_sweep.py --seeds 0-24 [--only interpolation algebra]
"""

import argparse
import json
import sys
import time

from smooth_ideals.selftest import SUITES, run_selftest


def seed_range(text):
    lo, _, hi = text.partition("-")
    return range(int(lo), int(hi or lo) + 1)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=seed_range, default=range(5))
    ap.add_argument("--only", nargs="*", choices=list(SUITES))
    ap.add_argument("--json", help="dump every result here")
    args = ap.parse_args(argv)

    rows, failed = [], 0
    for seed in args.seeds:
        start = time.perf_counter()
        try:
            results, _ = run_selftest(seed, args.only)
        except Exception as exc:  # a crash is a finding too
            failed += 1
            print(f"seed {seed:>3}: ERROR {type(exc).__name__}: {exc}")
            continue
        bad = [r for r in results if not r.passed]
        failed += bool(bad)
        print(f"seed {seed:>3}: {'ok  ' if not bad else 'FAIL'} {time.perf_counter() - start:5.1f} s")
        for r in bad:
            print("          " + r.line())
        rows += [{"seed": seed, "suite": r.name, "passed": r.passed, "worst": r.worst} for r in results]
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)
    print(f"{failed} of {len(args.seeds)} seeds with a failing suite")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
