"""Command-line driver.

Exit codes: 0 success, 1 input error, 2 numerical failure, 3 certification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from .errors import CertificationFailure, InputError, NumericalFailure
from .idealspace import (
    IdealPoint,
    Subspace,
    Tolerances,
    Transversal,
    injectivity_probe,
    local_dimensions,
    membership_oracle,
    monomial_transversal,
    primary_decomposition,
    quotient_algebra,
    wspec_from_algebra,
)
from .kergin import build_interpolator
from .limits import ConfigCurve, collision_gallery, default_schedule, limit_ideal
from .polycalc import Polynomial, jet
from .selftest import SUITES, run_selftest
from .spectrum import WeightedConfig

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL, EXIT_CERTIFICATION = 0, 1, 2, 3


class Output:
    """Command result: a JSON document, CSV rows and an exit status."""

    def __init__(self, doc, header=None, rows=None, status=EXIT_OK, text=None):
        self.doc, self.header, self.rows, self.status, self.text = doc, header, rows, status, text


def _g(x) -> str:
    return format(float(x), ".17g") if isinstance(x, (float, np.floating)) else str(x)


def render(out: Output, fmt: str) -> str:
    if fmt == "csv":
        if out.rows is None:
            raise InputError("this command has no CSV form")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(out.header)
        for row in out.rows:
            w.writerow([_g(v) for v in row])
        return buf.getvalue()
    if fmt == "text" and out.text is not None:
        return out.text
    return json.dumps(out.doc, indent=2, sort_keys=True) + "\n"


def load_input(source: str | None):
    """Inline JSON, ``-`` for stdin, or a file path."""
    if source is None:
        raise InputError("this command needs an input document")
    if source == "-":
        text = sys.stdin.read()
    elif source.lstrip()[:1] in "{[":
        text = source
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {source}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _field(obj, key):
    try:
        return obj[key]
    except (KeyError, TypeError) as exc:
        raise InputError(f"missing field {key!r}") from exc


def _ideal_point(obj) -> IdealPoint:
    """IdealPoint schema, or ``{"config", "transversal", "polys": [...]}`` spanning ``L``."""
    if "polys" in obj:
        F = Transversal.from_json(_field(obj, "transversal"))
        L = Subspace.of_polynomials(F, [Polynomial.from_json(p) for p in obj["polys"]])
        return IdealPoint(WeightedConfig.from_json(_field(obj, "config")), L)
    return IdealPoint.from_json(obj)


def tolerances(args) -> Tolerances:
    return Tolerances(rank=args.tol_rank, angle=args.tol_angle, residual=args.tol_residual,
                      cluster_radius=args.cluster_radius, cond_max=args.cond_max)


def cmd_interp(args) -> Output:
    obj = load_input(args.input)
    f = Polynomial.from_json(_field(obj, "f"))
    Y = obj.get("tuples") or WeightedConfig.from_json(_field(obj, "Y"))
    basis = [Polynomial.from_json(p) for p in obj["D"]] if "D" in obj else None
    A = build_interpolator(Y, basis, cond_max=args.cond_max)
    Af = A(f)
    g = f - Af
    # Kergin tuples give a configuration of unit weights, so only values are checked
    residuals = [{"point": list(y), "weight": k, "residual": jet(g, y, k - 1).max_abs()} for y, k in A.config.clusters]
    doc = {"A": Af.to_json(), "condition_number": A.condition_number, "jet_residuals": residuals}
    rows = [(" ".join(map(str, a)), c) for a, c in Af.terms()]
    return Output(doc, ["alpha", "c"], rows)


def cmd_member(args) -> Output:
    tol = tolerances(args)
    P = _ideal_point(load_input(args.input))
    v = membership_oracle(P.transversal, P.config, P.subspace, tol)
    doc = {
        "status": "Certified" if v else "Rejected",
        "reason": v.reason,
        "containment_angle": v.containment_angle,
        "closure_residual": v.closure_residual,
        "worst_pair": list(v.worst_pair) if v.worst_pair else None,
    }
    if args.plucker:
        basis = P.transversal.basis
        doc["plucker"] = [{"rows": [list(basis[i]) for i in rows], "value": val}
                          for rows, val in P.subspace.plucker().items() if abs(val) > 1e-14]
    rows = [(doc["status"], v.containment_angle, v.closure_residual)]
    return Output(doc, ["status", "containment_angle", "closure_residual"], rows,
                  EXIT_OK if v else EXIT_CERTIFICATION)


def _certified(P: IdealPoint, tol: Tolerances) -> IdealPoint:
    if not membership_oracle(P.transversal, P.config, P.subspace, tol):
        raise CertificationFailure("input does not represent an ideal (membership oracle rejects it)")
    return IdealPoint(P.config, P.subspace, True)


def cmd_wspec(args) -> Output:
    tol = tolerances(args)
    P = _certified(_ideal_point(load_input(args.input)), tol)
    Q = quotient_algebra(P.transversal, P, tol)
    Y = wspec_from_algebra(Q, tol)
    doc = {"config": Y.to_json(), "local_type": local_dimensions(Q, tol)}
    rows = [(*p, w) for p, w in Y.clusters]
    return Output(doc, [f"x{j}" for j in range(Y.dim)] + ["weight"], rows)


def cmd_decompose(args) -> Output:
    tol = tolerances(args)
    P = _certified(_ideal_point(load_input(args.input)), tol)
    parts = primary_decomposition(P.transversal, P, tol)
    status = EXIT_OK if all(p.certified for p in parts) else EXIT_CERTIFICATION
    rows = [(*p.config.points[0], p.degree, p.certified) for p in parts]
    return Output([p.to_json() for p in parts], [f"x{j}" for j in range(P.config.dim)] + ["weight", "certified"],
                  rows, status)


def cmd_limit(args) -> Output:
    obj = load_input(args.input)
    curve = ConfigCurve.from_json(obj["curve"] if "curve" in obj else obj)
    F = Transversal.from_json(obj["transversal"]) if "transversal" in obj else monomial_transversal(curve.m, curve.d + 1)
    report = limit_ideal(F, curve, args.schedule, args.order, tolerances(args))
    return Output(report.to_json(), ["t", "distance"], report.rows(),
                  EXIT_OK if report.certified else EXIT_CERTIFICATION)


def cmd_gallery(args) -> Output:
    entries = collision_gallery(args.schedule, args.order, tolerances(args))
    rows = [(e.preset.name, e.report.certified, e.expected_distance,
             " ".join(f"{t['dimension']}/{t['nilpotency']}" for t in e.local_type)) for e in entries]
    status = EXIT_OK if all(e.report.certified for e in entries) else EXIT_CERTIFICATION
    return Output([e.to_json() for e in entries], ["name", "certified", "expected_distance", "dimension/nilpotency"],
                  rows, status)


def cmd_probe(args) -> Output:
    F = monomial_transversal(args.m, args.deg if args.deg is not None else args.d + 1)
    r = injectivity_probe(F, args.d, args.samples, args.seed, tolerances(args))
    doc = {"passed": r.passed, "pairs": r.pairs, "equal_spectrum_pairs": r.equal_spectrum_pairs,
           "min_separation": r.min_separation if np.isfinite(r.min_separation) else None,
           "transversal_for_d_plus_1": r.transversal_ok}
    return Output(doc, list(doc), [tuple(doc.values())])


def cmd_selftest(args) -> Output:
    start = time.perf_counter()
    results, _ = run_selftest(args.seed, args.only, tolerances(args))
    print(f"selftest finished in {time.perf_counter() - start:.1f} s", file=sys.stderr)
    doc = [{"suite": r.name, "passed": r.passed, "cases": r.cases, "worst": r.worst, "detail": r.detail}
           for r in results]
    rows = [(r.name, r.passed, r.cases, json.dumps(r.worst, sort_keys=True)) for r in results]
    text = "\n".join(r.line() for r in results) + "\n"
    status = EXIT_OK if all(r.passed for r in results) else EXIT_CERTIFICATION
    return Output(doc, ["suite", "passed", "cases", "worst"], rows, status, text)


def _schedule(text: str) -> list[float]:
    try:
        ts = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad schedule {text!r}") from exc
    return ts


def build_parser() -> argparse.ArgumentParser:
    defaults = Tolerances()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol-rank", type=float, default=defaults.rank)
    common.add_argument("--tol-angle", type=float, default=defaults.angle)
    common.add_argument("--tol-residual", type=float, default=defaults.residual)
    common.add_argument("--cluster-radius", type=float, default=defaults.cluster_radius)
    common.add_argument("--cond-max", type=float, default=defaults.cond_max)
    common.add_argument("--schedule", type=_schedule, default=None,
                        help=f"comma-separated decreasing t values (default {default_schedule()[0]}*2^-k, k=0..8)")
    common.add_argument("--order", type=int, default=3, help="extrapolation order")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=["json", "csv", "text"], default="json")

    p = argparse.ArgumentParser(prog="smooth-ideals", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn, needs_input, help_ in [
        ("interp", cmd_interp, True, "interpolate f at a weighted configuration"),
        ("member", cmd_member, True, "run the membership oracle on (Y, L)"),
        ("wspec", cmd_wspec, True, "weighted spectrum from the quotient algebra"),
        ("decompose", cmd_decompose, True, "primary decomposition"),
        ("limit", cmd_limit, True, "limit ideal of a colliding curve"),
        ("gallery", cmd_gallery, False, "preset collision limits"),
        ("probe-injectivity", cmd_probe, False, "sample pairs of distinct ideals"),
        ("selftest", cmd_selftest, False, "run the invariant suites"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=help_)
        if needs_input:
            sp.add_argument("input", help="JSON file, inline JSON, or - for stdin")
        sp.set_defaults(func=fn)
        if name == "probe-injectivity":
            sp.add_argument("--m", type=int, default=2)
            sp.add_argument("--d", type=int, default=2)
            sp.add_argument("--deg", type=int, default=None, help="degree bound of F (default d+1)")
            sp.add_argument("--samples", type=int, default=500)
        if name == "member":
            sp.add_argument("--plucker", action="store_true", help="include Plücker coordinates of L (dim L <= 6)")
        if name == "selftest":
            sp.add_argument("--only", nargs="*", choices=list(SUITES), default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
        text = render(out, args.format)
    except (InputError, KeyError, TypeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalFailure as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CertificationFailure as exc:
        print(f"certification failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return out.status


if __name__ == "__main__":
    sys.exit(main())
