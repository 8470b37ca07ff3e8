"""Randomised invariant suites shared by the CLI self-test and the test-suite."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .idealspace import (
    DEFAULT_TOL,
    Tolerances,
    change_transversal_restrict,
    change_transversal_section,
    cluster_vanishing,
    curvilinear_cluster,
    ideal_from_clusters,
    ideal_from_points,
    injectivity_probe,
    membership_oracle,
    monomial_transversal,
    perturb_subspace,
    primary_decomposition,
    quotient_algebra,
    random_cluster,
    random_ideal_point,
    random_points,
    subspace_distance,
    wspec_from_algebra,
    _random_composition,
)
from .kergin import boundary_identity_residual, build_interpolator, newton_expansion
from .limits import collision_gallery, subspace_at
from .oracles import hermite_interpolant, taylor_truncation
from .polycalc import AffineSimplex, Polynomial, jet, random_polynomial
from .spectrum import WeightedConfig


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    cases: int
    worst: dict  # metric name -> worst observed value
    detail: str = ""

    def line(self) -> str:
        metrics = ", ".join(f"{k}={v:.3g}" for k, v in self.worst.items())
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<14} cases={self.cases:<4} {metrics}" + (
            f"  [{self.detail}]" if self.detail else ""
        )


def _scale(p: Polynomial) -> float:
    return max(1.0, max((abs(c) for _, c in p.terms()), default=0.0))


def random_config(rng: np.random.Generator, m: int, d: int, min_sep: float = 0.3) -> WeightedConfig:
    weights = _random_composition(rng, d)
    return WeightedConfig.from_points(random_points(rng, m, len(weights), min_sep), weights)


def suite_identities(rng: np.random.Generator, cases: int = 200) -> SuiteResult:
    worst_b = worst_n = 0.0
    for _ in range(cases):
        m = int(rng.integers(1, 4))
        f = random_polynomial(rng, m, int(rng.integers(0, 7)))
        r = int(rng.integers(1, 5))
        verts = rng.uniform(-1, 1, size=(r + 1, m))
        if rng.random() < 0.3:  # confluent vertices are legal
            verts[rng.integers(0, r + 1)] = verts[0]
        i, j = rng.choice(r + 1, size=2, replace=False)
        vecs = rng.standard_normal((r - 1, m))
        worst_b = max(worst_b, boundary_identity_residual(f, verts, int(i), int(j), list(vecs)) / _scale(f))
        worst_n = max(worst_n, abs(newton_expansion(f, verts) - f(verts[-1])) / _scale(f))
    ok = worst_b < 1e-9 and worst_n < 1e-9
    return SuiteResult("identities", ok, cases, {"boundary": worst_b, "newton": worst_n})


def suite_interpolation(rng: np.random.Generator, cases: int = 100) -> SuiteResult:
    worst_jet = worst_proj = worst_perm = 0.0
    for _ in range(cases):
        m = int(rng.integers(1, 3))
        d = int(rng.integers(1, 7))
        Y = random_config(rng, m, d)
        f = random_polynomial(rng, m, d + 2)
        A = build_interpolator(Y)
        Af = A(f)
        s = _scale(f)
        g = f - Af
        worst_jet = max(worst_jet, max(jet(g, y, k - 1).max_abs() for y, k in Y.clusters) / s)
        # idempotence is relative to the size of A(f); basis elements are reproduced outright
        worst_proj = max(worst_proj, A(Af).max_abs_diff(Af) / max(s, _scale(Af)))
        worst_proj = max(worst_proj, max(A(b).max_abs_diff(b) for b in A.basis))
        # Kergin tuples: distinct points scattered around each cluster centre, then reordered
        tuples = [[np.asarray(y) + rng.uniform(-0.1, 0.1, m) for _ in range(k)] for y, k in Y.clusters]
        B = build_interpolator(tuples)
        shuffled = [[t[i] for i in rng.permutation(len(t))] for t in tuples]
        shuffled = [shuffled[i] for i in rng.permutation(len(shuffled))]
        C = build_interpolator(shuffled, basis=B.basis)
        Bf = B(f)
        worst_perm = max(worst_perm, Bf.max_abs_diff(C(f)) / max(s, _scale(Bf)))
    ok = worst_jet < 1e-8 and worst_proj < 1e-9 and worst_perm < 1e-9
    return SuiteResult("interpolation", ok, cases, {"jet": worst_jet, "projector": worst_proj, "order": worst_perm})


def suite_classical(rng: np.random.Generator, cases: int = 100) -> SuiteResult:
    worst_h = worst_t = 0.0
    for _ in range(cases):
        d = int(rng.integers(1, 7))
        Y = random_config(rng, 1, d)
        f = random_polynomial(rng, 1, d + 3)
        ref = Polynomial.from_vector([(n,) for n in range(d)], hermite_interpolant(
            [p[0] for p in Y.points], Y.weights, f))
        worst_h = max(worst_h, build_interpolator(Y)(f).max_abs_diff(ref) / _scale(f))
        m = int(rng.integers(1, 3))
        k = int(rng.integers(1, 5))
        y = rng.uniform(-1, 1, m)
        g = random_polynomial(rng, m, k + 2)
        A = build_interpolator(WeightedConfig.from_points([y], [k]))
        worst_t = max(worst_t, A(g).max_abs_diff(taylor_truncation(g, y, k - 1)) / _scale(g))
    ok = worst_h < 1e-9 and worst_t < 1e-12
    return SuiteResult("classical", ok, cases, {"hermite": worst_h, "taylor": worst_t})


def constructed_ideal(rng: np.random.Generator, kind: int, tol: Tolerances = DEFAULT_TOL):
    """Ideal point from one of the three constructors, with its transversal."""
    m = int(rng.integers(1, 3))
    d = int(rng.integers(1, 6))
    F = monomial_transversal(m, d + 1)
    if kind == 0:
        return F, ideal_from_points(F, random_points(rng, m, d), tol)
    if kind == 1:
        weights = _random_composition(rng, d)
        pts = random_points(rng, m, len(weights))
        return F, ideal_from_clusters(F, [random_cluster(F, y, k, rng, tol)[:2] for y, k in zip(pts, weights)], tol)
    return F, random_ideal_point(F, d, rng, tol=tol)


def suite_oracle(rng: np.random.Generator, cases: int = 200, tol: Tolerances = DEFAULT_TOL) -> SuiteResult:
    accepted = rejected = 0
    worst_accept = 0.0
    for n in range(cases):
        F, P = constructed_ideal(rng, n % 3, tol)
        verdict = membership_oracle(F, P.config, P.subspace, tol)
        accepted += bool(verdict) and P.certified
        worst_accept = max(worst_accept, verdict.closure_residual, verdict.containment_angle)
        if P.subspace.dim == 0:
            F = monomial_transversal(F.m, F.max_degree + 1)
            P = change_transversal_section(F, P, tol)
        theta = float(10 ** rng.uniform(-3, 0))
        bad = perturb_subspace(F, P.config, P.subspace, theta, rng)
        rejected += not membership_oracle(F, P.config, bad, tol)
    ok = accepted == cases and rejected == cases
    return SuiteResult("oracle", ok, cases, {"accept_residual": worst_accept},
                       f"certified {accepted}/{cases}, rejected {rejected}/{cases}")


def suite_algebra(rng: np.random.Generator, cases: int = 100, tol: Tolerances = DEFAULT_TOL) -> SuiteResult:
    worst = dict(commutativity=0.0, associativity=0.0, unit=0.0, homomorphism=0.0, wspec=0.0, roundtrip=0.0)
    weight_ok = True
    for _ in range(cases):
        m = int(rng.integers(1, 3))
        d = int(rng.integers(1, 6))
        F = monomial_transversal(m, d + 1)
        P = random_ideal_point(F, d, rng, tol=tol)
        Q = quotient_algebra(F, P, tol)
        worst["commutativity"] = max(worst["commutativity"], Q.commutativity_residual())
        worst["associativity"] = max(worst["associativity"], Q.associativity_residual())
        worst["unit"] = max(worst["unit"], Q.unit_residual())
        f, g = random_polynomial(rng, m, d), random_polynomial(rng, m, d)
        hom = np.abs(Q.multiply(Q.reduce(f), Q.reduce(g)) - Q.reduce(f * g)).max() / (_scale(f) * _scale(g))
        worst["homomorphism"] = max(worst["homomorphism"], float(hom))
        worst["wspec"] = max(worst["wspec"], wspec_from_algebra(Q, tol).distance(P.config))
        parts = primary_decomposition(F, P, tol)
        weight_ok &= sum(p.degree for p in parts) == d and all(p.certified for p in parts)
        if len(parts) > 1:
            R = ideal_from_clusters(F, [(p.config.points[0], p.subspace) for p in parts], tol)
            worst["roundtrip"] = max(worst["roundtrip"], subspace_distance(R.subspace, P.subspace))
    limits = dict(associativity=1e-8, unit=1e-8, homomorphism=1e-8, wspec=1e-7, roundtrip=1e-8)
    failed = [k for k, v in limits.items() if not worst[k] < v]
    if worst["commutativity"] != 0.0:
        failed.append("commutativity")
    if not weight_ok:
        failed.append("decomposition weights")
    return SuiteResult("algebra", not failed, cases, worst, "failed: " + ", ".join(failed) if failed else "")


def suite_transversal(rng: np.random.Generator, cases: int = 100, tol: Tolerances = DEFAULT_TOL) -> SuiteResult:
    worst_rs = worst_sr = 0.0
    for _ in range(cases):
        m = int(rng.integers(1, 3))
        d = int(rng.integers(1, 6))
        F, Fp = monomial_transversal(m, d + 1), monomial_transversal(m, d + 2)
        P = random_ideal_point(F, d, rng, tol=tol)
        worst_rs = max(worst_rs, subspace_distance(
            change_transversal_restrict(F, change_transversal_section(Fp, P, tol), tol).subspace, P.subspace))
        Pp = random_ideal_point(Fp, d, rng, tol=tol)
        worst_sr = max(worst_sr, subspace_distance(
            change_transversal_section(Fp, change_transversal_restrict(F, Pp, tol), tol).subspace, Pp.subspace))
    return SuiteResult("transversal", worst_rs < 1e-9 and worst_sr < 1e-9, cases,
                       {"restrict_section": worst_rs, "section_restrict": worst_sr})


def suite_limits(rng: np.random.Generator, tol: Tolerances = DEFAULT_TOL) -> SuiteResult:
    entries = collision_gallery(tol=tol)
    certified = all(e.report.certified for e in entries)
    direct = max(subspace_distance(subspace_at(e.preset.transversal, e.preset.curve, 1e-6), e.report.limit.subspace)
                 for e in entries)
    expected = max(e.expected_distance for e in entries)
    named = {e.preset.name: e.expected_distance for e in entries}
    ok = certified and direct < 1e-5 and expected < 1e-6 and max(
        named["collinear-triple"], named["noncollinear-triple"]) < 1e-6
    return SuiteResult("limits", ok, len(entries), {"direct_t=1e-6": direct, "expected": expected},
                       "all certified" if certified else "uncertified limit")


def suite_injectivity(rng: np.random.Generator, pairs: int = 500, tol: Tolerances = DEFAULT_TOL) -> SuiteResult:
    F = monomial_transversal(2, 4)
    try:
        report = injectivity_probe(F, 3, pairs, rng, tol)
    except Exception as exc:  # witness of failure
        return SuiteResult("injectivity", False, pairs, {}, f"{type(exc).__name__}: {exc}")
    return SuiteResult("injectivity", report.passed and report.min_separation > 1e-8, pairs,
                       {"min_separation": report.min_separation},
                       f"{report.equal_spectrum_pairs} pairs shared a spectrum")


SUITES: dict[str, Callable] = {
    "identities": suite_identities,
    "interpolation": suite_interpolation,
    "classical": suite_classical,
    "oracle": suite_oracle,
    "algebra": suite_algebra,
    "transversal": suite_transversal,
    "limits": suite_limits,
    "injectivity": suite_injectivity,
}


def run_selftest(seed: int = 0, only: list[str] | None = None, tol: Tolerances = DEFAULT_TOL
                 ) -> tuple[list[SuiteResult], dict[str, float]]:
    """Run the suites with independent streams derived from ``seed``.

    Returns the results and per-suite wall-clock seconds (kept apart so the
    results themselves are reproducible).
    """
    names = list(SUITES) if only is None else only
    streams = np.random.SeedSequence(seed).spawn(len(SUITES))
    results, timings = [], {}
    for name, ss in zip(SUITES, streams):
        if name not in names:
            continue
        rng = np.random.default_rng(ss)
        start = time.perf_counter()
        fn = SUITES[name]
        res = fn(rng, tol=tol) if "tol" in fn.__code__.co_varnames else fn(rng)
        timings[name] = time.perf_counter() - start
        results.append(res)
    return results, timings
