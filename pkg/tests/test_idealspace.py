import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smooth_ideals.errors import (
    ClusterOracleFail,
    CodimMismatch,
    InjectivityWitnessFail,
    InputError,
    MergeToleranceViolation,
    TransversalityFail,
)
from smooth_ideals.idealspace import (
    IdealPoint,
    Subspace,
    change_transversal_restrict,
    change_transversal_section,
    cluster_vanishing,
    containment_angle,
    curvilinear_cluster,
    ideal_from_clusters,
    ideal_from_points,
    injectivity_probe,
    local_dimensions,
    membership_oracle,
    monomial_transversal,
    perturb_subspace,
    primary_decomposition,
    quotient_algebra,
    random_ideal_point,
    reduce_mod_ideal,
    subspace_distance,
    transversality_check,
    vanishing_subspace,
    wspec_from_algebra,
)
from smooth_ideals.polycalc import Polynomial
from smooth_ideals.spectrum import WeightedConfig

t = Polynomial.variable(1, 0)
x = Polynomial.variable(2, 0)
y = Polynomial.variable(2, 1)
one1 = Polynomial.constant(1, 1.0)


def Y(*pairs):
    return WeightedConfig.from_points([p for p, _ in pairs], [k for _, k in pairs])


def span(F, *polys):
    return Subspace.of_polynomials(F, list(polys))


def same_span(L1, L2, tol=1e-10):
    return L1.dim == L2.dim and subspace_distance(L1, L2) < tol


class TestTransversal:
    def test_enumeration(self):
        F = monomial_transversal(1, 3)
        assert F.basis == ((0,), (1,), (2,)) and F.r == 3
        assert monomial_transversal(2, 2).basis == ((0, 0), (1, 0), (0, 1))
        assert monomial_transversal(2, 3).r == math.comb(4, 2)

    def test_rejects_bad_degree(self):
        with pytest.raises(InputError):
            monomial_transversal(1, 0)

    def test_check_passes(self):
        assert transversality_check(monomial_transversal(1, 3), 2, rng=0).passed
        assert transversality_check(monomial_transversal(2, 3), 2, rng=0).passed

    def test_check_fails_on_dimension_count(self):
        with pytest.raises(TransversalityFail) as info:
            transversality_check(monomial_transversal(1, 2), 2, rng=0)
        assert info.value.witness.degree == 3

    def test_membership_needs_polynomials_inside(self):
        with pytest.raises(InputError):
            monomial_transversal(1, 2).vector(t**2)


class TestSubspaces:
    def test_distance_examples(self):
        F = monomial_transversal(1, 3)
        L = span(F, t)
        assert subspace_distance(L, L) == 0.0
        assert subspace_distance(span(F, t), span(F, t**2)) == pytest.approx(math.pi / 2)
        eps = 1e-3
        assert subspace_distance(span(F, t), span(F, t + eps * t**2)) == pytest.approx(math.atan(eps), abs=1e-9)

    def test_distance_is_symmetric(self):
        F = monomial_transversal(2, 3)
        rng = np.random.default_rng(0)
        A = Subspace.span(F, rng.standard_normal((6, 3)))
        B = Subspace.span(F, rng.standard_normal((6, 3)))
        assert subspace_distance(A, B) == pytest.approx(subspace_distance(B, A), abs=1e-14)

    def test_distance_dimension_mismatch(self):
        F = monomial_transversal(1, 3)
        with pytest.raises(InputError):
            subspace_distance(span(F, t), span(F, t, t**2))

    def test_frames_are_orthonormal(self):
        F = monomial_transversal(2, 4)
        L = vanishing_subspace(F, Y(((0.3, 0.1), 2), ((-1.0, 0.5), 1)))
        assert L.orthonormality_defect() < 1e-12
        assert L.complement().dim == L.codim == 4


class TestVanishingSubspace:
    def test_examples(self):
        F = monomial_transversal(1, 3)
        assert same_span(vanishing_subspace(F, Y(((0.0,), 1), ((1.0,), 1))), span(F, t**2 - t))
        assert same_span(vanishing_subspace(F, Y(((0.0,), 2))), span(F, t**2))
        G = monomial_transversal(2, 2)
        assert same_span(vanishing_subspace(G, Y(((0.0, 0.0), 1))), span(G, x, y))

    def test_rank_deficiency(self):
        with pytest.raises(TransversalityFail):
            vanishing_subspace(monomial_transversal(1, 2), Y(((0.0,), 3)))


class TestConstructors:
    def test_points(self):
        F = monomial_transversal(1, 3)
        P = ideal_from_points(F, [1.0, 2.0])
        assert P.certified
        assert same_span(P.subspace, span(F, (t - 1) * (t - 2)))
        Q = ideal_from_points(monomial_transversal(2, 2), [(0.5, 0.5)])
        assert Q.subspace.codim == 1 and Q.certified

    def test_duplicate_points(self):
        with pytest.raises(MergeToleranceViolation):
            ideal_from_points(monomial_transversal(1, 3), [1.0, 1.0])

    def test_immersion_rank(self):
        # finite-difference Jacobian of points -> projector has rank m*d
        F = monomial_transversal(2, 4)
        rng = np.random.default_rng(4)
        pts = rng.uniform(-1, 1, (3, 2))
        base = ideal_from_points(F, pts).subspace.projector().ravel()
        h = 1e-6
        cols = []
        for i in range(3):
            for j in range(2):
                q = pts.copy()
                q[i, j] += h
                cols.append((ideal_from_points(F, q).subspace.projector().ravel() - base) / h)
        s = np.linalg.svd(np.column_stack(cols), compute_uv=False)
        assert np.sum(s > 1e-6 * s[0]) == 6

    def test_curvilinear_cluster(self):
        F = monomial_transversal(2, 3)
        _, L = curvilinear_cluster(F, (0, 0), [(1, 0)], 2)
        P = ideal_from_clusters(F, [((0.0, 0.0), L)])
        assert P.certified and P.config.weights == [2]
        assert same_span(L, span(F, y, x**2, x * y, y**2))

    def test_two_unit_clusters_match_points(self):
        F = monomial_transversal(2, 3)
        a, b = (0.0, 1.0), (1.0, -0.5)
        clusters = [cluster_vanishing(F, a, 1), cluster_vanishing(F, b, 1)]
        assert same_span(ideal_from_clusters(F, clusters).subspace, ideal_from_points(F, [a, b]).subspace)

    def test_fat_point(self):
        F = monomial_transversal(2, 4)
        P = ideal_from_clusters(F, [cluster_vanishing(F, (0, 0), 3)])
        assert P.certified and P.subspace.codim == 3

    def test_cluster_rejected(self):
        F = monomial_transversal(2, 3)
        L = span(F, x + 0.3, x**2, x * y, y**2, y)  # does not vanish at the origin
        with pytest.raises(ClusterOracleFail):
            ideal_from_clusters(F, [((0.0, 0.0), L)])

    def test_codim_mismatch(self):
        F = monomial_transversal(1, 3)
        with pytest.raises(CodimMismatch):
            IdealPoint(Y(((0.0,), 2)), span(F, t, t**2))

    def test_json_round_trip(self):
        F = monomial_transversal(2, 3)
        P = random_ideal_point(F, 2, np.random.default_rng(1))
        Q = IdealPoint.from_json(P.to_json())
        assert np.array_equal(Q.subspace.frame, P.subspace.frame) and Q.config == P.config and Q.certified


class TestOracle:
    def test_double_point_line(self):
        F = monomial_transversal(1, 3)
        assert membership_oracle(F, Y(((0.0,), 2)), span(F, t**2))

    def test_containment_failure(self):
        F = monomial_transversal(1, 3)
        v = membership_oracle(F, Y(((0.0,), 2)), span(F, t**2 + t))
        assert not v and v.reason.startswith("containment")

    def test_closure_failure(self):
        # contains F ∩ m_0^2 but is not closed under multiplication: x * (1 + x) = x mod m_0^2
        F = monomial_transversal(2, 3)
        L = span(F, x**2, x * y, y**2, x + y)
        bad = span(F, x**2, x * y, y**2, 1 + x)
        v = membership_oracle(F, Y(((0.0, 0.0), 2)), L)
        assert v
        v = membership_oracle(F, Y(((0.0, 0.0), 2)), bad)
        assert not v and v.reason.startswith("closure") and v.worst_pair is not None

    def test_curvilinear(self):
        F = monomial_transversal(2, 3)
        L = span(F, y, x**2, x * y, y**2)
        assert membership_oracle(F, Y(((0.0, 0.0), 2)), L)

    def test_codimension_reported(self):
        F = monomial_transversal(1, 3)
        assert not membership_oracle(F, Y(((0.0,), 1)), span(F, t**2))

    def test_perturbations_rejected(self):
        rng = np.random.default_rng(7)
        F = monomial_transversal(2, 4)
        for _ in range(10):
            P = random_ideal_point(F, 3, rng)
            bad = perturb_subspace(F, P.config, P.subspace, 1e-3, rng)
            assert subspace_distance(bad, P.subspace) == pytest.approx(1e-3, rel=1e-6)
            assert not membership_oracle(F, P.config, bad)

    def test_containment_monotone(self):
        # m_Y with Y refining Y' : F ∩ m_Y ⊆ F ∩ m_Y'
        F = monomial_transversal(2, 4)
        big = ideal_from_points(F, [(0, 0), (1, 0), (0, 1)])
        small = ideal_from_points(F, [(0, 0), (1, 0)])
        assert containment_angle(big.subspace, small.subspace) < 1e-8


class TestAlgebra:
    def test_field(self):
        F = monomial_transversal(2, 2)
        Q = quotient_algebra(F, ideal_from_points(F, [(0.3, -0.2)]))
        assert Q.d == 1
        assert Q.unit_residual() < 1e-12
        assert Q.multiply(Q.unit, Q.unit) == pytest.approx(Q.unit)

    def test_dual_numbers(self):
        F = monomial_transversal(1, 3)
        Q = quotient_algebra(F, IdealPoint(Y(((0.0,), 2)), span(F, t**2), True))
        eps = reduce_mod_ideal(Q, t)
        assert np.abs(Q.multiply(eps, eps)).max() < 1e-10
        assert np.linalg.norm(eps) > 0.5

    def test_two_idempotents(self):
        F = monomial_transversal(1, 3)
        Q = quotient_algebra(F, ideal_from_points(F, [0.0, 1.0]))
        e = reduce_mod_ideal(Q, t)  # x is the idempotent for the point 1
        f = Q.unit - e
        assert np.abs(Q.multiply(e, e) - e).max() < 1e-10
        assert np.abs(Q.multiply(f, f) - f).max() < 1e-10
        assert np.abs(Q.multiply(e, f)).max() < 1e-10

    def test_reduce_examples(self):
        F = monomial_transversal(1, 3)
        Q = quotient_algebra(F, ideal_from_points(F, [1.0, 2.0]))
        assert np.abs(reduce_mod_ideal(Q, (t - 1) * (t - 2))).max() < 1e-12
        assert reduce_mod_ideal(Q, one1) == pytest.approx(Q.unit)

    def test_wspec_examples(self):
        F = monomial_transversal(1, 3)
        Q = quotient_algebra(F, ideal_from_points(F, [1.0, 2.0]))
        assert wspec_from_algebra(Q).matches(Y(((1.0,), 1), ((2.0,), 1)))
        Q = quotient_algebra(F, IdealPoint(Y(((0.0,), 2)), span(F, t**2), True))
        assert wspec_from_algebra(Q).matches(Y(((0.0,), 2)))
        G = monomial_transversal(2, 3)
        P = ideal_from_clusters(G, [curvilinear_cluster(G, (0, 0), [(1, 1)], 2)])
        Q = quotient_algebra(G, P)
        assert wspec_from_algebra(Q).matches(Y(((0.0, 0.0), 2)))
        Mx = Q.mult_matrix(Q.reduce(x))
        assert np.abs(Mx @ Mx).max() < 1e-10

    def test_local_type(self):
        F = monomial_transversal(2, 4)
        P = ideal_from_clusters(F, [cluster_vanishing(F, (0, 0), 3)])
        assert local_dimensions(quotient_algebra(F, P)) == [{"point": [0.0, 0.0], "dimension": 3, "nilpotency": 2}]

    def test_decomposition_examples(self):
        F = monomial_transversal(1, 3)
        P = ideal_from_points(F, [0.0, 1.0])
        parts = primary_decomposition(F, P)
        assert [p.config.points[0][0] for p in parts] == [0.0, 1.0]
        assert same_span(parts[0].subspace, span(F, t, t**2), 1e-9)
        assert same_span(parts[1].subspace, span(F, t - 1, t**2 - 1), 1e-9)
        single = IdealPoint(Y(((0.0,), 2)), span(F, t**2), True)
        assert primary_decomposition(F, single) == [single]

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 2), st.integers(1, 5))
    def test_algebra_invariants(self, seed, m, d):
        rng = np.random.default_rng(seed)
        F = monomial_transversal(m, d + 1)
        P = random_ideal_point(F, d, rng)
        Q = quotient_algebra(F, P)
        assert Q.commutativity_residual() == 0.0
        assert Q.associativity_residual() < 1e-8
        assert Q.unit_residual() < 1e-8
        assert wspec_from_algebra(Q).distance(P.config) < 1e-7
        parts = primary_decomposition(F, P)
        assert sum(p.degree for p in parts) == d
        if len(parts) > 1:
            R = ideal_from_clusters(F, [(p.config.points[0], p.subspace) for p in parts])
            assert subspace_distance(R.subspace, P.subspace) < 1e-8


class TestTransversalChange:
    def test_restrict_points(self):
        F, Fp = monomial_transversal(2, 3), monomial_transversal(2, 4)
        pts = [(0, 0), (1, 0.5)]
        R = change_transversal_restrict(F, ideal_from_points(Fp, pts))
        assert R.certified and same_span(R.subspace, ideal_from_points(F, pts).subspace, 1e-9)

    def test_identity(self):
        F = monomial_transversal(1, 3)
        P = ideal_from_points(F, [0.0, 2.0])
        assert change_transversal_restrict(F, P) is P
        assert change_transversal_section(F, P) is P

    def test_section_points(self):
        F, Fp = monomial_transversal(1, 3), monomial_transversal(1, 5)
        pts = [0.25, -1.0]
        S = change_transversal_section(Fp, ideal_from_points(F, pts))
        assert S.certified and same_span(S.subspace, ideal_from_points(Fp, pts).subspace, 1e-9)

    def test_wrong_direction(self):
        F, Fp = monomial_transversal(1, 3), monomial_transversal(1, 4)
        with pytest.raises(InputError):
            change_transversal_restrict(Fp, ideal_from_points(F, [0.0]))

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 2), st.integers(1, 4))
    def test_round_trips(self, seed, m, d):
        rng = np.random.default_rng(seed)
        F, Fp = monomial_transversal(m, d + 1), monomial_transversal(m, d + 2)
        P = random_ideal_point(F, d, rng)
        back = change_transversal_restrict(F, change_transversal_section(Fp, P))
        assert subspace_distance(back.subspace, P.subspace) < 1e-9
        Pp = random_ideal_point(Fp, d, rng)
        again = change_transversal_section(Fp, change_transversal_restrict(F, Pp))
        assert subspace_distance(again.subspace, Pp.subspace) < 1e-9


class TestInjectivity:
    def test_line(self):
        r = injectivity_probe(monomial_transversal(1, 3), 2, 200, rng=0)
        assert r.passed and r.transversal_ok and r.equal_spectrum_pairs == 0

    def test_plane(self):
        r = injectivity_probe(monomial_transversal(2, 3), 2, 200, rng=1)
        assert r.passed and r.equal_spectrum_pairs > 0 and r.min_separation > 1e-8

    def test_degenerate_transversal(self):
        # deg < d: every L is zero, distinct ideals differ only through Y
        r = injectivity_probe(monomial_transversal(1, 2), 2, 100, rng=2)
        assert r.passed and not r.transversal_ok

    def test_witness_error_carries_pair(self):
        err = InjectivityWitnessFail("x", pair=(1, 2))
        assert err.pair == (1, 2)


class TestPlucker:
    def test_line_in_plane(self):
        F = monomial_transversal(1, 2)
        p = span(F, 3 * t - 4).plucker()
        assert p == {(0,): pytest.approx(0.8), (1,): pytest.approx(-0.6)}

    def test_frame_independent(self):
        F = monomial_transversal(2, 3)
        rng = np.random.default_rng(3)
        V = rng.standard_normal((6, 2))
        a = Subspace.span(F, V).plucker()
        b = Subspace.span(F, V @ np.array([[1.0, 2.0], [-3.0, 0.5]])).plucker()
        assert all(a[k] == pytest.approx(b[k], abs=1e-12) for k in a)
        assert sum(v * v for v in a.values()) == pytest.approx(1.0)

    def test_too_large(self):
        F = monomial_transversal(2, 4)
        with pytest.raises(InputError):
            Subspace.span(F, np.eye(10)[:, :7]).plucker()
