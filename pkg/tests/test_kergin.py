import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smooth_ideals.errors import InputError, QuadratureWarning, SingularFiber
from smooth_ideals.kergin import (
    InterpolationOperator,
    boundary_identity_residual,
    build_interpolator,
    g_map,
    interpolate,
    newton_expansion,
    simplex_form,
    vanishing_certificate,
)
from smooth_ideals.oracles import hermite_interpolant, taylor_truncation
from smooth_ideals.polycalc import Polynomial, SmoothFnOracle, SymmetricForm, jet, random_polynomial
from smooth_ideals.spectrum import WeightedConfig

t = Polynomial.variable(1, 0)
x = Polynomial.variable(2, 0)
y = Polynomial.variable(2, 1)


def config(*pairs):
    return WeightedConfig.from_points([p for p, _ in pairs], [k for _, k in pairs])


class TestSimplexForm:
    def test_zero_simplex_is_evaluation(self):
        p = x**2 * y - 3 * y + 1
        assert simplex_form(p, [(0.3, -1.2)]).coeffs[(0, 0)] == pytest.approx(p((0.3, -1.2)))

    def test_segment_averages_first_derivative(self):
        # on a 1-simplex the form is the mean of f' along the edge
        assert simplex_form(t**2, [[0], [1]]).coeffs[(1,)] == pytest.approx(1.0)
        assert simplex_form(t**3, [[0], [1]]).coeffs[(1,)] == pytest.approx(1.0)

    def test_constant_second_derivative(self):
        # any 2-simplex: f'' = 2 everywhere, so the average is 2
        for verts in ([[0], [1], [2]], [[0], [0], [1]], [[-1], [5], [0.25]]):
            assert simplex_form(t**2, verts).coeffs[(2,)] == pytest.approx(2.0)

    def test_cubic_on_confluent_triangle(self):
        # f'' = 6s averaged over the triangle with vertices 0, 0, 1: 6 * E[t_2] = 6/3
        assert simplex_form(t**3, [[0], [0], [1]]).coeffs[(2,)] == pytest.approx(2.0)

    def test_coincident_vertices_give_derivative(self):
        p = x**3 * y**2
        F = simplex_form(p, [(0.5, -1.0)] * 4)
        T = SymmetricForm(2, 3, {a: p.diff(a)((0.5, -1.0)) for a in F.coeffs})
        assert (F - T).max_abs() < 1e-12

    def test_black_box_quadrature(self):
        exp = SmoothFnOracle(1, lambda p, r: SymmetricForm(1, r, {(r,): math.exp(p[0])}))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert simplex_form(exp, [[0.0], [0.5]]).coeffs[(1,)] == pytest.approx(2 * (math.exp(0.5) - 1), rel=1e-12)
            # second divided difference of exp at 0, 1/4, 1/2, times 2!
            val = simplex_form(exp, [[0.0], [0.25], [0.5]]).coeffs[(2,)]
        assert val == pytest.approx(16 * (math.exp(0.5) - 2 * math.exp(0.25) + 1), rel=1e-10)

    def test_black_box_matches_exact_polynomial(self):
        rng = np.random.default_rng(3)
        p = random_polynomial(rng, 2, 7)
        verts = rng.uniform(-1, 1, (3, 2))
        exact = simplex_form(p, verts)
        approx = simplex_form(SmoothFnOracle.from_polynomial(p), verts)
        assert (exact - approx).max_abs() < 1e-10

    def test_quadrature_flag(self):
        spike = SmoothFnOracle(1, lambda p, r: SymmetricForm(1, r, {(r,): 1.0 / (1e-3 + p[0] ** 2) ** (r + 1)}))
        with pytest.warns(QuadratureWarning):
            simplex_form(spike, [[-1.0], [1.0]])
        with pytest.raises(ArithmeticError):
            simplex_form(spike, [[-1.0], [1.0]], strict=True)

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            simplex_form(x, [[0.0], [1.0]])


class TestIdentities:
    def test_linear_function(self):
        f = 2 * x - y + 3
        verts = [(0, 0), (1, 2), (-1, 0.5)]
        for i, j in [(0, 1), (1, 2), (2, 0)]:
            assert boundary_identity_residual(f, verts, i, j, [(0.3, 0.7)]) < 1e-13

    def test_square_on_three_points(self):
        assert boundary_identity_residual(t**2, [[0], [1], [2]], 0, 2, [[1.0]]) < 1e-12

    def test_bad_indices(self):
        with pytest.raises(InputError):
            boundary_identity_residual(t, [[0], [1]], 0, 0)
        with pytest.raises(InputError):
            boundary_identity_residual(t, [[0], [1], [2]], 0, 1)

    def test_newton_examples(self):
        assert newton_expansion(t**2 + 1, [[3.0]]) == pytest.approx(10.0)
        assert newton_expansion(t**2, [[0], [1], [2]]) == pytest.approx(4.0)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(0, 6), st.integers(1, 4))
    def test_boundary_identity_sweep(self, seed, m, deg, r):
        rng = np.random.default_rng(seed)
        f = random_polynomial(rng, m, deg)
        verts = rng.uniform(-1, 1, (r + 1, m))
        i, j = rng.choice(r + 1, 2, replace=False)
        assert boundary_identity_residual(f, verts, int(i), int(j), list(rng.standard_normal((r - 1, m)))) < 1e-9

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(0, 6), st.integers(0, 5))
    def test_newton_sweep(self, seed, m, deg, r):
        rng = np.random.default_rng(seed)
        f = random_polynomial(rng, m, deg)
        pts = rng.uniform(-1, 1, (r + 1, m))
        assert newton_expansion(f, pts) == pytest.approx(f(pts[-1]), abs=1e-9)


class TestGMap:
    def test_single_point(self):
        (form,) = g_map([(1.0, 2.0)], x * y)
        assert form.coeffs[(0, 0)] == 2.0

    def test_vanishes_on_ideal_line(self):
        f = t**2 * (t - 1) * (t + 2)
        for tup in ([[0], [0], [1]], [[1], [0], [0]], [[-2], [0], [1], [0]]):
            assert max(F.max_abs() for F in g_map(tup, f)) < 1e-10

    def test_vanishes_on_coalesced_plane(self):
        f = (x - 1) ** 3 + (x - 1) * (y + 0.5) ** 2 * 4
        assert max(F.max_abs() for F in g_map([(1.0, -0.5)] * 3, f)) < 1e-10

    def test_reordering_changes_forms_not_operator(self):
        f = t**4 - t
        a = g_map([[0.0], [1.0], [3.0]], f)
        b = g_map([[3.0], [0.0], [1.0]], f)
        assert abs(a[1].coeffs[(1,)] - b[1].coeffs[(1,)]) > 1e-3
        D = [Polynomial.monomial((k,)) for k in range(3)]
        A1 = build_interpolator([[[0.0], [1.0], [3.0]]], D)
        A2 = build_interpolator([[[3.0], [0.0], [1.0]]], D)
        assert A1(f).max_abs_diff(A2(f)) < 1e-12


class TestInterpolator:
    def test_kergin_line_is_triangular(self):
        A = build_interpolator(config(((0.0,), 4)))
        G = np.linalg.inv(A.solve_matrix)
        assert np.allclose(G, np.triu(G), atol=1e-14)
        assert np.allclose(np.diag(G), [math.factorial(i) for i in range(4)])
        assert [b.degree for b in A.basis] == [0, 1, 2, 3]

    def test_two_point_affine(self):
        A = build_interpolator(config(((0.0,), 1), ((1.0,), 1)), [Polynomial.constant(1, 1), t])
        assert A(t**2).max_abs_diff(t) < 1e-14
        f = 3 * t**3 - t + 2
        g = A(f)
        assert g(0.0) == pytest.approx(f(0.0)) and g(1.0) == pytest.approx(f(1.0))

    def test_complement_inside_ideal_is_singular(self):
        with pytest.raises(SingularFiber):
            build_interpolator(config(((0.0,), 2)), [t**2, t**3])

    def test_wrong_complement_size(self):
        with pytest.raises(InputError):
            build_interpolator(config(((0.0,), 2)), [t])

    def test_default_complement_plane(self):
        A = build_interpolator(config(((0.0, 0.0), 3)))
        assert sorted(b.degree for b in A.basis) == [0, 1, 1, 2, 2, 2]

    def test_taylor_case(self):
        rng = np.random.default_rng(1)
        f = random_polynomial(rng, 2, 6)
        yy = (0.2, -0.4)
        A = build_interpolator(config((yy, 3)))
        assert A(f).max_abs_diff(taylor_truncation(f, yy, 2)) < 1e-12
        assert A(f).max_abs_diff(jet(f, yy, 2).taylor_polynomial()) < 1e-12

    def test_hermite_case(self):
        Y = config(((-1.0,), 2), ((0.5,), 3), ((2.0,), 1))
        f = t**7 - 2 * t**4 + t
        ref = Polynomial.from_vector([(k,) for k in range(6)], hermite_interpolant([-1, 0.5, 2], [2, 3, 1], f))
        assert interpolate(build_interpolator(Y), f).max_abs_diff(ref) < 1e-9

    def test_projector_and_linearity(self):
        rng = np.random.default_rng(2)
        Y = config(((0.0, 0.0), 2), ((1.0, 0.5), 1), ((-0.5, 1.0), 1))
        A = build_interpolator(Y)
        for b in A.basis:
            assert A(b).max_abs_diff(b) < 1e-12
        f, g = random_polynomial(rng, 2, 5), random_polynomial(rng, 2, 5)
        assert A(A(f)).max_abs_diff(A(f)) < 1e-9
        assert A(2 * f - 3 * g).max_abs_diff(2 * A(f) - 3 * A(g)) < 1e-10
        h = f - A(f)
        for p, k in Y.clusters:
            assert jet(h, p, k - 1).max_abs() < 1e-8

    def test_json_round_trip_is_exact(self):
        A = build_interpolator(config(((0.1,), 2), ((0.7,), 1)))
        B = InterpolationOperator.from_json(A.to_json())
        assert np.array_equal(A.solve_matrix, B.solve_matrix)
        assert B.basis == A.basis and B.config == A.config and B.condition_number == A.condition_number

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 2), st.integers(1, 5))
    def test_cluster_order_invariance(self, seed, m, d):
        rng = np.random.default_rng(seed)
        weights = [int(w) for w in rng.multinomial(d - 1, np.ones(2) / 2) + 1 if w]
        tuples = [[rng.uniform(-1, 1, m) for _ in range(k)] for k in weights]
        A = build_interpolator(tuples)
        B = build_interpolator([tp[::-1] for tp in tuples[::-1]], A.basis)
        f = random_polynomial(rng, m, d + 2)
        Af = A(f)
        assert Af.max_abs_diff(B(f)) < 1e-9 * max([1.0] + [abs(c) for _, c in Af.terms()])


class TestVanishingCertificate:
    def test_holds_with_jets(self):
        cert = vanishing_certificate(t**2 * (t - 1), [[0.0], [0.0], [1.0]])
        assert cert.holds
        assert all(res < 1e-12 for _, _, res in cert.jet_residuals)
        assert {k for _, k, _ in cert.jet_residuals} == {1, 2}

    def test_fails_on_derivative(self):
        cert = vanishing_certificate(t, [[0.0], [0.0]])
        assert not cert.holds
        assert cert.residuals[1] == pytest.approx(1.0)

    def test_zero_function(self):
        cert = vanishing_certificate(Polynomial.zero(2), [(0.0, 1.0), (2.0, 0.0)])
        assert cert.holds and max(cert.residuals) == 0.0


def test_warnings_are_quiet_for_polynomials():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        simplex_form(t**9, [[0.0], [0.5], [3.0]])
