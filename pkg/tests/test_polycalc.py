import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from smooth_ideals.oracles import collapsed_simplex_moment, form_on_diagonal
from smooth_ideals.polycalc import (
    AffineSimplex,
    Polynomial,
    SmoothFnOracle,
    SymmetricForm,
    affine_moments,
    derivative_tensor,
    graded_lex,
    jet,
    jet_dimension,
    multi_indices,
    poly_eval,
    random_polynomial,
    simplex_moment,
    symform_eval,
)

x = Polynomial.variable(2, 0)
y = Polynomial.variable(2, 1)
t = Polynomial.variable(1, 0)


def test_poly_eval_examples():
    assert poly_eval(Polynomial.constant(2, 1.0), (3, 4)) == 1
    assert poly_eval(t**2, 2) == 4
    assert poly_eval(x**2 * y + y**3, (1, 2)) == 10


def test_poly_eval_dimension_mismatch():
    with pytest.raises(ValueError):
        poly_eval(x * y, (1, 2, 3))


def test_zero_coefficients_are_dropped():
    p = (x + y) - y
    assert p.coeffs == {(1, 0): 1.0}
    assert (x - x).is_zero
    assert (x - x).degree == -1


def test_graded_lex_order():
    assert graded_lex(2, 2) == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
    assert len(graded_lex(3, 4)) == math.comb(7, 3)
    assert jet_dimension(2, 3) == 6


def test_derivative_tensor_examples():
    assert derivative_tensor(t**2, 5, 2).coeffs == {(2,): 2.0}
    p = x**2 * y + 3 * x
    assert derivative_tensor(p, (1.5, -2), 0).coeffs[(0, 0)] == p((1.5, -2))
    T = derivative_tensor(x**2 * y, (1, 1), 2)
    assert dict(T.coeffs) == {(2, 0): 2.0, (1, 1): 2.0, (0, 2): 0.0}


def test_derivative_tensor_negative_order():
    with pytest.raises(ValueError):
        derivative_tensor(x, (0, 0), -1)


def test_symform_eval_examples():
    T = derivative_tensor(t**2, 0.0, 2)
    assert symform_eval(T, 2, 1) == 4
    assert symform_eval(T, 0, 1) == 0
    S = SymmetricForm(2, 2, {(1, 1): 1.0})
    assert symform_eval(S, (1, 0), (0, 1)) == 1
    with pytest.raises(ValueError):
        symform_eval(S, (1, 0))


@pytest.mark.parametrize("a, expected", [((0,), 1.0), ((1,), 0.5), ((1, 1), 1 / 12), ((), 1.0)])
def test_simplex_moment_examples(a, expected):
    assert simplex_moment(a) == pytest.approx(expected, rel=1e-15)


def test_simplex_moment_against_adaptive_quadrature():
    # two-dimensional check with scipy's adaptive integrator over the triangle
    val, _ = integrate.dblquad(lambda t2, t1: t1**2 * t2**3, 0, 1, 0, lambda t1: 1 - t1, epsabs=1e-14)
    assert simplex_moment((2, 3)) == pytest.approx(2 * val, rel=1e-10)


@pytest.mark.parametrize("r", range(1, 5))
def test_simplex_moment_against_collapsed_quadrature(r):
    rng = np.random.default_rng(r)
    for _ in range(10):
        a = tuple(int(v) for v in rng.multinomial(int(rng.integers(0, 9)), np.ones(r) / r))
        assert simplex_moment(a) == pytest.approx(collapsed_simplex_moment(a), rel=1e-10)


def test_affine_moments_coincident_vertices():
    S = AffineSimplex.of([(0.5, 2.0)] * 3)
    mom = affine_moments(S, 3)
    assert mom[(2, 1)] == pytest.approx(0.5**2 * 2.0)


def test_affine_moments_segment():
    # average of x^3 over [1, 3] is (81 - 1) / 8
    assert affine_moments(AffineSimplex.of([[1.0], [3.0]]), 3)[(3,)] == pytest.approx(10.0)


def test_simplex_faces():
    S = AffineSimplex.of([[0.0], [1.0], [2.0]])
    assert S.order == 2
    assert S.face(1).vertices == ((0.0,), (2.0,))
    assert S.face(0).order == 1
    assert S.prefix(1).vertices == ((0.0,), (1.0,))


def test_jet_is_taylor_scaled():
    J = jet(t**3, 2.0, 3)
    assert J.vector() == pytest.approx([8.0, 12.0, 6.0, 1.0])
    assert len(jet(x * y, (0, 0), 2).vector()) == jet_dimension(2, 3)
    assert J.taylor_polynomial().max_abs_diff(t**3) < 1e-12


def test_polynomial_json_round_trip():
    p = 0.1 * x**3 - 2 * x * y + 7.25
    obj = p.to_json()
    assert [term["alpha"] for term in obj["terms"]] == [[0, 0], [1, 1], [3, 0]]
    assert Polynomial.from_json(obj) == p


def test_oracle_wrapper_matches_formal_derivatives():
    rng = np.random.default_rng(5)
    p = random_polynomial(rng, 3, 5)
    f = SmoothFnOracle.from_polynomial(p)
    pt = rng.standard_normal(3)
    for r in range(4):
        assert derivative_tensor(f, pt, r).coeffs == derivative_tensor(p, pt, r).coeffs
    assert f(pt) == p(pt)


polys = st.builds(
    lambda seed, m, deg: random_polynomial(np.random.default_rng(seed), m, deg),
    st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(0, 6),
)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(0, 6), st.integers(0, 6))
def test_product_evaluates_to_product(seed, m, d1, d2):
    rng = np.random.default_rng(seed)
    p, q = random_polynomial(rng, m, d1), random_polynomial(rng, m, d2)
    pt = rng.uniform(-1, 1, m)
    lhs, rhs = (p * q)(pt), p(pt) * q(pt)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(0, 4))
def test_derivative_tensor_is_linear(seed, m, r):
    rng = np.random.default_rng(seed)
    p, q = random_polynomial(rng, m, 5), random_polynomial(rng, m, 5)
    a, b = rng.standard_normal(2)
    pt = rng.standard_normal(m)
    lhs = derivative_tensor(a * p + b * q, pt, r)
    rhs = derivative_tensor(p, pt, r) * a + derivative_tensor(q, pt, r) * b
    assert (lhs - rhs).max_abs() < 1e-12 * max(1.0, lhs.max_abs())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 4))
def test_symform_permutation_invariance(seed, m, r):
    rng = np.random.default_rng(seed)
    T = SymmetricForm.from_vector(m, r, rng.standard_normal(len(multi_indices(m, r))))
    vs = list(rng.standard_normal((r, m)))
    base = T(*vs)
    for perm in itertools.permutations(range(r)):
        assert T(*[vs[i] for i in perm]) == pytest.approx(base, rel=1e-12, abs=1e-14)
    v = rng.standard_normal(m)
    assert T(*[v] * r) == pytest.approx(form_on_diagonal(T.coeffs, v), rel=1e-10, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(polys)
def test_diff_then_eval_matches_finite_difference(p):
    rng = np.random.default_rng(0)
    pt = rng.uniform(-0.5, 0.5, p.dim)
    h = 1e-6
    e = np.eye(p.dim)[0]
    fd = (p(pt + h * e) - p(pt - h * e)) / (2 * h)
    grad = p.diff((1,) + (0,) * (p.dim - 1))(pt)
    assert fd == pytest.approx(grad, rel=1e-5, abs=1e-5)
