"""Reference implementations used to cross-check the main code paths.

Each one follows a classical route that shares no code with the simplex
calculus: confluent divided differences, Taylor truncation by formal
differentiation, and tensor Gauss quadrature over a collapsed simplex.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .polycalc import Polynomial, graded_lex, multinomial


def hermite_interpolant(nodes: Sequence[float], multiplicities: Sequence[int], f: Polynomial) -> np.ndarray:
    """Ascending coefficients of the Hermite interpolant in one variable.

    Confluent divided differences: repeated nodes use ``f^(j)(x) / j!``.
    """
    z = [float(x) for x, k in zip(nodes, multiplicities) for _ in range(k)]
    n = len(z)
    derivs = {}
    for x, k in zip(nodes, multiplicities):
        for j in range(k):
            derivs[(float(x), j)] = f.diff((j,))(np.array([x])) / math.factorial(j)
    table = [[0.0] * n for _ in range(n)]
    for i in range(n):
        table[i][0] = derivs[(z[i], 0)]
    for j in range(1, n):
        for i in range(n - j):
            if z[i + j] == z[i]:
                table[i][j] = derivs[(z[i], j)]
            else:
                table[i][j] = (table[i + 1][j - 1] - table[i][j - 1]) / (z[i + j] - z[i])
    # Newton form -> monomial coefficients
    coeffs = np.zeros(n)
    basis = np.array([1.0])
    for j in range(n):
        coeffs[: len(basis)] += table[0][j] * basis
        basis = np.polynomial.polynomial.polymul(basis, [-z[j], 1.0])
    return coeffs


def taylor_truncation(f: Polynomial, y, order: int) -> Polynomial:
    """Taylor polynomial of ``f`` at ``y`` of total degree ``<= order``, in the original variables."""
    y = np.atleast_1d(np.asarray(y, float))
    m = f.dim
    out = Polynomial.zero(m)
    for alpha in graded_lex(m, order):
        c = f.diff(alpha)(y) / math.prod(math.factorial(a) for a in alpha)
        term = Polynomial.constant(m, c)
        for j, a in enumerate(alpha):
            term = term * (Polynomial.variable(m, j) - y[j]) ** a
        out = out + term
    return out


def collapsed_simplex_moment(a: Sequence[int], nodes: int = 12) -> float:
    """Normalised ``∫ t^a`` over the simplex via the Duffy collapse of the cube.

    ``t_i = u_i * prod_{l<i} (1 - u_l)`` maps ``[0,1]^r`` onto the simplex;
    tensor Gauss-Legendre is exact for the resulting polynomial integrand.
    """
    r = len(a)
    if r == 0:
        return 1.0
    x, w = np.polynomial.legendre.leggauss(nodes)
    x, w = 0.5 * (x + 1.0), 0.5 * w
    U = np.stack(np.meshgrid(*([x] * r), indexing="ij"), axis=-1).reshape(-1, r)
    W = np.prod(np.stack(np.meshgrid(*([w] * r), indexing="ij"), axis=-1).reshape(-1, r), axis=1)
    rest = np.cumprod(np.hstack([np.ones((len(U), 1)), 1.0 - U[:, :-1]]), axis=1)
    T = U * rest
    jac = np.prod(rest, axis=1)
    return float(math.factorial(r) * np.sum(W * jac * np.prod(T ** np.asarray(a, float), axis=1)))


def form_on_diagonal(coeffs: dict, v) -> float:
    """``T(v, ..., v)`` through the multinomial expansion, independent of slot-wise evaluation."""
    v = np.asarray(v, float)
    return float(sum(c * multinomial(alpha) * np.prod(v ** np.asarray(alpha)) for alpha, c in coeffs.items()))
