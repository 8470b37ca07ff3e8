"""Simplex-integral forms and the Kergin-type interpolation operator.

For a function ``f`` and an affine simplex ``sigma = [x_0..x_r]`` the form
``I(f, sigma)`` is the average of the r-th derivative of ``f`` over
``sigma``.  Stacking these forms over the prefixes of a point tuple gives a
jet-sized vector, and inverting that map on a complement ``D`` yields an
interpolation projector onto ``D`` which agrees with ``f`` modulo ``m_Y``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import CertificationFailure, InputError, QuadratureWarning, SingularFiber
from .polycalc import (
    AffineSimplex,
    MultiIndex,
    Polynomial,
    SmoothFnOracle,
    SymmetricForm,
    _factorial_ratio,
    affine_moments,
    derivative_tensor,
    graded_lex,
    jet,
    jet_dimension,
    multi_indices,
)
from .quadrature import grundmann_moeller
from .spectrum import WeightedConfig

Function = Union[Polynomial, SmoothFnOracle]
PointTuple = tuple[tuple[float, ...], ...]

COND_MAX = 1e12
QUAD_TOL = 1e-10


def _form_matrix(sigma: AffineSimplex, polys: Sequence[Polynomial]) -> np.ndarray:
    """Rows: degree-r multi-indices; columns: components of ``I(p, sigma)`` per poly."""
    r, m = sigma.order, sigma.dim
    alphas = multi_indices(m, r)
    out = np.zeros((len(alphas), len(polys)))
    top = max((p.degree for p in polys), default=-1) - r
    if top < 0:
        return out
    moments = affine_moments(sigma, top)
    for col, p in enumerate(polys):
        if p.dim != m:
            raise InputError(f"polynomial of dimension {p.dim} on a simplex in R^{m}")
        for row, alpha in enumerate(alphas):
            acc = 0.0
            for beta, c in p.coeffs.items():
                f = _factorial_ratio(beta, alpha)
                if f:
                    acc += c * f * moments[tuple(b - a for b, a in zip(beta, alpha))]
            out[row, col] = acc
    return out


def _quadrature_form(f: SmoothFnOracle, sigma: AffineSimplex, s: int) -> SymmetricForm:
    bary, weights = grundmann_moeller(sigma.order, s)
    pts = bary @ sigma.array()
    acc = np.zeros(len(multi_indices(f.dim, sigma.order)))
    for x, w in zip(pts, weights):
        acc += w * derivative_tensor(f, x, sigma.order).vector()
    return SymmetricForm.from_vector(f.dim, sigma.order, acc)


def simplex_form(f: Function, sigma: AffineSimplex | Sequence, *, quad_tol: float = QUAD_TOL,
                 strict: bool = False) -> SymmetricForm:
    """``I(f, sigma)``: the r-th derivative of ``f`` averaged over ``sigma``.

    Polynomials are integrated exactly through simplex moments.  Black-box
    functions use a degree-7 Grundmann-Moeller rule checked against the
    degree-9 rule; a disagreement above ``quad_tol`` raises a
    :class:`QuadratureWarning` (or ``ArithmeticError`` when ``strict``).
    """
    if not isinstance(sigma, AffineSimplex):
        sigma = AffineSimplex.of(sigma)
    if f.dim != sigma.dim:
        raise InputError(f"function of dimension {f.dim} on a simplex in R^{sigma.dim}")
    if isinstance(f, Polynomial):
        vec = _form_matrix(sigma, [f])[:, 0]
        return SymmetricForm.from_vector(f.dim, sigma.order, vec)
    verts = sigma.array()
    if np.all(verts == verts[0]):
        return derivative_tensor(f, verts[0], sigma.order)
    coarse = _quadrature_form(f, sigma, 3)
    fine = _quadrature_form(f, sigma, 4)
    err = (coarse - fine).max_abs()
    if err > quad_tol * max(1.0, fine.max_abs()):
        msg = f"simplex quadrature did not converge (difference {err:.3g})"
        if strict:
            raise ArithmeticError(msg)
        warnings.warn(msg, QuadratureWarning, stacklevel=2)
    return fine


def boundary_identity_residual(f: Function, sigma: AffineSimplex | Sequence, i: int, j: int,
                               vectors: Sequence = ()) -> float:
    """Defect of the face formula relating ``I(f, sigma)`` to two of its faces.

    Compares ``I(f,sigma)(v_1..v_{r-1}, x_j - x_i)`` with
    ``r (I(f, d_i sigma) - I(f, d_j sigma))(v_1..v_{r-1})``.
    """
    if not isinstance(sigma, AffineSimplex):
        sigma = AffineSimplex.of(sigma)
    r = sigma.order
    if r < 1 or i == j or not (0 <= i <= r and 0 <= j <= r):
        raise InputError("need an r-simplex with r >= 1 and two distinct vertex indices")
    if len(vectors) != r - 1:
        raise InputError(f"expected {r - 1} vectors, got {len(vectors)}")
    verts = sigma.array()
    lhs = simplex_form(f, sigma)(*vectors, verts[j] - verts[i])
    rhs = r * (simplex_form(f, sigma.face(i)) - simplex_form(f, sigma.face(j)))(*vectors)
    return abs(lhs - rhs)


def newton_expansion(f: Function, points: Sequence) -> float:
    """Right-hand side of the simplex Newton expansion of ``f(x_r)``."""
    pts = [np.atleast_1d(np.asarray(p, float)) for p in points]
    target = pts[-1]
    total = 0.0
    for i in range(len(pts)):
        form = simplex_form(f, AffineSimplex.of(pts[: i + 1]))
        total += form(*[target - pts[k] for k in range(i)]) / math.factorial(i)
    return total


def g_map(cluster: Sequence, f: Function) -> tuple[SymmetricForm, ...]:
    """``(I(f,[x_1]), I(f,[x_1,x_2]), ..., I(f,[x_1..x_k]))``."""
    pts = [tuple(np.atleast_1d(np.asarray(p, float))) for p in cluster]
    if not pts:
        raise InputError("empty cluster")
    return tuple(simplex_form(f, AffineSimplex(tuple(pts[: i + 1]))) for i in range(len(pts)))


def _normalize_tuples(Y) -> tuple[WeightedConfig, tuple[PointTuple, ...]]:
    if isinstance(Y, WeightedConfig):
        return Y, tuple(Y.coalesced_tuples())
    tuples = tuple(tuple(tuple(float(c) for c in np.atleast_1d(np.asarray(p, float))) for p in t) for t in Y)
    if not tuples or any(len(t) == 0 for t in tuples):
        raise InputError("every cluster tuple needs at least one point")
    config = WeightedConfig.from_multiset([p for t in tuples for p in t])
    return config, tuples


def g_matrix(tuples: Sequence[PointTuple], polys: Sequence[Polynomial]) -> np.ndarray:
    """Matrix of the stacked simplex-form map on ``polys`` (one column each)."""
    blocks = []
    for t in tuples:
        for i in range(len(t)):
            blocks.append(_form_matrix(AffineSimplex(tuple(t[: i + 1])), polys))
    return np.vstack(blocks)


def g_vector(tuples: Sequence[PointTuple], f: Function) -> np.ndarray:
    if isinstance(f, Polynomial):
        return g_matrix(tuples, [f])[:, 0]
    return np.concatenate([form.vector() for t in tuples for form in g_map(t, f)])


def _greedy_columns(G: np.ndarray, want: int, rel_tol: float = 1e-6) -> list[int]:
    chosen: list[int] = []
    Q = np.zeros((G.shape[0], 0))
    for j in range(G.shape[1]):
        v = G[:, j]
        nv = np.linalg.norm(v)
        if nv == 0.0:
            continue
        w = v - Q @ (Q.T @ v)
        w = w - Q @ (Q.T @ w)
        nw = np.linalg.norm(w)
        if nw > rel_tol * nv:
            Q = np.hstack([Q, (w / nw)[:, None]])
            chosen.append(j)
            if len(chosen) == want:
                break
    return chosen


@dataclass(frozen=True)
class InterpolationOperator:
    """Projector ``f -> A(Y, f)`` onto ``span(basis)``.

    ``tuples`` holds one ordered point tuple per cluster; for a weighted
    configuration each tuple repeats its point by the weight.
    """

    config: WeightedConfig
    tuples: tuple[PointTuple, ...]
    basis: tuple[Polynomial, ...]
    solve_matrix: np.ndarray = field(repr=False)
    condition_number: float

    @property
    def dim(self) -> int:
        return self.config.dim

    def coefficients(self, f: Function) -> np.ndarray:
        """Coordinates of ``A(Y, f)`` in ``basis``."""
        return self.solve_matrix @ g_vector(self.tuples, f)

    def __call__(self, f: Function) -> Polynomial:
        c = self.coefficients(f)
        out = Polynomial.zero(self.dim)
        for ci, b in zip(c, self.basis):
            out = out + ci * b
        return out

    def matrix_on(self, monomials: Sequence[MultiIndex], target: Sequence[MultiIndex]) -> np.ndarray:
        """Matrix of ``A`` from coefficients over ``monomials`` to coefficients over ``target``."""
        mono_polys = [Polynomial.monomial(a) for a in monomials]
        coeff = self.solve_matrix @ g_matrix(self.tuples, mono_polys)
        B = np.column_stack([b.coefficient_vector(target) for b in self.basis])
        return B @ coeff

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "tuples": [[list(p) for p in t] for t in self.tuples],
            "basis": [b.to_json() for b in self.basis],
            "solve_matrix": self.solve_matrix.tolist(),
            "condition_number": self.condition_number,
        }

    @classmethod
    def from_json(cls, obj) -> InterpolationOperator:
        return cls(
            config=WeightedConfig.from_json(obj["config"]),
            tuples=tuple(tuple(tuple(float(c) for c in p) for p in t) for t in obj["tuples"]),
            basis=tuple(Polynomial.from_json(b) for b in obj["basis"]),
            solve_matrix=np.array(obj["solve_matrix"], dtype=float).reshape(len(obj["basis"]), -1),
            condition_number=float(obj["condition_number"]),
        )


def default_complement(tuples: Sequence[PointTuple], m: int, max_degree: int) -> tuple[Polynomial, ...]:
    """First monomials in graded-lex order whose columns of the fibre map are independent."""
    size = sum(jet_dimension(m, len(t)) for t in tuples)
    candidates = graded_lex(m, max_degree)
    G = g_matrix(tuples, [Polynomial.monomial(a) for a in candidates])
    chosen = _greedy_columns(G, size)
    if len(chosen) < size:
        raise SingularFiber(
            f"only {len(chosen)} of {size} independent monomials of degree <= {max_degree}"
        )
    return tuple(Polynomial.monomial(candidates[j]) for j in chosen)


def build_interpolator(Y, basis: Sequence[Polynomial] | None = None, *, max_degree: int | None = None,
                       cond_max: float = COND_MAX) -> InterpolationOperator:
    """Assemble and invert the fibre map on the complement ``basis``.

    ``Y`` is a :class:`WeightedConfig` (each cluster coalesced to its point)
    or a sequence of ordered point tuples, one per cluster.  Without
    ``basis`` the default monomial complement of degree ``<= max_degree``
    (default ``d - 1``) is used.
    """
    config, tuples = _normalize_tuples(Y)
    m = config.dim
    size = sum(jet_dimension(m, len(t)) for t in tuples)
    if basis is None:
        deg = config.degree - 1 if max_degree is None else max_degree
        basis = default_complement(tuples, m, deg)
    basis = tuple(basis)
    if len(basis) != size:
        raise InputError(f"complement must have {size} elements, got {len(basis)}")
    G = g_matrix(tuples, list(basis))
    cond = float(np.linalg.cond(G)) if np.all(np.isfinite(G)) else float("inf")
    if not np.isfinite(cond) or cond > cond_max:
        raise SingularFiber(f"fibre map has condition number {cond:.3g} > {cond_max:.3g}", cond)
    return InterpolationOperator(config, tuples, basis, np.linalg.inv(G), cond)


def interpolate(A: InterpolationOperator, f: Function) -> Polynomial:
    return A(f)


@dataclass(frozen=True)
class VanishingCertificate:
    """Outcome of the prefix-integral vanishing test for one point tuple."""

    holds: bool
    residuals: tuple[float, ...]
    jet_residuals: tuple[tuple[tuple[float, ...], int, float], ...]


def vanishing_certificate(f: Function, cluster: Sequence, tol: float = 1e-9) -> VanishingCertificate:
    """Test ``I(f, [x_0..x_j]) = 0`` for all prefixes; if so, confirm the jets vanish.

    ``jet_residuals`` lists ``(point, multiplicity, max |jet coefficient|)``
    and is filled only when the integrals vanish.  A vanishing certificate
    whose jets do not vanish raises :class:`CertificationFailure`.
    """
    forms = g_map(cluster, f)
    residuals = tuple(form.max_abs() for form in forms)
    if not all(r <= tol for r in residuals):
        return VanishingCertificate(False, residuals, ())
    config = WeightedConfig.from_multiset(cluster)
    jets = []
    for point, k in config.clusters:
        res = jet(f, point, k - 1).max_abs()
        jets.append((point, k, res))
        if res > tol:
            raise CertificationFailure(f"prefix integrals vanish but the {k - 1}-jet at {point} is {res:.3g}")
    return VanishingCertificate(True, residuals, tuple(jets))
