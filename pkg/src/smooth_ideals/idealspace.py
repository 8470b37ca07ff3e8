"""Finite-codimension ideals in a chart, represented through a transversal.

An ideal ``I`` of codimension ``d`` is stored as the pair ``(Y, L)`` with
``Y`` its weighted spectrum and ``L = F ∩ I`` a codimension-``d`` subspace of
a polynomial transversal ``F``.  Coefficients of ``F`` are orthonormal, so
subspaces are compared through principal angles.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import (
    ClusterAmbiguity,
    ClusterOracleFail,
    CodimMismatch,
    ComplexSpectrum,
    InjectivityWitnessFail,
    InputError,
    MergeToleranceViolation,
    NotTransverse,
    TransversalityFail,
)
from .kergin import COND_MAX, Function, InterpolationOperator, build_interpolator
from .polycalc import MultiIndex, Polynomial, graded_lex, jet_dimension, monomial_derivative_row
from .spectrum import MERGE_TOL, WeightedConfig


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by the oracle, the algebra and the limits."""

    rank: float = 1e-9  # singular values below rank * largest count as zero
    angle: float = 1e-8  # containment angle, radians
    residual: float = 1e-8  # closure residual, relative
    cluster_radius: float = 1e-6
    cond_max: float = COND_MAX


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class Transversal:
    """Polynomials of degree ``< max_degree`` in ``m`` variables, monomials orthonormal."""

    m: int
    max_degree: int

    def __post_init__(self):
        if self.m < 1 or self.max_degree < 1:
            raise InputError("need m >= 1 and max_degree >= 1")

    @property
    def basis(self) -> tuple[MultiIndex, ...]:
        return graded_lex(self.m, self.max_degree - 1)

    @property
    def r(self) -> int:
        return math.comb(self.m + self.max_degree - 1, self.m)

    @property
    def product_basis(self) -> tuple[MultiIndex, ...]:
        """Monomials reached by products of two elements of ``F``."""
        return graded_lex(self.m, 2 * (self.max_degree - 1))

    @cached_property
    def product_index(self) -> np.ndarray:
        """``idx[i, j]``: position of ``basis[i] + basis[j]`` in ``product_basis``."""
        pos = {a: n for n, a in enumerate(self.product_basis)}
        B = self.basis
        return np.array([[pos[tuple(x + y for x, y in zip(a, b))] for b in B] for a in B], dtype=int)

    def vector(self, p: Polynomial) -> np.ndarray:
        if p.dim != self.m:
            raise InputError(f"polynomial in {p.dim} variables, transversal in {self.m}")
        try:
            return p.coefficient_vector(self.basis)
        except ValueError as exc:
            raise InputError(f"{p!r} is not in the transversal") from exc

    def poly(self, vec) -> Polynomial:
        return Polynomial.from_vector(self.basis, vec)

    def contains(self, other: Transversal) -> bool:
        return self.m == other.m and other.max_degree <= self.max_degree

    def to_json(self) -> dict:
        return {"m": self.m, "deg": self.max_degree}

    @classmethod
    def from_json(cls, obj) -> Transversal:
        return cls(int(obj["m"]), int(obj["deg"]))


def monomial_transversal(m: int, max_degree: int) -> Transversal:
    return Transversal(m, max_degree)


def _orth(vectors: np.ndarray, rank_tol: float) -> np.ndarray:
    """Orthonormal basis of the column span (relative rank cut-off)."""
    if vectors.size == 0:
        return np.zeros((vectors.shape[0], 0))
    U, s, _ = np.linalg.svd(vectors, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((vectors.shape[0], 0))
    return U[:, s > rank_tol * s[0]]


def _null(matrix: np.ndarray, rank_tol: float) -> tuple[np.ndarray, int]:
    """Orthonormal kernel basis and numerical rank."""
    n = matrix.shape[1]
    if matrix.shape[0] == 0:
        return np.eye(n), 0
    _, s, Vt = np.linalg.svd(matrix, full_matrices=True)
    rank = int(np.sum(s > rank_tol * s[0])) if s.size and s[0] > 0 else 0
    return Vt[rank:].T.copy(), rank


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace of a transversal stored by an orthonormal coefficient frame."""

    ambient: Transversal
    frame: np.ndarray = field(repr=False)

    def __post_init__(self):
        frame = np.asarray(self.frame, dtype=float).reshape(self.ambient.r, -1)
        object.__setattr__(self, "frame", frame)

    @classmethod
    def span(cls, ambient: Transversal, vectors, rank_tol: float = DEFAULT_TOL.rank) -> Subspace:
        vectors = np.asarray(vectors, dtype=float).reshape(ambient.r, -1)
        return cls(ambient, _orth(vectors, rank_tol))

    @classmethod
    def kernel(cls, ambient: Transversal, matrix, rank_tol: float = DEFAULT_TOL.rank) -> Subspace:
        return cls(ambient, _null(np.asarray(matrix, float).reshape(-1, ambient.r), rank_tol)[0])

    @classmethod
    def of_polynomials(cls, ambient: Transversal, polys: Sequence[Polynomial]) -> Subspace:
        if not polys:
            return cls(ambient, np.zeros((ambient.r, 0)))
        return cls.span(ambient, np.column_stack([ambient.vector(p) for p in polys]))

    @property
    def dim(self) -> int:
        return self.frame.shape[1]

    @property
    def codim(self) -> int:
        return self.ambient.r - self.dim

    def projector(self) -> np.ndarray:
        return self.frame @ self.frame.T

    def complement(self) -> Subspace:
        return Subspace(self.ambient, _null(self.frame.T, 1e-12)[0] if self.dim else np.eye(self.ambient.r))

    def polynomials(self) -> list[Polynomial]:
        return [self.ambient.poly(c) for c in self.frame.T]

    def residual(self, vectors) -> np.ndarray:
        """Component of ``vectors`` orthogonal to the subspace."""
        v = np.asarray(vectors, float)
        return v - self.frame @ (self.frame.T @ v)

    def orthonormality_defect(self) -> float:
        return float(np.abs(self.frame.T @ self.frame - np.eye(self.dim)).max(initial=0.0))

    def to_json(self) -> list[list[float]]:
        return self.frame.tolist()

    def plucker(self, max_dim: int = 6) -> dict[tuple[int, ...], float]:
        """Plücker coordinates (maximal minors of the frame), for display only.

        Rows are indexed by ``ambient.basis``.  The sign is fixed so the
        largest coordinate is positive; comparisons should use principal angles.
        """
        if self.dim > max_dim:
            raise InputError(f"Plücker coordinates are only offered for dim <= {max_dim}, not {self.dim}")
        coords = {rows: float(np.linalg.det(self.frame[list(rows), :]))
                  for rows in itertools.combinations(range(self.ambient.r), self.dim)}
        top = max(coords.values(), key=abs, default=1.0)
        sign = 1.0 if top >= 0 else -1.0
        return {rows: sign * v for rows, v in coords.items()}


def subspace_distance(L1: Subspace, L2: Subspace) -> float:
    """Largest principal angle between equal-dimensional subspaces."""
    if L1.ambient != L2.ambient:
        raise InputError("subspaces live in different transversals")
    if L1.dim != L2.dim:
        raise InputError(f"dimension mismatch: {L1.dim} vs {L2.dim}")
    if L1.dim == 0 or L1.dim == L1.ambient.r:
        return 0.0
    return float(np.max(scipy.linalg.subspace_angles(L1.frame, L2.frame)))


def containment_angle(inner: Subspace, outer: Subspace) -> float:
    """Largest angle between ``inner`` and its projection into ``outer``."""
    if inner.dim == 0:
        return 0.0
    s = np.linalg.norm(outer.residual(inner.frame), 2)
    return float(np.arcsin(min(1.0, s)))


def jet_matrix(F: Transversal, Y: WeightedConfig) -> np.ndarray:
    """Rows ``f -> d^alpha f(y_i) / alpha!`` for ``|alpha| < k_i``; columns ``F``'s basis."""
    if Y.dim != F.m:
        raise InputError(f"configuration in R^{Y.dim}, transversal in R^{F.m}")
    rows = []
    for y, k in Y.clusters:
        for alpha in graded_lex(F.m, k - 1):
            rows.append(monomial_derivative_row(F.basis, y, alpha, taylor=True))
    return np.array(rows).reshape(-1, F.r)


def vanishing_subspace(F: Transversal, Y: WeightedConfig, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """``F ∩ m_Y``: the common kernel of the Taylor functionals at ``Y``."""
    J = jet_matrix(F, Y)
    K, rank = _null(J, tol.rank)
    if rank < J.shape[0]:
        raise TransversalityFail(
            f"jet map at {Y.to_json()} has rank {rank} < {J.shape[0]}", witness=Y
        )
    return Subspace(F, K)


@dataclass(frozen=True)
class TransversalityReport:
    passed: bool
    samples: int
    min_singular_value: float
    witness: WeightedConfig | None = None


def _random_composition(rng: np.random.Generator, d: int) -> list[int]:
    cuts = sorted(rng.choice(np.arange(1, d), size=rng.integers(0, d), replace=False).tolist()) if d > 1 else []
    edges = [0] + cuts + [d]
    return [b - a for a, b in zip(edges, edges[1:])]


def random_points(rng: np.random.Generator, m: int, n: int, min_sep: float = 0.3,
                  box: float = 1.0) -> np.ndarray:
    """``n`` points in ``[-box, box]^m`` with pairwise distance at least ``min_sep``.

    The box grows if it is too crowded for the requested separation.
    """
    if m == 1:
        slack = 2 * box - (n - 1) * min_sep
        if slack <= 0:
            box, slack = (n - 1) * min_sep, (n - 1) * min_sep
        gaps = rng.dirichlet(np.ones(n + 1)) * slack
        pts = -box + np.cumsum(gaps[:n]) + min_sep * np.arange(n)
        return rng.permutation(pts)[:, None]
    while True:
        pts: list[np.ndarray] = []
        for _ in range(200 * n):
            p = rng.uniform(-box, box, size=m)
            if all(np.linalg.norm(p - q) >= min_sep for q in pts):
                pts.append(p)
                if len(pts) == n:
                    return np.array(pts)
        box *= 1.25


def transversality_check(F: Transversal, d: int, samples: int = 100, rng=None,
                         tol: Tolerances = DEFAULT_TOL, strict: bool = True) -> TransversalityReport:
    """Sample ``Y`` of total weight ``d+1`` and check the jet map on ``F`` is onto.

    Fully coalesced and fully separated configurations are always included.
    """
    rng = np.random.default_rng(rng)
    worst = np.inf
    for n in range(samples):
        if n == 0:
            weights = [d + 1]
        elif n == 1:
            weights = [1] * (d + 1)
        else:
            weights = _random_composition(rng, d + 1)
        pts = random_points(rng, F.m, len(weights), min_sep=0.05)
        Y = WeightedConfig.from_points(pts, weights)
        J = jet_matrix(F, Y)
        if J.shape[0] > F.r:
            smin = 0.0
        else:
            s = np.linalg.svd(J, compute_uv=False)
            smin = float(s[-1] / s[0])
        worst = min(worst, smin)
        if smin <= tol.rank:
            report = TransversalityReport(False, n + 1, worst, Y)
            if strict:
                raise TransversalityFail(
                    f"F (m={F.m}, deg<{F.max_degree}) is not transverse at weight {d + 1}: {Y.to_json()}",
                    witness=Y, min_singular_value=worst,
                )
            return report
    return TransversalityReport(True, samples, float(worst))


@dataclass(frozen=True, eq=False)
class IdealPoint:
    """An ideal ``m_Y + L`` of codimension ``d`` given by ``(Y, L = F ∩ I)``."""

    config: WeightedConfig
    subspace: Subspace
    certified: bool = False

    def __post_init__(self):
        if self.subspace.codim != self.config.degree:
            raise CodimMismatch(
                f"subspace has codimension {self.subspace.codim}, configuration weight {self.config.degree}"
            )

    @property
    def transversal(self) -> Transversal:
        return self.subspace.ambient

    @property
    def degree(self) -> int:
        return self.config.degree

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "frame": self.subspace.to_json(),
            "transversal": self.transversal.to_json(),
            "certified": bool(self.certified),
        }

    @classmethod
    def from_json(cls, obj) -> IdealPoint:
        try:
            F = Transversal.from_json(obj["transversal"])
            frame = np.array(obj["frame"], dtype=float).reshape(F.r, -1)
            return cls(WeightedConfig.from_json(obj["config"]), Subspace(F, frame), bool(obj.get("certified", False)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"malformed ideal point: {exc!r}") from exc


@dataclass(frozen=True)
class OracleResult:
    """Verdict of :func:`membership_oracle`; truthy when certified."""

    certified: bool
    reason: str
    containment_angle: float
    closure_residual: float
    worst_pair: tuple[int, int] | None = None

    def __bool__(self):
        return self.certified


def interpolator_for(F: Transversal, Y, tol: Tolerances = DEFAULT_TOL) -> InterpolationOperator:
    """Interpolation operator at ``Y`` with values in ``F`` (default monomial complement)."""
    return build_interpolator(Y, max_degree=F.max_degree - 1, cond_max=tol.cond_max)


def _interpolation_on_products(F: Transversal, A: InterpolationOperator) -> np.ndarray:
    return A.matrix_on(F.product_basis, F.basis)


def membership_oracle(F: Transversal, Y: WeightedConfig, L: Subspace,
                      tol: Tolerances = DEFAULT_TOL) -> OracleResult:
    """Decide whether ``L = F ∩ I`` for an ideal ``I ⊇ m_Y`` of codimension ``|Y|``.

    Checks ``F ∩ m_Y ⊆ L`` through principal angles, then that
    ``A(Y, p*l)`` stays in ``L`` for every basis monomial ``p`` of ``F`` and
    every frame vector ``l`` of ``L``.
    """
    if L.ambient != F:
        raise InputError("subspace does not live in the given transversal")
    if L.codim != Y.degree:
        return OracleResult(False, f"codimension {L.codim} != weight {Y.degree}", np.nan, np.nan)
    K = vanishing_subspace(F, Y, tol)
    angle = containment_angle(K, L)
    if angle > tol.angle:
        return OracleResult(False, "containment: F ∩ m_Y is not inside L", angle, np.nan)
    if L.dim == 0:
        return OracleResult(True, "", angle, 0.0)
    A_big = _interpolation_on_products(F, interpolator_for(F, Y, tol))
    idx = F.product_index  # (r, r)
    # image[n, p, l] = coefficient n of A(x^{beta_p} * l)
    image = np.einsum("npi,il->npl", A_big[:, idx], L.frame)
    res = image - np.einsum("nk,kpl->npl", L.frame, np.einsum("nk,npl->kpl", L.frame, image))
    scale = np.maximum(1.0, np.linalg.norm(image, axis=0))
    rel = np.linalg.norm(res, axis=0) / scale
    p, l = np.unravel_index(int(np.argmax(rel)), rel.shape)
    worst = float(rel[p, l])
    if worst > tol.residual:
        return OracleResult(False, "closure: A(Y, F*L) is not inside L", angle, worst, (int(p), int(l)))
    return OracleResult(True, "", angle, worst, (int(p), int(l)))


def certify(P: IdealPoint, tol: Tolerances = DEFAULT_TOL) -> IdealPoint:
    """Copy of ``P`` whose ``certified`` flag is the oracle verdict."""
    ok = membership_oracle(P.transversal, P.config, P.subspace, tol).certified
    return IdealPoint(P.config, P.subspace, ok)


def ideal_from_points(F: Transversal, points, tol: Tolerances = DEFAULT_TOL) -> IdealPoint:
    """The ideal of ``d`` distinct points: ``(Y, F ∩ m_Y)`` with unit weights."""
    pts = [np.atleast_1d(np.asarray(p, float)) for p in points]
    for i in range(len(pts)):
        for j in range(i):
            if np.linalg.norm(pts[i] - pts[j]) <= MERGE_TOL:
                raise MergeToleranceViolation("repeated point; use a weighted constructor")
    Y = WeightedConfig.from_points(pts)
    return certify(IdealPoint(Y, vanishing_subspace(F, Y, tol)), tol)


def ideal_from_config(F: Transversal, Y: WeightedConfig, tol: Tolerances = DEFAULT_TOL) -> IdealPoint:
    """The ideal ``m_Y`` itself; only of codimension ``|Y|`` when ``m = 1`` or all weights are 1."""
    return certify(IdealPoint(Y, vanishing_subspace(F, Y, tol)), tol)


def cluster_vanishing(F: Transversal, y, k: int, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, Subspace]:
    """Cluster ``(y, F ∩ m_y^j)`` where ``j`` is chosen so the codimension is ``k``."""
    j = next((j for j in range(1, k + 1) if jet_dimension(F.m, j) == k), None)
    if j is None:
        raise CodimMismatch(f"no power of the maximal ideal in {F.m} variables has codimension {k}")
    y = np.atleast_1d(np.asarray(y, float))
    return y, vanishing_subspace(F, WeightedConfig.from_points([y], [j]), tol)


def curve_taylor_matrix(F: Transversal, y, velocities: Sequence, k: int) -> np.ndarray:
    """Rows ``f -> [s^j] f(gamma(s))`` for ``j < k``, ``gamma(s) = y + sum_l s^l c_l``."""
    y = np.atleast_1d(np.asarray(y, float))
    comps = []
    for j in range(F.m):
        c = np.zeros(k)
        c[0] = y[j]
        for l, v in enumerate(velocities[: k - 1], start=1):
            c[l] = np.atleast_1d(v)[j]
        comps.append(c)
    cols = []
    for beta in F.basis:
        acc = np.zeros(k)
        acc[0] = 1.0
        for j, e in enumerate(beta):
            for _ in range(e):
                acc = np.convolve(acc, comps[j])[:k]
        cols.append(acc)
    return np.column_stack(cols)


def curvilinear_cluster(F: Transversal, y, velocities: Sequence, k: int,
                        tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, Subspace]:
    """Cluster for the curvilinear ideal of the curve jet ``y + s c_1 + s^2 c_2 + ...``.

    The ideal consists of functions whose restriction to the curve vanishes
    to order ``k``; it has codimension ``k`` when ``c_1 != 0``.
    """
    if np.linalg.norm(np.atleast_1d(velocities[0])) == 0.0:
        raise InputError("curvilinear cluster needs a non-zero first velocity")
    T = curve_taylor_matrix(F, y, velocities, k)
    K, rank = _null(T, tol.rank)
    if rank < k:
        raise TransversalityFail(f"curve jet functionals have rank {rank} < {k}")
    return np.atleast_1d(np.asarray(y, float)), Subspace(F, K)


def intersect(subspaces: Sequence[Subspace], tol: Tolerances = DEFAULT_TOL) -> Subspace:
    F = subspaces[0].ambient
    rows = [S.complement().frame.T for S in subspaces]
    return Subspace(F, _null(np.vstack(rows), tol.rank)[0])


def ideal_from_clusters(F: Transversal, clusters: Sequence[tuple], tol: Tolerances = DEFAULT_TOL) -> IdealPoint:
    """Intersect single-point ideals ``(x_i^{k_i}, L_i)`` with ``k_i = codim L_i``."""
    if not clusters:
        raise InputError("no clusters given")
    pts, subs = [], []
    for x, Li in clusters:
        x = np.atleast_1d(np.asarray(x, float))
        Yi = WeightedConfig.from_points([x], [Li.codim])
        verdict = membership_oracle(F, Yi, Li, tol)
        if not verdict:
            raise ClusterOracleFail(f"cluster at {tuple(x)} rejected: {verdict.reason}")
        pts.append(x)
        subs.append(Li)
    Y = WeightedConfig.from_points(pts, [S.codim for S in subs])
    L = intersect(subs, tol)
    if L.codim != Y.degree:
        raise CodimMismatch(f"intersection has codimension {L.codim}, expected {Y.degree}")
    return certify(IdealPoint(Y, L), tol)


@dataclass(frozen=True, eq=False)
class QuotientAlgebra:
    """The algebra ``F / L`` realised on the orthogonal complement of ``L``.

    ``structure[a, b, e]`` is the ``e``-th coordinate of ``b_a * b_b``.
    """

    base: IdealPoint
    frame: np.ndarray = field(repr=False)  # r x d, orthonormal basis of L^perp
    structure: np.ndarray = field(repr=False)
    unit: np.ndarray
    interpolator: InterpolationOperator = field(repr=False)

    @property
    def d(self) -> int:
        return self.frame.shape[1]

    def basis(self) -> list[Polynomial]:
        F = self.base.transversal
        return [F.poly(c) for c in self.frame.T]

    def multiply(self, u, v) -> np.ndarray:
        return np.einsum("a,b,abe->e", u, v, self.structure)

    def mult_matrix(self, u) -> np.ndarray:
        """Matrix of ``v -> u*v`` in the quotient basis."""
        return np.einsum("a,abe->eb", u, self.structure)

    def reduce(self, f: Function) -> np.ndarray:
        F = self.base.transversal
        return self.frame.T @ F.vector(self.interpolator(f))

    def commutativity_residual(self) -> float:
        return float(np.abs(self.structure - self.structure.transpose(1, 0, 2)).max())

    def associativity_residual(self) -> float:
        # (b_a b_b) b_c vs b_a (b_b b_c)
        left = np.einsum("abe,ecf->abcf", self.structure, self.structure)
        right = np.einsum("bce,aef->abcf", self.structure, self.structure)
        return float(np.abs(left - right).max(initial=0.0))

    def unit_residual(self) -> float:
        M = self.mult_matrix(self.unit)
        return float(np.abs(M - np.eye(self.d)).max(initial=0.0))


def quotient_algebra(F: Transversal, P: IdealPoint, tol: Tolerances = DEFAULT_TOL) -> QuotientAlgebra:
    """Structure constants of ``R / I`` via products interpolated back into ``F``."""
    if P.transversal != F:
        raise InputError("ideal point lives in a different transversal")
    A = interpolator_for(F, P.config, tol)
    A_big = _interpolation_on_products(F, A)
    B = P.subspace.complement().frame
    d, idx = B.shape[1], F.product_index
    Z = np.zeros((len(F.product_basis), d, d))
    np.add.at(Z, idx.ravel(), np.einsum("ia,jb->ijab", B, B).reshape(-1, d, d))
    images = np.einsum("ni,iab->nab", A_big, Z)
    c = np.einsum("ne,nab->abe", B, images)
    c = 0.5 * (c + c.transpose(1, 0, 2))
    one = np.zeros(F.r)
    one[0] = 1.0
    unit = B.T @ (A_big[:, 0] if len(F.product_basis) else one)
    return QuotientAlgebra(P, B, c, unit, A)


def reduce_mod_ideal(Q: QuotientAlgebra, f: Function) -> np.ndarray:
    return Q.reduce(f)


def coordinate_operators(Q: QuotientAlgebra) -> list[np.ndarray]:
    """Multiplication by each coordinate function, as ``d x d`` matrices."""
    m = Q.base.transversal.m
    if Q.base.transversal.max_degree < 2:
        raise InputError("transversal must contain the linear functions")
    return [Q.mult_matrix(Q.reduce(Polynomial.variable(m, j))) for j in range(m)]


@dataclass(frozen=True)
class SpectralCluster:
    point: np.ndarray
    weight: int
    basis: np.ndarray  # d x k, orthonormal basis of the generalized eigenspace


def _group(values: np.ndarray, radius: float) -> list[list[int]]:
    order = np.argsort(values.real + 1e-3 * values.imag)
    groups: list[list[int]] = []
    remaining = list(order)
    while remaining:
        seed = remaining.pop(0)
        group = [seed]
        changed = True
        while changed:
            changed = False
            for i in list(remaining):
                if min(abs(values[i] - values[g]) for g in group) <= radius:
                    group.append(i)
                    remaining.remove(i)
                    changed = True
        groups.append(group)
    return groups


def spectral_clusters(Q: QuotientAlgebra, tol: Tolerances = DEFAULT_TOL, retries: int = 3,
                      seed: int = 0) -> list[SpectralCluster]:
    """Joint generalized eigenspaces of the coordinate multiplication operators."""
    Ms = coordinate_operators(Q)
    d, m = Q.d, len(Ms)
    rng = np.random.default_rng(seed)
    last_error: Exception | None = None
    for _ in range(retries + 1):
        c = rng.standard_normal(m)
        c /= np.linalg.norm(c)
        M = sum(ci * Mi for ci, Mi in zip(c, Ms))
        scale = max(1.0, float(np.linalg.norm(M, 2)))
        # a k-fold defective eigenvalue is spread over ~ (eps*|M|)^(1/k)
        radius = max(tol.cluster_radius, 10.0 * (1e-15 * scale) ** (1.0 / d))
        vals = np.linalg.eigvals(M)
        groups = _group(vals, radius)
        centers = [vals[g].mean() for g in groups]
        if any(abs(cz.imag) > tol.cluster_radius * scale for cz in centers):
            raise ComplexSpectrum(f"eigenvalue cluster centres {centers} are not real")
        gaps = [abs(a - b) for i, a in enumerate(centers) for b in centers[:i]]
        if gaps and min(gaps) < 4 * radius:
            last_error = ClusterAmbiguity(f"eigenvalue clusters {min(gaps):.3g} apart at radius {radius:.3g}")
            continue
        out = []
        ok = True
        for g, cz in zip(groups, centers):
            spread = max(abs(vals[i] - cz) for i in g)
            T, Z, sdim = scipy.linalg.schur(M.astype(complex), output="complex",
                                            sort=lambda z, cz=cz, s=spread: abs(z - cz) <= 2 * s + radius)
            if sdim != len(g):
                ok = False
                last_error = ClusterAmbiguity("Schur reordering did not isolate the cluster")
                break
            V = Z[:, :sdim]
            V = _orth(np.hstack([V.real, V.imag]), 1e-6)
            if V.shape[1] != sdim:
                ok = False
                last_error = ClusterAmbiguity("invariant subspace is not real")
                break
            local = [V.T @ Mi @ V for Mi in Ms]
            point = np.array([np.trace(Ni) / sdim for Ni in local])
            # distinct points whose projections happen to fall within the radius
            if max(np.abs(np.linalg.eigvals(Ni) - yi).max() for Ni, yi in zip(local, point)) > radius:
                ok = False
                last_error = ClusterAmbiguity("an eigenvalue cluster mixes distinct spectrum points")
                break
            out.append(SpectralCluster(point, sdim, V))
        if ok:
            return out
    raise last_error  # type: ignore[misc]


def wspec_from_algebra(Q: QuotientAlgebra, tol: Tolerances = DEFAULT_TOL) -> WeightedConfig:
    """Weighted spectrum read off the multiplication operators."""
    clusters = spectral_clusters(Q, tol)
    return WeightedConfig.from_points([c.point for c in clusters], [c.weight for c in clusters])


def nilpotency_index(Q: QuotientAlgebra, cluster: SpectralCluster, tol: Tolerances = DEFAULT_TOL) -> int:
    """Least ``n`` with ``n_y^n = 0`` in the local algebra of ``cluster``."""
    V = cluster.basis
    Ns = [V.T @ Mi @ V - yi * np.eye(cluster.weight) for Mi, yi in zip(coordinate_operators(Q), cluster.point)]
    cutoff = 1e-6 * max(1.0, max(np.linalg.norm(N, 2) for N in Ns))
    space = np.eye(cluster.weight)
    for n in range(1, cluster.weight + 2):
        U, s, _ = np.linalg.svd(np.hstack([N @ space for N in Ns]), full_matrices=False)
        space = U[:, s > cutoff]
        if space.shape[1] == 0:
            return n
    return cluster.weight + 1


def local_dimensions(Q: QuotientAlgebra, tol: Tolerances = DEFAULT_TOL) -> list[dict]:
    """Per spectrum point: location, local dimension and nilpotency index."""
    return [
        {"point": c.point.tolist(), "dimension": c.weight, "nilpotency": nilpotency_index(Q, c, tol)}
        for c in spectral_clusters(Q, tol)
    ]


def primary_decomposition(F: Transversal, P: IdealPoint, tol: Tolerances = DEFAULT_TOL) -> list[IdealPoint]:
    """Split ``P`` into single-point ideals ``I + n_{y_i}`` via spectral projectors."""
    if len(P.config) == 1:
        return [P]
    Q = quotient_algebra(F, P, tol)
    clusters = spectral_clusters(Q, tol)
    found = WeightedConfig.from_points([c.point for c in clusters], [c.weight for c in clusters])
    if not found.matches(P.config, max(tol.cluster_radius, 1e-7)):
        raise ClusterAmbiguity(f"recovered spectrum {found.to_json()} differs from {P.config.to_json()}")
    out = []
    for i, ci in enumerate(clusters):
        others = [c.basis for j, c in enumerate(clusters) if j != i]
        lifted = Q.frame @ np.hstack(others)
        Li = Subspace.span(F, np.hstack([P.subspace.frame, lifted]), tol.rank)
        # snap to the exact configuration point closest to the recovered one
        y = min(P.config.points, key=lambda p: np.linalg.norm(p - ci.point))
        Yi = WeightedConfig.from_points([y], [ci.weight])
        if Li.codim != ci.weight:
            raise CodimMismatch(f"component at {tuple(y)} has codimension {Li.codim}, expected {ci.weight}")
        out.append(certify(IdealPoint(Yi, Li), tol))
    return out


def change_transversal_restrict(F: Transversal, P: IdealPoint, tol: Tolerances = DEFAULT_TOL) -> IdealPoint:
    """``(Y, L') -> (Y, F ∩ L')`` for ``F ⊆ F'``."""
    Fp = P.transversal
    if not Fp.contains(F):
        raise InputError("target transversal is not contained in the source")
    if F == Fp:
        return P
    outside = np.arange(F.r, Fp.r)  # graded-lex prefixes: F's basis comes first
    frame = P.subspace.frame
    N, rank = _null(frame[outside, :], tol.rank)
    if rank < len(outside):
        raise NotTransverse(f"L' + F has deficiency {len(outside) - rank}")
    inner = (frame @ N)[: F.r, :]
    return certify(IdealPoint(P.config, Subspace.span(F, inner, tol.rank)), tol)


def change_transversal_section(Fp: Transversal, P: IdealPoint, tol: Tolerances = DEFAULT_TOL) -> IdealPoint:
    """``(Y, L) -> (Y, L + (id - A(Y,.))(F^perp))`` for ``F ⊆ F'``.

    The added vectors must vanish on the jets of ``m_Y``; this is checked.
    """
    F = P.transversal
    if not Fp.contains(F):
        raise InputError("target transversal does not contain the source")
    if F == Fp:
        return P
    A = interpolator_for(F, P.config, tol)
    extra = np.zeros((Fp.r, Fp.r - F.r))
    for col, beta in enumerate(Fp.basis[F.r:]):
        v = Polynomial.monomial(beta)
        extra[:, col] = Fp.vector(v - A(v))
    J = jet_matrix(Fp, P.config)
    defect = float(np.abs(J @ extra).max(initial=0.0)) / max(1.0, float(np.abs(extra).max(initial=0.0)))
    if defect > tol.residual:
        raise NotTransverse(f"(id - A)(F^perp) leaves F' ∩ m_Y (defect {defect:.3g})")
    lifted = np.zeros((Fp.r, P.subspace.dim))
    lifted[: F.r, :] = P.subspace.frame
    # block triangular (the new columns carry distinct monomials outside F), so the
    # rank is full by construction; no cut-off, which would misfire when A is badly conditioned
    Qf, _ = np.linalg.qr(np.hstack([lifted, extra]))
    L = Subspace(Fp, Qf)
    return certify(IdealPoint(P.config, L), tol)


def random_cluster(F: Transversal, y, k: int, rng: np.random.Generator,
                   tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, Subspace, str]:
    """Random single-point ideal of codimension ``k`` at ``y``.

    The third entry identifies the construction: equal keys mean equal ideals.
    """
    if k == 1 or F.m == 1:
        j = 1 if F.m > 1 else k
        return (*cluster_vanishing(F, y, jet_dimension(F.m, j), tol), ("vanishing",))
    fat = next((j for j in range(2, k + 1) if jet_dimension(F.m, j) == k), None)
    if fat is not None and rng.random() < 0.3:
        return (*cluster_vanishing(F, y, k, tol), ("fat",))
    vel = [rng.standard_normal(F.m) for _ in range(k - 1)]
    vel[0] /= np.linalg.norm(vel[0])
    return (*curvilinear_cluster(F, y, vel, k, tol), ("curvilinear",) + tuple(tuple(v) for v in vel))


def _random_ideal(F: Transversal, d: int, rng: np.random.Generator, weights, points, tol: Tolerances,
                  min_sep: float) -> tuple[IdealPoint, tuple]:
    weights = list(weights) if weights is not None else _random_composition(rng, d)
    if points is None:
        points = random_points(rng, F.m, len(weights), min_sep=min_sep)
    built = [random_cluster(F, y, k, rng, tol) for y, k in zip(points, weights)]
    key = tuple((tuple(np.asarray(y, float).tolist()), kind) for y, _, kind in built)
    if len(built) == 1:
        y, L, _ = built[0]
        return certify(IdealPoint(WeightedConfig.from_points([y], [L.codim]), L), tol), key
    return ideal_from_clusters(F, [(y, L) for y, L, _ in built], tol), key


def random_ideal_point(F: Transversal, d: int, rng: np.random.Generator, weights: Sequence[int] | None = None,
                       points=None, tol: Tolerances = DEFAULT_TOL, min_sep: float = 0.3) -> IdealPoint:
    """Certified ideal of codimension ``d`` assembled from random single-point ideals."""
    return _random_ideal(F, d, rng, weights, points, tol, min_sep)[0]


def perturb_subspace(F: Transversal, Y: WeightedConfig, L: Subspace, theta: float,
                     rng: np.random.Generator) -> Subspace:
    """Rotate one direction of ``L`` by ``theta`` towards ``L^perp``.

    The rotated direction is taken orthogonal to ``F ∩ m_Y`` when possible, so
    the containment condition keeps holding.
    """
    K = vanishing_subspace(F, Y)
    R = K.residual(L.frame)
    # when L is just F ∩ m_Y the residual is rounding noise
    free = Subspace.span(F, R) if L.dim and np.linalg.norm(R) > 1e-8 else L
    u = free.frame @ rng.standard_normal(free.dim)
    u /= np.linalg.norm(u)
    w = L.complement().frame @ rng.standard_normal(L.codim)
    w /= np.linalg.norm(w)
    rest = Subspace.span(F, L.frame - np.outer(u, u @ L.frame), 1e-8)
    new = np.hstack([rest.frame, (np.cos(theta) * u + np.sin(theta) * w)[:, None]])
    return Subspace(F, new)


@dataclass(frozen=True)
class InjectivityReport:
    passed: bool
    pairs: int
    equal_spectrum_pairs: int
    min_separation: float
    transversal_ok: bool


def injectivity_probe(F: Transversal, d: int, samples: int = 500, rng=None,
                      tol: Tolerances = DEFAULT_TOL) -> InjectivityReport:
    """Sample pairs of distinct ideals and check their ``(Y, L)`` coordinates differ.

    Pairs sharing a spectrum (built from different single-point ideals at the
    same support) must have subspaces more than ``1e-8`` apart.
    """
    rng = np.random.default_rng(rng)
    trans = transversality_check(F, d, samples=30, rng=rng, tol=tol, strict=False).passed
    min_sep = np.inf
    same = 0
    for _ in range(samples):
        weights = _random_composition(rng, d)
        pts = random_points(rng, F.m, len(weights))
        P1, key1 = _random_ideal(F, d, rng, weights, pts, tol, 0.3)
        share = F.m > 1 and max(weights) > 1 and rng.random() < 0.5
        while True:
            if share:
                P2, key2 = _random_ideal(F, d, rng, weights, pts, tol, 0.3)
            else:
                P2, key2 = _random_ideal(F, d, rng, None, None, tol, 0.3)
            if key2 != key1:  # the two ideals must be distinct by construction
                break
        for P in (P1, P2):
            if not P.certified:
                raise InjectivityWitnessFail("sampled ideal failed certification", (P1, P2))
        if P1.config.matches(P2.config, MERGE_TOL):
            same += 1
            sep = subspace_distance(P1.subspace, P2.subspace)
            min_sep = min(min_sep, sep)
            if sep <= 1e-8:
                raise InjectivityWitnessFail(f"distinct ideals share coordinates (separation {sep:.3g})", (P1, P2))
    return InjectivityReport(True, samples, same, float(min_sep), trans)
