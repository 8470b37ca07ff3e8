"""Dense multivariate polynomials, derivative tensors, jets and simplex moments.

Multi-indices are plain tuples of non-negative ints.  All bases are listed in
graded-lex order: by total degree, then lexicographically with ``x_1`` first
(so in two variables the linear part reads ``x, y``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

MultiIndex = tuple[int, ...]


def glex_key(alpha: Sequence[int]) -> tuple:
    """Sort key realising graded-lex order."""
    return (sum(alpha), tuple(-a for a in alpha))


@lru_cache(maxsize=None)
def multi_indices(m: int, degree: int) -> tuple[MultiIndex, ...]:
    """All multi-indices in ``m`` variables of total degree exactly ``degree``."""
    if m == 0:
        return ((),) if degree == 0 else ()
    out = []
    for first in range(degree, -1, -1):
        for rest in multi_indices(m - 1, degree - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def graded_lex(m: int, max_degree: int) -> tuple[MultiIndex, ...]:
    """All multi-indices of total degree ``<= max_degree`` in graded-lex order."""
    return tuple(a for k in range(max_degree + 1) for a in multi_indices(m, k))


def jet_dimension(m: int, k: int) -> int:
    """Number of Taylor coefficients of order ``< k`` in ``m`` variables."""
    return math.comb(m + k - 1, m)


def _factorial_ratio(beta: Sequence[int], alpha: Sequence[int]) -> int:
    """prod beta_j! / (beta_j - alpha_j)!  (zero when alpha is not below beta)."""
    out = 1
    for b, a in zip(beta, alpha):
        if a > b:
            return 0
        out *= math.perm(b, a)
    return out


def multinomial(alpha: Sequence[int]) -> int:
    out = math.factorial(sum(alpha))
    for a in alpha:
        out //= math.factorial(a)
    return out


def _as_point(x, dim: int) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (dim,):
        raise ValueError(f"expected a point of dimension {dim}, got shape {x.shape}")
    return x


class Polynomial:
    """Real polynomial in ``dim`` variables stored as ``{multi-index: coeff}``.

    Instances are immutable; arithmetic returns new objects.  Coefficients that
    are exactly zero are dropped on construction.
    """

    __slots__ = ("dim", "_coeffs")

    def __init__(self, dim: int, coeffs: Mapping[Sequence[int], float] | None = None):
        if dim < 0:
            raise ValueError("dim must be non-negative")
        clean: dict[MultiIndex, float] = {}
        for alpha, c in (coeffs or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != dim or any(a < 0 for a in alpha):
                raise ValueError(f"bad multi-index {alpha} for dim={dim}")
            c = float(c)
            if c != 0.0:
                clean[alpha] = clean.get(alpha, 0.0) + c
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "_coeffs", {a: c for a, c in clean.items() if c != 0.0})

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # construction helpers
    @classmethod
    def constant(cls, dim: int, c: float) -> Polynomial:
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def monomial(cls, alpha: Sequence[int], c: float = 1.0) -> Polynomial:
        return cls(len(alpha), {tuple(alpha): c})

    @classmethod
    def variable(cls, dim: int, j: int) -> Polynomial:
        alpha = [0] * dim
        alpha[j] = 1
        return cls(dim, {tuple(alpha): 1.0})

    @classmethod
    def zero(cls, dim: int) -> Polynomial:
        return cls(dim)

    @classmethod
    def from_vector(cls, basis: Sequence[MultiIndex], vec) -> Polynomial:
        vec = np.asarray(vec, dtype=float)
        if not basis:
            raise ValueError("empty basis has no dimension")
        return cls(len(basis[0]), dict(zip(basis, vec)))

    @property
    def coeffs(self) -> Mapping[MultiIndex, float]:
        return MappingProxyType(self._coeffs)

    def terms(self) -> list[tuple[MultiIndex, float]]:
        return sorted(self._coeffs.items(), key=lambda kv: glex_key(kv[0]))

    @property
    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(a) for a in self._coeffs), default=-1)

    def is_zero(self) -> bool:
        return not self._coeffs

    def coefficient_vector(self, basis: Sequence[MultiIndex], strict: bool = True) -> np.ndarray:
        index = {a: i for i, a in enumerate(basis)}
        out = np.zeros(len(basis))
        for a, c in self._coeffs.items():
            i = index.get(a)
            if i is None:
                if strict:
                    raise ValueError(f"term {a} lies outside the given basis")
                continue
            out[i] = c
        return out

    # arithmetic
    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.dim != self.dim:
                raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Polynomial.constant(self.dim, float(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._coeffs)
        for a, c in other._coeffs.items():
            out[a] = out.get(a, 0.0) + c
        return Polynomial(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.dim, {a: -c for a, c in self._coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Polynomial(self.dim, {a: c * float(other) for a, c in self._coeffs.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[MultiIndex, float] = {}
        for a, c in self._coeffs.items():
            for b, e in other._coeffs.items():
                k = tuple(x + y for x, y in zip(a, b))
                out[k] = out.get(k, 0.0) + c * e
        return Polynomial(self.dim, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (1.0 / float(other))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        out = Polynomial.constant(self.dim, 1.0)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.dim == other.dim and self._coeffs == other._coeffs

    def __hash__(self):
        return hash((self.dim, tuple(self.terms())))

    def max_abs_diff(self, other: Polynomial) -> float:
        diff = self - other
        return max((abs(c) for c in diff._coeffs.values()), default=0.0)

    # calculus
    def __call__(self, x) -> float:
        x = _as_point(x, self.dim)
        if not self._coeffs:
            return 0.0
        exps = np.array(list(self._coeffs.keys()), dtype=int).reshape(-1, self.dim)
        vals = np.array(list(self._coeffs.values()))
        return float(vals @ np.prod(x ** exps, axis=1))

    def diff(self, alpha: Sequence[int]) -> Polynomial:
        """Partial derivative ``d^alpha``."""
        alpha = tuple(alpha)
        if len(alpha) != self.dim:
            raise ValueError("multi-index has wrong length")
        out = {}
        for beta, c in self._coeffs.items():
            f = _factorial_ratio(beta, alpha)
            if f:
                out[tuple(b - a for b, a in zip(beta, alpha))] = c * f
        return Polynomial(self.dim, out)

    # serialization
    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [{"alpha": list(a), "c": c} for a, c in self.terms()],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> Polynomial:
        dim = int(obj["dim"])
        coeffs: dict[MultiIndex, float] = {}
        for term in obj.get("terms", []):
            a = tuple(int(v) for v in term["alpha"])
            coeffs[a] = coeffs.get(a, 0.0) + float(term["c"])
        return cls(dim, coeffs)

    def __repr__(self):
        if not self._coeffs:
            return f"Polynomial(dim={self.dim}, 0)"
        parts = []
        for a, c in self.terms():
            mono = "*".join(
                f"x{j}" + (f"^{e}" if e > 1 else "") for j, e in enumerate(a) if e
            )
            parts.append(f"{c:g}" + (f"*{mono}" if mono else ""))
        return f"Polynomial(dim={self.dim}, " + " + ".join(parts) + ")"


def poly_eval(p: Polynomial, x) -> float:
    return p(x)


def random_polynomial(rng: np.random.Generator, m: int, degree: int, scale: float = 1.0) -> Polynomial:
    """Dense polynomial with standard-normal coefficients on all terms of degree <= ``degree``."""
    basis = graded_lex(m, degree)
    return Polynomial.from_vector(basis, scale * rng.standard_normal(len(basis)))


@dataclass(frozen=True)
class SymmetricForm:
    """Symmetric r-linear form on R^m, stored by its raw ``d^alpha`` components.

    ``coeffs[alpha]`` (with ``|alpha| = order``) is the value of the form on
    the argument list containing ``alpha_j`` copies of the unit vector ``e_j``.
    """

    dim: int
    order: int
    coeffs: Mapping[MultiIndex, float]

    def __post_init__(self):
        full = {a: 0.0 for a in multi_indices(self.dim, self.order)}
        for a, c in self.coeffs.items():
            a = tuple(a)
            if a not in full:
                raise ValueError(f"multi-index {a} is not of degree {self.order}")
            full[a] = float(c)
        object.__setattr__(self, "coeffs", MappingProxyType(full))

    @classmethod
    def zeros(cls, dim: int, order: int) -> SymmetricForm:
        return cls(dim, order, {})

    @classmethod
    def from_vector(cls, dim: int, order: int, vec) -> SymmetricForm:
        return cls(dim, order, dict(zip(multi_indices(dim, order), np.asarray(vec, float))))

    def vector(self) -> np.ndarray:
        """Components in graded-lex order of the degree-``order`` multi-indices."""
        return np.array([self.coeffs[a] for a in multi_indices(self.dim, self.order)])

    def tensor(self) -> np.ndarray:
        """Full ``(m,)*r`` array; entry ``[j_1..j_r]`` is ``t_{e_j1+...+e_jr}``."""
        shape = (self.dim,) * self.order
        out = np.empty(shape)
        for idx in itertools.product(range(self.dim), repeat=self.order):
            alpha = [0] * self.dim
            for j in idx:
                alpha[j] += 1
            out[idx] = self.coeffs[tuple(alpha)]
        return out

    def __call__(self, *vectors) -> float:
        if len(vectors) != self.order:
            raise ValueError(f"form of order {self.order} got {len(vectors)} arguments")
        t = self.tensor()
        for v in vectors:
            v = _as_point(v, self.dim)
            t = np.tensordot(t, v, axes=([0], [0])) if t.ndim else t
        return float(t)

    def _check(self, other: SymmetricForm):
        if (self.dim, self.order) != (other.dim, other.order):
            raise ValueError("forms of different shape")

    def __add__(self, other: SymmetricForm) -> SymmetricForm:
        self._check(other)
        return SymmetricForm(self.dim, self.order, {a: c + other.coeffs[a] for a, c in self.coeffs.items()})

    def __sub__(self, other: SymmetricForm) -> SymmetricForm:
        self._check(other)
        return SymmetricForm(self.dim, self.order, {a: c - other.coeffs[a] for a, c in self.coeffs.items()})

    def __mul__(self, s: float) -> SymmetricForm:
        return SymmetricForm(self.dim, self.order, {a: c * float(s) for a, c in self.coeffs.items()})

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)


def symform_eval(T: SymmetricForm, *vectors) -> float:
    return T(*vectors)


@dataclass(frozen=True)
class SmoothFnOracle:
    """Black-box smooth function given through its derivative tensors."""

    dim: int
    derivative_tensor: Callable[[np.ndarray, int], SymmetricForm]

    def __call__(self, x) -> float:
        return self.derivative_tensor(_as_point(x, self.dim), 0).coeffs[(0,) * self.dim]

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> SmoothFnOracle:
        return cls(p.dim, lambda x, r: _poly_derivative_tensor(p, x, r))


def _poly_derivative_tensor(p: Polynomial, x, r: int) -> SymmetricForm:
    x = _as_point(x, p.dim)
    return SymmetricForm(p.dim, r, {a: p.diff(a)(x) for a in multi_indices(p.dim, r)})


def derivative_tensor(f: Polynomial | SmoothFnOracle, x, r: int) -> SymmetricForm:
    """The r-fold derivative of ``f`` at ``x`` as a symmetric form."""
    if r < 0:
        raise ValueError("order must be non-negative")
    if isinstance(f, Polynomial):
        return _poly_derivative_tensor(f, x, r)
    return f.derivative_tensor(_as_point(x, f.dim), r)


@dataclass(frozen=True)
class AffineSimplex:
    """Affine map from the standard r-simplex sending vertex i to ``vertices[i]``."""

    vertices: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        verts = tuple(tuple(float(c) for c in v) for v in self.vertices)
        if not verts:
            raise ValueError("a simplex needs at least one vertex")
        if len({len(v) for v in verts}) != 1:
            raise ValueError("vertices of different dimension")
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def of(cls, points) -> AffineSimplex:
        return cls(tuple(tuple(np.atleast_1d(np.asarray(p, float))) for p in points))

    @property
    def order(self) -> int:
        return len(self.vertices) - 1

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    def array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float).reshape(len(self.vertices), self.dim)

    def face(self, i: int) -> AffineSimplex:
        if not 0 <= i <= self.order:
            raise IndexError(i)
        if self.order == 0:
            raise ValueError("a 0-simplex has no faces")
        return AffineSimplex(self.vertices[:i] + self.vertices[i + 1:])

    def prefix(self, j: int) -> AffineSimplex:
        return AffineSimplex(self.vertices[: j + 1])

    def __call__(self, bary) -> np.ndarray:
        """Image of a point given in barycentric coordinates (length r+1)."""
        return np.asarray(bary, float) @ self.array()


@lru_cache(maxsize=None)
def _moment_fraction(a: tuple[int, ...]) -> Fraction:
    r = len(a)
    num = math.factorial(r)
    for ai in a:
        num *= math.factorial(ai)
    return Fraction(num, math.factorial(r + sum(a)))


def simplex_moment(a: Sequence[int]) -> float:
    """Integral of ``t_1^a_1 ... t_r^a_r`` over the r-simplex of unit volume.

    Equals ``r! prod(a_i!) / (r + |a|)!``, evaluated in integers.
    """
    a = tuple(int(v) for v in a)
    if any(v < 0 for v in a):
        raise ValueError("exponents must be non-negative")
    return float(_moment_fraction(a))


def affine_moments(simplex: AffineSimplex, max_degree: int) -> dict[MultiIndex, float]:
    """``{beta: integral of x^beta over the simplex}`` for all ``|beta| <= max_degree``.

    Each power of the affine map is expanded as a polynomial in the
    coordinates ``t_1..t_r`` of the standard simplex and integrated term by
    term with :func:`simplex_moment`.  Integrals use the unit-volume measure.
    """
    verts = simplex.array()
    m, r = simplex.dim, simplex.order
    base = graded_lex(m, max_degree)
    if r == 0 or np.all(verts == verts[0]):
        x0 = verts[0]
        return {b: float(np.prod(x0 ** np.array(b))) for b in base}

    x0 = verts[0]
    edges = verts[1:] - x0  # (r, m)
    # linear forms l_j(t) = x0_j + sum_i t_i edges[i, j] as t-polynomials
    lin = []
    for j in range(m):
        terms = {(0,) * r: x0[j]}
        for i in range(r):
            e = [0] * r
            e[i] = 1
            terms[tuple(e)] = edges[i, j]
        lin.append(Polynomial(r, terms))

    powers: dict[MultiIndex, Polynomial] = {(0,) * m: Polynomial.constant(r, 1.0)}
    out: dict[MultiIndex, float] = {}
    for beta in base:
        if beta not in powers:
            j = next(k for k, b in enumerate(beta) if b > 0)
            prev = beta[:j] + (beta[j] - 1,) + beta[j + 1:]
            powers[beta] = powers[prev] * lin[j]
        out[beta] = sum(c * float(_moment_fraction(a)) for a, c in powers[beta].coeffs.items())
    return out


@dataclass(frozen=True)
class Jet:
    """Taylor jet: ``coeffs[alpha] = d^alpha f(y) / alpha!`` for ``|alpha| <= order``."""

    base: tuple[float, ...]
    order: int
    coeffs: Mapping[MultiIndex, float] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.base)

    def vector(self) -> np.ndarray:
        return np.array([self.coeffs[a] for a in graded_lex(self.dim, self.order)])

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def taylor_polynomial(self) -> Polynomial:
        """The polynomial ``sum_alpha c_alpha (x - y)^alpha`` in monomial form."""
        m = self.dim
        shifts = [Polynomial(m, {tuple(int(i == j) for i in range(m)): 1.0, (0,) * m: -self.base[j]})
                  for j in range(m)]
        out = Polynomial.zero(m)
        for alpha, c in self.coeffs.items():
            term = Polynomial.constant(m, c)
            for j, e in enumerate(alpha):
                term = term * shifts[j] ** e
            out = out + term
        return out


def jet(f: Polynomial | SmoothFnOracle, y, order: int) -> Jet:
    """The ``order``-jet of ``f`` at ``y`` (Taylor-scaled coefficients)."""
    y = _as_point(y, f.dim)
    coeffs = {}
    for r in range(order + 1):
        T = derivative_tensor(f, y, r)
        for a in multi_indices(f.dim, r):
            coeffs[a] = T.coeffs[a] / math.prod(math.factorial(v) for v in a)
    return Jet(tuple(y), order, coeffs)


def monomial_derivative_row(basis: Iterable[MultiIndex], y, alpha: MultiIndex, taylor: bool) -> np.ndarray:
    """Row ``[d^alpha x^beta (y)]_beta`` (divided by ``alpha!`` if ``taylor``)."""
    y = np.asarray(y, float)
    scale = math.prod(math.factorial(a) for a in alpha) if taylor else 1
    row = []
    for beta in basis:
        f = _factorial_ratio(beta, alpha)
        if f == 0:
            row.append(0.0)
        else:
            row.append(f / scale * float(np.prod(y ** (np.array(beta) - np.array(alpha)))))
    return np.array(row)
