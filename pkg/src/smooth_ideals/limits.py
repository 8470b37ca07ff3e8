"""Limits of ideals of colliding points along polynomial curves."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .errors import CertificationFailure, ExtrapolationDivergence, InputError, MergeToleranceViolation
from .idealspace import (
    DEFAULT_TOL,
    IdealPoint,
    OracleResult,
    Subspace,
    Tolerances,
    Transversal,
    curvilinear_cluster,
    intersect,
    jet_matrix,
    local_dimensions,
    membership_oracle,
    monomial_transversal,
    quotient_algebra,
    subspace_distance,
    vanishing_subspace,
)
from .kergin import build_interpolator, default_complement
from .polycalc import Polynomial
from .spectrum import MERGE_TOL, WeightedConfig

WORKING_DPS = 50
EXTRAPOLATION_TOL = 1e-7


def default_schedule(t0: float = 0.1, n: int = 9) -> list[float]:
    return [t0 * 2.0 ** (-k) for k in range(n)]


@dataclass(frozen=True)
class ConfigCurve:
    """``d`` points moving polynomially in ``t``; ``paths[i][j]`` are the ascending
    coefficients of coordinate ``j`` of point ``i``."""

    m: int
    paths: tuple[tuple[tuple[float, ...], ...], ...]
    t_max: float = 1.0

    def __post_init__(self):
        paths = tuple(tuple(tuple(float(c) for c in coord) or (0.0,) for coord in p) for p in self.paths)
        if not paths:
            raise InputError("a curve needs at least one point")
        if any(len(p) != self.m for p in paths):
            raise InputError(f"every path needs {self.m} coordinates")
        if not self.t_max > 0:
            raise InputError("t_max must be positive")
        object.__setattr__(self, "paths", paths)

    @property
    def d(self) -> int:
        return len(self.paths)

    def points_at(self, t: float) -> np.ndarray:
        return np.array([[np.polynomial.polynomial.polyval(t, c) for c in p] for p in self.paths])

    def _mp_points(self, t) -> list[list]:
        t = mpmath.mpf(t)
        return [[mpmath.polyval([mpmath.mpf(c) for c in reversed(coord)], t) for coord in p] for p in self.paths]

    def limit_config(self) -> WeightedConfig:
        return WeightedConfig.from_multiset(self.points_at(0.0), tol=MERGE_TOL)

    def limit_labels(self) -> list[int]:
        """Index into ``limit_config().points`` of the cluster each point falls into."""
        Y = self.limit_config()
        return [int(np.argmin([np.linalg.norm(p - y) for y in Y.points])) for p in self.points_at(0.0)]

    def permuted(self, perm: Sequence[int]) -> ConfigCurve:
        return ConfigCurve(self.m, tuple(self.paths[i] for i in perm), self.t_max)

    def to_json(self) -> dict:
        return {"m": self.m, "paths": [[list(c) for c in p] for p in self.paths], "t_max": self.t_max}

    @classmethod
    def from_json(cls, obj) -> ConfigCurve:
        try:
            return cls(int(obj["m"]), tuple(tuple(tuple(c) for c in p) for p in obj["paths"]), float(obj["t_max"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed curve: {exc!r}") from exc


def _check_distinct(points: np.ndarray, t: float):
    for i in range(len(points)):
        for j in range(i):
            if np.linalg.norm(points[i] - points[j]) <= MERGE_TOL:
                raise MergeToleranceViolation(f"points {j} and {i} collide at t={t}")


def projector_at(F: Transversal, curve: ConfigCurve, t: float) -> np.ndarray:
    """Orthogonal projector onto ``F ∩ m_{Y(t)}``.

    Evaluation rows of nearly coincident points are close to dependent, so the
    projector ``I - J^T (J J^T)^{-1} J`` is formed in extended precision.
    """
    if not 0 < t <= curve.t_max:
        raise InputError(f"t={t} outside (0, {curve.t_max}]")
    if curve.m != F.m:
        raise InputError("curve and transversal dimensions differ")
    _check_distinct(curve.points_at(t), t)
    with mpmath.workdps(WORKING_DPS):
        pts = curve._mp_points(t)
        J = mpmath.matrix(len(pts), F.r)
        for i, p in enumerate(pts):
            for j, beta in enumerate(F.basis):
                v = mpmath.mpf(1)
                for c, e in zip(p, beta):
                    v *= c**e
                J[i, j] = v
        G = J * J.T
        P = mpmath.eye(F.r) - J.T * (mpmath.inverse(G) * J)
        return np.array(P.tolist(), dtype=float)


def _frame_of_projector(P: np.ndarray, dim: int) -> np.ndarray:
    w, V = np.linalg.eigh(0.5 * (P + P.T))
    return V[:, ::-1][:, :dim], w[::-1]


def subspace_at(F: Transversal, curve: ConfigCurve, t: float) -> Subspace:
    """``F ∩ m_{Y(t)}`` for the ``d`` distinct points of the curve at ``t``."""
    return Subspace(F, _frame_of_projector(projector_at(F, curve, t), F.r - curve.d)[0])


def richardson(ts: Sequence[float], values: Sequence[np.ndarray], order: int) -> list[np.ndarray]:
    """Successive extrapolations to ``t = 0`` eliminating ``t, ..., t^order``.

    Entry ``k`` uses samples ``k - order .. k`` (Neville recursion).
    """
    prev = [np.asarray(v, float) for v in values]
    for j in range(1, order + 1):
        cur = [None] * len(prev)
        for k in range(j, len(prev)):
            ratio = ts[k - j] / ts[k]
            cur[k] = prev[k] + (prev[k] - prev[k - 1]) / (ratio - 1.0)
        prev = cur
    return [v for v in prev if v is not None]


@dataclass(frozen=True, eq=False)
class LimitReport:
    limit: IdealPoint
    samples: tuple[tuple[float, float], ...]
    order: int
    certified: bool
    diagnostics: str
    oracle: OracleResult | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "limit": self.limit.to_json(),
            "samples": [list(s) for s in self.samples],
            "order": self.order,
            "certified": self.certified,
            "diagnostics": self.diagnostics,
        }

    def rows(self) -> list[tuple[float, float]]:
        return list(self.samples)


def limit_ideal(F: Transversal, curve: ConfigCurve, schedule: Sequence[float] | None = None, order: int = 3,
                tol: Tolerances = DEFAULT_TOL) -> LimitReport:
    """Extrapolate ``F ∩ m_{Y(t)}`` to ``t = 0`` and certify the limit with the oracle."""
    ts = list(default_schedule() if schedule is None else schedule)
    if len(ts) < max(3, order + 2):
        raise InputError(f"need at least {max(3, order + 2)} samples for order {order}")
    if any(b >= a for a, b in zip(ts, ts[1:])) or ts[-1] <= 0 or ts[0] > curve.t_max:
        raise InputError("schedule must decrease inside (0, t_max]")
    Ps = [projector_at(F, curve, t) for t in ts]
    est = richardson(ts, Ps, order)
    steps = [float(np.abs(b - a).max()) for a, b in zip(est, est[1:])]
    if steps[-1] > EXTRAPOLATION_TOL:
        raise ExtrapolationDivergence(f"extrapolated projectors still move by {steps[-1]:.3g}")
    dim = F.r - curve.d
    frame, w = _frame_of_projector(est[-1], dim)
    if (dim and w[dim - 1] < 0.5) or (dim < F.r and w[dim] > 0.5):
        raise ExtrapolationDivergence("extrapolated matrix is not close to a rank-%d projector" % dim)
    L0 = Subspace(F, frame)
    Y0 = curve.limit_config()
    verdict = membership_oracle(F, Y0, L0, tol)
    samples = tuple((t, subspace_distance(Subspace(F, _frame_of_projector(P, dim)[0]), L0)) for t, P in zip(ts, Ps))
    diag = (f"last extrapolation step {steps[-1]:.3g}; containment angle {verdict.containment_angle:.3g}; "
            f"closure residual {verdict.closure_residual:.3g}")
    if not verdict:
        diag += f"; rejected ({verdict.reason})"
    return LimitReport(IdealPoint(Y0, L0, verdict.certified), samples, order, verdict.certified, diag, verdict)


@dataclass(frozen=True)
class WitnessStep:
    t: float
    f_t: Polynomial
    distance: float  # max coefficient difference to f
    residual: float  # max |f_t| over the points of Y(t)


def approximation_witness(F: Transversal, curve: ConfigCurve, f: Polynomial,
                          schedule: Sequence[float] | None = None, tol: float = 1e-8) -> list[WitnessStep]:
    """``f_t = f - A(Y(t), f)``: elements of ``F ∩ m_{Y(t)}`` converging to ``f``.

    Points of the curve are grouped by the cluster they collide into, and
    each group is interpolated as one Kergin tuple on the complement chosen
    at the collided configuration.
    """
    ts = list(default_schedule() if schedule is None else schedule)
    Y0 = curve.limit_config()
    if np.abs(jet_matrix(F, Y0) @ F.vector(f)).max(initial=0.0) > tol:
        raise InputError("f does not vanish on the collided configuration")
    labels = curve.limit_labels()
    D = default_complement(Y0.coalesced_tuples(), F.m, F.max_degree - 1)
    out = []
    for t in ts:
        pts = curve.points_at(t)
        _check_distinct(pts, t)
        tuples = [[pts[i] for i in range(curve.d) if labels[i] == c] for c in range(len(Y0))]
        A = build_interpolator(tuples, basis=D)
        ft = f - A(f)
        residual = max(abs(ft(p)) for p in pts)
        if residual > tol * max(1.0, float(np.abs(F.vector(f)).max(initial=0.0))):
            raise CertificationFailure(f"f_t does not vanish on Y(t) at t={t} (residual {residual:.3g})")
        out.append(WitnessStep(t, ft, ft.max_abs_diff(f), residual))
    return out


def _curvilinear(F, y, vels, k):
    return curvilinear_cluster(F, y, vels, k)[1]


@dataclass(frozen=True)
class GalleryPreset:
    name: str
    curve: ConfigCurve
    expected_config: WeightedConfig
    description: str

    @property
    def transversal(self) -> Transversal:
        return monomial_transversal(self.curve.m, self.curve.d + 1)

    def expected_subspace(self) -> Subspace:
        """The limit derived by hand from Taylor expansion of the point conditions."""
        F = self.transversal
        return _EXPECTED[self.name](F)


def _c(*coords):
    return tuple(tuple(c) for c in coords)


GALLERY = (
    GalleryPreset("two-point-line", ConfigCurve(1, (_c((0, -1)), _c((0, 1)))),
                  WeightedConfig.from_points([[0.0]], [2]), "{-t, t} on the line"),
    GalleryPreset("two-point-plane", ConfigCurve(2, (_c((0,), (0,)), _c((0, 1), (0,)))),
                  WeightedConfig.from_points([[0.0, 0.0]], [2]), "{(0,0), (t,0)}"),
    GalleryPreset("collinear-triple", ConfigCurve(2, (_c((0,), (0,)), _c((0, 1), (0,)), _c((0, 2), (0,)))),
                  WeightedConfig.from_points([[0.0, 0.0]], [3]), "{0, t, 2t} along the x-axis"),
    GalleryPreset("noncollinear-triple", ConfigCurve(2, (_c((0,), (0,)), _c((0, 1), (0,)), _c((0,), (0, 1)))),
                  WeightedConfig.from_points([[0.0, 0.0]], [3]), "{(0,0), (t,0), (0,t)}"),
    GalleryPreset("mixed", ConfigCurve(2, (_c((0, -1), (0,)), _c((0, 1), (0,)), _c((1,), (1,)))),
                  WeightedConfig.from_points([[0.0, 0.0], [1.0, 1.0]], [2, 1]), "{(-t,0), (t,0), (1,1)}"),
    GalleryPreset("tangential-parabola",
                  ConfigCurve(2, (_c((0,), (0,)), _c((0, 1), (0, 0, 1)), _c((0, -1), (0, 0, 1)))),
                  WeightedConfig.from_points([[0.0, 0.0]], [3]), "{(0,0), (t,t^2), (-t,t^2)}"),
)

_EXPECTED = {
    "two-point-line": lambda F: vanishing_subspace(F, WeightedConfig.from_points([[0.0]], [2])),
    "two-point-plane": lambda F: _curvilinear(F, [0, 0], [[1, 0]], 2),
    "collinear-triple": lambda F: _curvilinear(F, [0, 0], [[1, 0], [0, 0]], 3),
    "noncollinear-triple": lambda F: vanishing_subspace(F, WeightedConfig.from_points([[0.0, 0.0]], [2])),
    "mixed": lambda F: intersect([_curvilinear(F, [0, 0], [[1, 0]], 2),
                                  vanishing_subspace(F, WeightedConfig.from_points([[1.0, 1.0]]))]),
    "tangential-parabola": lambda F: _curvilinear(F, [0, 0], [[1, 0], [0, 1]], 3),
}


@dataclass(frozen=True, eq=False)
class GalleryEntry:
    preset: GalleryPreset
    report: LimitReport
    local_type: list
    expected_distance: float

    def to_json(self) -> dict:
        return {
            "name": self.preset.name,
            "description": self.preset.description,
            "curve": self.preset.curve.to_json(),
            "report": self.report.to_json(),
            "local_type": self.local_type,
            "expected_distance": self.expected_distance,
        }


def collision_gallery(schedule: Sequence[float] | None = None, order: int = 3,
                      tol: Tolerances = DEFAULT_TOL) -> list[GalleryEntry]:
    """Limits of the preset collisions with the local type of each limit algebra."""
    out = []
    for preset in GALLERY:
        F = preset.transversal
        report = limit_ideal(F, preset.curve, schedule, order, tol)
        local = local_dimensions(quotient_algebra(F, report.limit, tol), tol) if report.certified else []
        dist = subspace_distance(report.limit.subspace, preset.expected_subspace())
        out.append(GalleryEntry(preset, report, local, dist))
    return out
