"""Points with weights: elements of the symmetric product SP_d."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, MergeToleranceViolation

MERGE_TOL = 1e-10


@dataclass(frozen=True)
class WeightedConfig:
    """Multiset ``{y_1^k_1, ..., y_n^k_n}`` of distinct points with positive weights.

    Clusters are kept in lexicographic order of their coordinates.
    """

    clusters: tuple[tuple[tuple[float, ...], int], ...]

    def __post_init__(self):
        clean = []
        for point, weight in self.clusters:
            point = tuple(float(c) for c in np.atleast_1d(np.asarray(point, float)))
            if int(weight) != weight or weight < 1:
                raise InputError(f"weights must be positive integers, got {weight}")
            clean.append((point, int(weight)))
        if not clean:
            raise InputError("a configuration needs at least one point")
        if len({len(p) for p, _ in clean}) != 1:
            raise InputError("points of different dimension")
        clean.sort(key=lambda pw: pw[0])
        pts = np.array([p for p, _ in clean])
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if np.linalg.norm(pts[i] - pts[j]) <= MERGE_TOL:
                    raise MergeToleranceViolation(
                        f"points {clean[i][0]} and {clean[j][0]} coincide; state multiplicities explicitly"
                    )
        object.__setattr__(self, "clusters", tuple(clean))

    @classmethod
    def from_points(cls, points: Iterable, weights: Sequence[int] | None = None) -> WeightedConfig:
        points = [np.atleast_1d(np.asarray(p, float)) for p in points]
        if weights is None:
            weights = [1] * len(points)
        if len(weights) != len(points):
            raise InputError("one weight per point required")
        return cls(tuple((tuple(p), w) for p, w in zip(points, weights)))

    @classmethod
    def from_multiset(cls, points: Iterable, tol: float = 1e-12) -> WeightedConfig:
        """Merge points closer than ``tol`` into weighted clusters."""
        pts = [np.atleast_1d(np.asarray(p, float)) for p in points]
        centers: list[np.ndarray] = []
        counts: list[int] = []
        for p in pts:
            for i, c in enumerate(centers):
                if np.linalg.norm(p - c) <= tol:
                    counts[i] += 1
                    break
            else:
                centers.append(p)
                counts.append(1)
        return cls.from_points(centers, counts)

    @property
    def dim(self) -> int:
        return len(self.clusters[0][0])

    @property
    def degree(self) -> int:
        """Total weight d."""
        return sum(w for _, w in self.clusters)

    @property
    def points(self) -> list[np.ndarray]:
        return [np.array(p) for p, _ in self.clusters]

    @property
    def weights(self) -> list[int]:
        return [w for _, w in self.clusters]

    def __len__(self):
        return len(self.clusters)

    def coalesced_tuples(self) -> list[tuple[tuple[float, ...], ...]]:
        """One tuple per cluster, the point repeated by its weight."""
        return [(p,) * w for p, w in self.clusters]

    def distance(self, other: WeightedConfig) -> float:
        """Largest point displacement between configurations with matching weights.

        Returns ``inf`` if the weight patterns cannot be matched.
        """
        if sorted(self.weights) != sorted(other.weights) or self.dim != other.dim:
            return float("inf")
        # greedy nearest matching among equal weights; configurations here are small
        remaining = list(other.clusters)
        worst = 0.0
        for p, w in self.clusters:
            cands = [(np.linalg.norm(np.subtract(p, q)), i) for i, (q, v) in enumerate(remaining) if v == w]
            dist, i = min(cands)
            worst = max(worst, dist)
            remaining.pop(i)
        return float(worst)

    def matches(self, other: WeightedConfig, tol: float = 1e-7) -> bool:
        return self.distance(other) <= tol

    def to_json(self) -> list[dict]:
        return [{"point": list(p), "weight": w} for p, w in self.clusters]

    @classmethod
    def from_json(cls, obj) -> WeightedConfig:
        try:
            return cls(tuple((tuple(c["point"]), int(c["weight"])) for c in obj))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad configuration entry: {exc!r}") from exc
