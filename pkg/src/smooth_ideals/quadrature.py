"""Grundmann-Moeller cubature on simplices, in barycentric coordinates."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def grundmann_moeller(n: int, s: int) -> tuple[np.ndarray, np.ndarray]:
    """Rule of degree ``2s+1`` on the n-simplex.

    Returns ``(bary, weights)`` with ``bary`` of shape ``(N, n+1)`` and
    weights summing to one, so the rule integrates against the unit-volume
    measure.  Weights alternate in sign between levels.
    """
    if n == 0:
        return np.ones((1, 1)), np.ones(1)
    d = 2 * s + 1
    acc: dict[tuple, float] = {}
    for i in range(s + 1):
        w = (-1) ** i * (d + n - 2 * i) ** d / (math.factorial(i) * math.factorial(d + n - i))
        denom = d + n - 2 * i
        for beta in _compositions(s - i, n + 1):
            key = tuple((2 * b + 1) / denom for b in beta)
            acc[key] = acc.get(key, 0.0) + w
    bary = np.array(list(acc.keys()))
    weights = np.array(list(acc.values()))
    weights /= weights.sum()
    return bary, weights
