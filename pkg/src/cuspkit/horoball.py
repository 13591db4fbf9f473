"""Truncated combinatorial horoballs over a finite connected base graph.

Vertices are pairs ``(x, m)`` with ``x`` a base vertex and ``0 <= m <= depth``.
``(x, m)`` and ``(y, m)`` are joined when ``1 <= d(x, y) <= 2**m`` in the base
metric, and ``(x, m)`` is joined to ``(x, m + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable

import numpy as np

from .errors import PreconditionError, UsageError
from .graph import DistanceMatrix, FiniteGraph, all_pairs_distances, vertex_key


def ceil_log2(d: int) -> int:
    """Smallest ``k >= 0`` with ``2**k >= d`` (0 for ``d <= 1``)."""
    d = int(d)
    return 0 if d <= 1 else (d - 1).bit_length()


def _check_heights(m: int, n: int) -> None:
    if m < 0 or n < 0:
        raise UsageError(f"heights must be non-negative, got {m} and {n}")


def horoball_distance_closed_form(x: Hashable, m: int, y: Hashable, n: int, d_base: int) -> int:
    """Exact distance between ``(x, m)`` and ``(y, n)``.

    Equal base points are joined by the vertical segment.  Otherwise the best
    path climbs to some level ``k >= max(m, n)``, crosses ``ceil(d / 2**k)``
    horizontal edges there and descends; past ``k = ceil(log2 d)`` the cost
    only grows, so a short scan of ``k`` is exact.
    """
    _check_heights(m, n)
    d = int(d_base)
    if (d == 0) != (x == y):
        raise UsageError("base distance must be 0 exactly when the base points coincide")
    if d == 0:
        return abs(m - n)
    hi = max(m, n)
    return min(2 * k - m - n + -((-d) >> k) for k in range(hi, hi + ceil_log2(d) + 2))


def horoball_distance_asymptotic(x: Hashable, m: int, y: Hashable, n: int, d_base: int) -> float:
    """Coarse form ``max(|m - n|, 2 log2(1 + d) - (m + n))``."""
    _check_heights(m, n)
    d = 0 if x == y else int(d_base)
    return max(float(abs(m - n)), 2.0 * math.log2(1 + d) - (m + n))


@dataclass(frozen=True)
class HoroballGraph:
    base: FiniteGraph
    depth: int
    graph: FiniteGraph
    base_distances: DistanceMatrix

    def vertex(self, x: Hashable, m: int) -> tuple:
        if x not in self.base or not 0 <= m <= self.depth:
            raise UsageError(f"({x!r}, {m}) is not a vertex of this horoball")
        return (x, m)

    def level(self, m: int) -> FiniteGraph:
        return self.graph.induced_subgraph([(x, m) for x in self.base.vertices])

    def closed_form(self, u: tuple, v: tuple) -> int:
        (x, m), (y, n) = u, v
        return horoball_distance_closed_form(x, m, y, n, self.base_distances(x, y))

    @cached_property
    def distances(self) -> DistanceMatrix:
        return all_pairs_distances(self.graph)

    def to_json(self) -> dict:
        key = vertex_key
        return {
            "depth": self.depth,
            "vertices": [{"base": key(x), "height": m} for x, m in self.graph.vertices],
            "edges": [
                [{"base": key(x), "height": m}, {"base": key(y), "height": n}]
                for (x, m), (y, n) in self.graph.edges
            ],
        }


def horoball_key(v: tuple) -> str:
    x, m = v
    return f"{vertex_key(x)}@{m}"


def horoball_edges(base_d: np.ndarray, depth: int) -> list[tuple[int, int]]:
    """Edges of the horoball on index pairs ``m * n + i`` from the base distance matrix."""
    n = base_d.shape[0]
    out: list[tuple[int, int]] = []
    for m in range(depth + 1):
        ii, jj = np.nonzero(np.triu((base_d >= 1) & (base_d <= 2**m), 1))
        off = m * n
        out.extend(zip((ii + off).tolist(), (jj + off).tolist()))
        if m < depth:
            out.extend((off + i, off + n + i) for i in range(n))
    return out


def build_horoball(base: FiniteGraph, depth: int) -> HoroballGraph:
    if depth < 0:
        raise UsageError("depth must be non-negative")
    dist = all_pairs_distances(base)
    if base.n and (dist.matrix < 0).any():
        raise PreconditionError("horoball base must be connected")
    verts = [(x, m) for m in range(depth + 1) for x in base.vertices]
    g = FiniteGraph.from_index_edges(verts, horoball_edges(dist.matrix, depth))
    return HoroballGraph(base, depth, g, dist)


def closed_form_matrix(base_d: np.ndarray, depth: int) -> np.ndarray:
    """Closed-form distances for every vertex pair, indexed like :func:`horoball_edges`."""
    n = base_d.shape[0]
    top = ceil_log2(int(base_d.max()) if n else 0)
    out = np.empty(((depth + 1) * n, (depth + 1) * n), dtype=np.int64)
    for m in range(depth + 1):
        for h in range(m, depth + 1):
            hi = h
            best = None
            for k in range(hi, hi + top + 2):
                # ceil(d / 2^k) via negated floor shift; d = 0 contributes 0
                val = 2 * k - m - h - np.right_shift(-base_d, k)
                best = val if best is None else np.minimum(best, val)
            out[m * n : (m + 1) * n, h * n : (h + 1) * n] = best
            out[h * n : (h + 1) * n, m * n : (m + 1) * n] = best.T
    return out


def asymptotic_matrix(base_d: np.ndarray, depth: int) -> np.ndarray:
    n = base_d.shape[0]
    heights = np.repeat(np.arange(depth + 1), n)
    d = np.tile(base_d, (depth + 1, depth + 1)).astype(float)
    mm, nn = heights[:, None], heights[None, :]
    return np.maximum(np.abs(mm - nn).astype(float), 2.0 * np.log2(1.0 + d) - (mm + nn))


@dataclass(frozen=True)
class HoroballReport:
    depth: int
    required_depth: int
    pairs_checked: int
    mismatches: int
    max_asymptotic_gap: float
    first_mismatch: tuple | None = None

    def to_json(self) -> dict:
        out = {
            "depth": self.depth,
            "required_depth": self.required_depth,
            "pairs_checked": self.pairs_checked,
            "mismatches": self.mismatches,
            "max_asymptotic_gap": round(self.max_asymptotic_gap, 12),
        }
        if self.first_mismatch is not None:
            out["first_mismatch"] = list(self.first_mismatch)
        return out


def verify_distance_formulas(base: FiniteGraph, depth: int) -> HoroballReport:
    """Compare the closed form with breadth-first distances on every vertex pair."""
    hb = build_horoball(base, depth)
    base_d = hb.base_distances.matrix
    need = ceil_log2(int(base_d.max()) if base.n else 0)
    if depth < need:
        raise PreconditionError(
            f"depth {depth} is too shallow: geodesics need depth >= ceil(log2(diameter)) = {need}"
        )
    exact = hb.distances.matrix
    closed = closed_form_matrix(base_d, depth)
    iu = np.triu_indices(exact.shape[0], 1)
    bad = np.nonzero(exact[iu] != closed[iu])[0]
    first = None
    if len(bad):
        i, j = int(iu[0][bad[0]]), int(iu[1][bad[0]])
        vs = hb.graph.vertices
        first = (horoball_key(vs[i]), horoball_key(vs[j]), int(exact[i, j]), int(closed[i, j]))
    gap = np.abs(exact - asymptotic_matrix(base_d, depth))
    return HoroballReport(
        depth=depth,
        required_depth=need,
        pairs_checked=len(iu[0]),
        mismatches=len(bad),
        max_asymptotic_gap=float(gap.max()) if gap.size else 0.0,
        first_mismatch=first,
    )
