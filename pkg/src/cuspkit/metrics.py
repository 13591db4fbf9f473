"""Coarse-geometry measurements on finite metric spaces.

Four-point hyperbolicity, Gromov products, cross-ratios, visual values,
quasi-Moebius distortion tables, and the upper half-space metric.
All hyperbolicity constants reported here are four-point constants.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import PreconditionError, UsageError
from .graph import DistanceMatrix, FiniteGraph, all_pairs_distances, biconnected_components, vertex_key

Number = Union[int, float, Fraction]
Metric = Callable[[Hashable, Hashable], Number]

EXHAUSTIVE_LIMIT = 400


def _as_metric(dist) -> Metric:
    if isinstance(dist, DistanceMatrix):
        def d(u, v):
            r = dist(u, v)
            if r is None:
                raise PreconditionError(f"{u!r} and {v!r} lie in different components")
            return r
        return d
    if isinstance(dist, Mapping):
        return lambda u, v: dist[u][v]
    return dist


def _exact(x: Number) -> Number:
    return Fraction(x) if isinstance(x, int) else x


def gromov_product(dist, x, y, w) -> Number:
    """``(x|y)_w = (d(x,w) + d(y,w) - d(x,y)) / 2``."""
    d = _as_metric(dist)
    return (_exact(d(x, w)) + d(y, w) - d(x, y)) / 2


def format_rational(q: Number) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# -- four-point delta ----------------------------------------------------------


@dataclass(frozen=True)
class DeltaReport:
    delta: Fraction
    witness: Optional[tuple]
    quadruples_covered: int
    quadruples_evaluated: int
    mode: str
    seed: Optional[int] = None
    vertices: int = 0
    candidate_pairs: int = 0

    def to_json(self) -> dict:
        out = {
            "constant": "four-point",
            "delta": format_rational(self.delta),
            "witness": None if self.witness is None else [vertex_key(v) for v in self.witness],
            "mode": self.mode,
            "vertices": self.vertices,
            "quadruples_covered": self.quadruples_covered,
            "quadruples_evaluated": self.quadruples_evaluated,
        }
        if self.mode == "exhaustive":
            out["candidate_pairs"] = self.candidate_pairs
        else:
            out["seed"] = self.seed
        return out


def _far_apart_pairs(graph: FiniteGraph, D: np.ndarray) -> np.ndarray:
    """Pairs ``(a, b)``, ``a < b``, such that no neighbour of either end is farther from the other.

    A quadruple maximising the four-point gap can always be chosen so that both
    pairs of its largest-sum pairing are far apart: pushing an endpoint to a
    farther neighbour raises that pair's distance by one and every competing
    sum by at most one.
    """
    n = graph.n
    far = np.ones((n, n), dtype=bool)
    for a, nbrs in enumerate(graph.index_adjacency):
        if nbrs:
            # some neighbour of a is farther from b than a is
            far[a] &= ~(D[list(nbrs)].max(axis=0) > D[a])
    far &= far.T
    ii, jj = np.nonzero(np.triu(far, 1))
    return np.stack([ii, jj], axis=1)


def _scan_pairs(D: np.ndarray, pairs: np.ndarray) -> tuple[int, Optional[tuple], int]:
    """Largest doubled four-point gap over quadruples made of two pairs from ``pairs``."""
    if len(pairs) < 2:
        return 0, None, 0
    pd = D[pairs[:, 0], pairs[:, 1]]
    order = np.argsort(-pd, kind="stable")
    pairs, pd = pairs[order], pd[order]
    A, B = pairs[:, 0], pairs[:, 1]
    best, witness, evaluated = 0, None, 0
    for i in range(1, len(pairs)):
        dab = int(pd[i])
        if 2 * dab <= best:  # the doubled gap never exceeds twice the smaller pair distance
            break
        a, b = A[i], B[i]
        c, d = A[:i], B[:i]
        other = np.maximum(D[a, c] + D[b, d], D[a, d] + D[b, c])
        vals = dab + pd[:i] - other
        evaluated += i
        j = int(np.argmax(vals))
        if vals[j] > best:
            best = int(vals[j])
            witness = (int(a), int(b), int(c[j]), int(d[j]))
    return best, witness, evaluated


def delta_four_point(
    graph: FiniteGraph,
    mode: str = "exhaustive",
    seed: Optional[int] = None,
    samples: int = 100_000,
    max_vertices: int = EXHAUSTIVE_LIMIT,
    distances: Optional[DistanceMatrix] = None,
) -> DeltaReport:
    """Four-point hyperbolicity constant.

    ``delta = max [min((x|z)_w, (y|z)_w) - (x|y)_w]^+`` over ordered quadruples,
    equivalently half the gap between the two largest of the three pair sums
    over 4-sets.  Exhaustive mode is exact; the scan skips quadruples that
    provably cannot beat the running maximum.  Sampled mode draws ``samples``
    random quadruples from a generator seeded with ``seed``.
    """
    if graph.n and not graph.is_connected():
        raise PreconditionError("four-point delta needs a connected graph")
    dm = distances if distances is not None else all_pairs_distances(graph)
    D = dm.matrix.astype(np.int64)
    n = graph.n
    verts = graph.vertices
    if mode == "exhaustive":
        if n > max_vertices:
            raise PreconditionError(
                f"exhaustive mode is limited to {max_vertices} vertices (graph has {n}); "
                "use sampled mode with a seed"
            )
        # blocks are isometrically embedded and the constant is the maximum over blocks
        best, wit, evaluated, npairs = 0, None, 0, 0
        for block in biconnected_components(graph) if n else []:
            if len(block) < 4:
                continue
            idx = np.array([graph.index(v) for v in block], dtype=np.intp)
            sub = graph.induced_subgraph(block)
            Dsub = D[np.ix_(idx, idx)]
            pairs = _far_apart_pairs(sub, Dsub)
            npairs += len(pairs)
            b, w, e = _scan_pairs(Dsub, pairs)
            evaluated += e
            if b > best:
                best, wit = b, tuple(int(idx[k]) for k in w)
        return DeltaReport(
            delta=Fraction(best, 2),
            witness=None if wit is None else tuple(verts[k] for k in wit),
            quadruples_covered=n**4,
            quadruples_evaluated=evaluated,
            mode="exhaustive",
            vertices=n,
            candidate_pairs=npairs,
        )
    if mode == "sampled":
        if seed is None:
            raise UsageError("sampled mode requires a seed")
        if n < 4:
            return DeltaReport(Fraction(0), None, 0, 0, "sampled", seed, n)
        rng = np.random.default_rng(seed)
        q = rng.integers(0, n, size=(samples, 4))
        x, y, z, w = q.T
        s1 = D[x, y] + D[z, w]
        s2 = D[x, z] + D[y, w]
        s3 = D[x, w] + D[y, z]
        stacked = np.sort(np.stack([s1, s2, s3]), axis=0)
        gaps = stacked[2] - stacked[1]
        k = int(np.argmax(gaps))
        best = int(gaps[k])
        wit = None
        if best > 0:
            quad = [int(t) for t in q[k]]
            sums = {(0, 1, 2, 3): s1[k], (0, 2, 1, 3): s2[k], (0, 3, 1, 2): s3[k]}
            perm = max(sums, key=lambda p: sums[p])
            wit = tuple(verts[quad[p]] for p in perm)
        return DeltaReport(Fraction(best, 2), wit, samples, samples, "sampled", seed, n)
    raise UsageError(f"unknown delta mode {mode!r}")


def four_point_value(dist, x, y, z, w) -> Fraction:
    """``[min((x|z)_w, (y|z)_w) - (x|y)_w]^+`` for one ordered quadruple."""
    val = min(gromov_product(dist, x, z, w), gromov_product(dist, y, z, w)) - gromov_product(dist, x, y, w)
    return max(Fraction(0), Fraction(val))


# -- cross-ratios and visual values ----------------------------------------------


class DegenerateConfiguration(UsageError):
    pass


def cross_ratio(dist, x1, x2, x3, x4) -> Number:
    """``d(x1,x2) d(x3,x4) / (d(x1,x3) d(x2,x4))``, exact for integer metrics."""
    d = _as_metric(dist)
    den = _exact(d(x1, x3)) * d(x2, x4)
    if den == 0:
        raise DegenerateConfiguration(f"cross-ratio denominator vanishes at ({x1!r}, {x2!r}, {x3!r}, {x4!r})")
    return _exact(d(x1, x2)) * d(x3, x4) / den


@dataclass(frozen=True)
class BoundarySample:
    basepoint: Hashable
    sample: tuple
    epsilon: float
    values: np.ndarray

    def value(self, a, b) -> float:
        return float(self.values[self.sample.index(a), self.sample.index(b)])

    def to_json(self) -> dict:
        return {
            "basepoint": vertex_key(self.basepoint),
            "epsilon": self.epsilon,
            "sample": [vertex_key(v) for v in self.sample],
            "values": [[round(float(x), 12) for x in row] for row in self.values],
        }


def visual_values(dist, basepoint, sample: Sequence, epsilon: float) -> BoundarySample:
    """Pairwise ``exp(-epsilon * (a|b)_w)`` over the sample."""
    if epsilon <= 0:
        raise UsageError("visual parameter must be positive")
    sample = tuple(sample)
    vals = np.empty((len(sample), len(sample)))
    for i, a in enumerate(sample):
        for j, b in enumerate(sample):
            vals[i, j] = math.exp(-epsilon * float(gromov_product(dist, a, b, basepoint)))
    return BoundarySample(basepoint, sample, float(epsilon), vals)


@dataclass(frozen=True)
class DistortionReport:
    quadruples: int
    degenerate: int
    table: tuple[tuple[Number, Number], ...]
    max_ratio: Optional[float]

    def to_json(self) -> dict:
        def fmt(x):
            return format_rational(x) if isinstance(x, (int, Fraction)) else round(float(x), 12)

        return {
            "quadruples": self.quadruples,
            "degenerate": self.degenerate,
            "theta_sample": [[fmt(t), fmt(s)] for t, s in self.table],
            "max_output_over_input": None if self.max_ratio is None else round(self.max_ratio, 12),
        }


def quasi_mobius_distortion(mapping: Mapping, dist_x, dist_y) -> DistortionReport:
    """Cross-ratio distortion of ``mapping`` over all ordered quadruples of distinct points.

    The table lists, for each input cross-ratio value ``t``, the largest
    output cross-ratio among quadruples with that input value.
    """
    pts = list(mapping)
    images = [mapping[p] for p in pts]
    if len(set(images)) != len(images):
        raise UsageError("map is not injective on the sample")
    dx, dy = _as_metric(dist_x), _as_metric(dist_y)
    bins: dict = {}
    count = degenerate = 0
    worst: Optional[float] = None
    for quad in itertools.permutations(range(len(pts)), 4):
        count += 1
        a = [pts[k] for k in quad]
        b = [images[k] for k in quad]
        try:
            t = cross_ratio(dx, *a)
            s = cross_ratio(dy, *b)
        except DegenerateConfiguration:
            degenerate += 1
            continue
        if t not in bins or s > bins[t]:
            bins[t] = s
        if t > 0:
            r = float(s) / float(t)
            worst = r if worst is None else max(worst, r)
    table = tuple(sorted(bins.items()))
    return DistortionReport(count, degenerate, table, worst)


# -- upper half-space ------------------------------------------------------------


def upper_half_space_distance(z: Sequence[float], y: float, z2: Sequence[float], y2: float) -> float:
    """Hyperbolic distance between ``(z, y)`` and ``(z2, y2)`` in the upper half-space."""
    if y <= 0 or y2 <= 0:
        raise UsageError("heights must be positive")
    z = np.atleast_1d(np.asarray(z, dtype=float))
    z2 = np.atleast_1d(np.asarray(z2, dtype=float))
    if z.shape != z2.shape:
        raise UsageError("points live in different dimensions")
    horiz = float(np.dot(z - z2, z - z2))
    if horiz == 0.0:
        return abs(math.log(y / y2))
    # arcosh(1 + u) = log1p(u + sqrt(u (u + 2))) keeps precision for small u
    u = (horiz + (y - y2) ** 2) / (2.0 * y * y2)
    return math.log1p(u + math.sqrt(u * (u + 2.0)))
