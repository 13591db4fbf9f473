"""Quasi-isometry constants of explicit maps, and the standard extensions over horoballs.

Every certificate here is empirical: it is measured on finite samples of
(possibly truncated) spaces, then re-verified pair by pair in exact
arithmetic independently of the search that produced it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Mapping, Optional, Sequence, Union

import numpy as np

from .cusped import CuspedSpace, vertex_name
from .errors import PreconditionError, UsageError
from .graph import DistanceMatrix, vertex_key
from .groups import FreeAbelianGroup, MarkedGroup
from .horoball import HoroballGraph, horoball_key
from .metrics import format_rational, upper_half_space_distance

Number = Union[int, Fraction, float]

DEFAULT_LAMBDAS: tuple[Fraction, ...] = tuple(Fraction(k, 10) for k in range(10, 81))


def _metric_matrix(dist, points: Sequence) -> np.ndarray:
    if isinstance(dist, DistanceMatrix):
        idx = np.array([dist.index(p) for p in points], dtype=np.intp)
        M = dist.matrix[np.ix_(idx, idx)]
        if (M < 0).any():
            raise PreconditionError("sample points lie in different components")
        return M.astype(np.int64)
    n = len(points)
    vals = [[dist(points[i], points[j]) for j in range(n)] for i in range(n)]
    if all(isinstance(v, int) for row in vals for v in row):
        return np.array(vals, dtype=np.int64).reshape(n, n)
    return np.array(vals, dtype=float).reshape(n, n)


def _fmt(x) -> Union[str, float, None]:
    if x is None:
        return None
    if isinstance(x, (int, Fraction)):
        return format_rational(x)
    return round(float(x), 12)


@dataclass(frozen=True)
class QiCertificate:
    lam: Number
    c: Number
    s: Optional[Number]
    pairs: int
    domain_size: int
    codomain_size: Optional[int]
    violations: int

    @property
    def verified(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {
            "status": "empirical",
            "lambda": _fmt(self.lam),
            "c": _fmt(self.c),
            "s": _fmt(self.s),
            "pairs": self.pairs,
            "domain_size": self.domain_size,
            "codomain_size": self.codomain_size,
            "reverified": self.verified,
            "violations": self.violations,
        }


def _min_c_exact(DX: np.ndarray, DY: np.ndarray, lam: Fraction) -> Fraction:
    p, q = lam.numerator, lam.denominator
    # d_Y - lam d_X  and  d_X / lam - d_Y  with integer numerators
    upper = int((q * DY - p * DX).max())
    lower = int((q * DX - p * DY).max())
    return max(Fraction(0), Fraction(upper, q), Fraction(lower, p))


def _min_c_float(DX: np.ndarray, DY: np.ndarray, lam: float) -> float:
    return max(0.0, float((DY - lam * DX).max()), float((DX / lam - DY).max()))


def verify_certificate(mapping: Mapping, dist_x, dist_y, lam: Number, c: Number) -> int:
    """Count pairs violating ``d_X/lam - c <= d_Y <= lam d_X + c``, one pair at a time."""
    pts = list(mapping)
    exact = isinstance(lam, Fraction)
    bad = 0
    for i, u in enumerate(pts):
        for v in pts[i + 1 :]:
            a = dist_x(u, v)
            b = dist_y(mapping[u], mapping[v])
            if exact:
                a, b = Fraction(a), Fraction(b)
                ok = a / lam - c <= b <= lam * a + c
            else:
                ok = a / lam - c - 1e-9 <= b <= lam * a + c + 1e-9
            bad += not ok
    return bad


def measure_qi(
    mapping: Mapping,
    dist_x,
    dist_y,
    codomain: Optional[Sequence] = None,
    lambdas: Sequence[Number] = DEFAULT_LAMBDAS,
) -> QiCertificate:
    """Best ``(lambda, c)`` on the grid by ``lambda + c`` (ties to smaller ``lambda``), plus ``s``.

    ``s`` is the largest distance from a codomain point to the image; it is
    measured over ``codomain`` (default: every vertex when ``dist_y`` is a
    :class:`DistanceMatrix`, otherwise not measured).
    """
    pts = list(mapping)
    if not pts:
        raise UsageError("empty domain sample")
    images = [mapping[p] for p in pts]
    DX = _metric_matrix(dist_x, pts)
    DY = _metric_matrix(dist_y, images)
    exact = DX.dtype.kind == "i" and DY.dtype.kind == "i"
    best = None
    for lam in lambdas:
        lam = Fraction(lam) if exact else float(lam)
        if lam < 1:
            raise UsageError("lambda grid values must be at least 1")
        c = _min_c_exact(DX, DY, lam) if exact else _min_c_float(DX, DY, lam)
        if best is None or lam + c < best[0] + best[1]:
            best = (lam, c)
    lam, c = best
    if codomain is None and isinstance(dist_y, DistanceMatrix):
        codomain = dist_y.vertices
    s = None
    if codomain is not None:
        codomain = list(codomain)
        if not codomain:
            raise UsageError("empty codomain sample")
        if isinstance(dist_y, DistanceMatrix):
            rows = np.array([dist_y.index(y) for y in codomain], dtype=np.intp)
            cols = np.array([dist_y.index(y) for y in set(images)], dtype=np.intp)
            M = dist_y.matrix[np.ix_(rows, cols)]
            if (M < 0).any():
                raise PreconditionError("codomain sample is not connected to the image")
            s = int(M.min(axis=1).max())
        else:
            s = max(min(dist_y(y, f) for f in set(images)) for y in codomain)
    dx = dist_x if not isinstance(dist_x, DistanceMatrix) else (lambda u, v, D=dist_x: D(u, v))
    dy = dist_y if not isinstance(dist_y, DistanceMatrix) else (lambda u, v, D=dist_y: D(u, v))
    violations = verify_certificate(mapping, dx, dy, lam, c)
    n = len(pts)
    return QiCertificate(lam, c, s, n * (n - 1) // 2, n, None if codomain is None else len(codomain), violations)


# -- named maps -------------------------------------------------------------------


def builtin_map(name: str, group: MarkedGroup, k: int = 1) -> Callable:
    """Named maps on free abelian groups: identity, shift k, scale k, basis swap."""
    if name == "identity":
        return lambda g: g
    if not isinstance(group, FreeAbelianGroup):
        raise UsageError(f"map {name!r} is only defined on free abelian groups")
    if name == "shift":
        return lambda g: (g[0] + k,) + tuple(g[1:])
    if name == "scale":
        return lambda g: tuple(k * x for x in g)
    if name == "swap":
        if group.rank < 2:
            raise UsageError("basis swap needs rank at least 2")
        return lambda g: (g[1], g[0]) + tuple(g[2:])
    raise UsageError(f"unknown map {name!r}")


# -- horoball extension ------------------------------------------------------------


@dataclass(frozen=True)
class Extension:
    mapping: dict
    certificate: QiCertificate

    def to_json(self, key=vertex_key) -> dict:
        return {"certificate": self.certificate.to_json(), "map_size": len(self.mapping)}


def extend_to_horoball(f: Mapping, HP: HoroballGraph, HQ: HoroballGraph) -> Extension:
    """``F(x, m) = (f(x), m)`` measured on the materialized horoballs."""
    missing = [x for x in HP.base.vertices if x not in f]
    if missing:
        raise UsageError(f"base map undefined at {missing[0]!r}")
    if HQ.depth < HP.depth:
        raise PreconditionError(
            f"target depth {HQ.depth} is below source depth {HP.depth}; the extension would be partial"
        )
    for x in HP.base.vertices:
        if f[x] not in HQ.base:
            raise UsageError(f"f({x!r}) = {f[x]!r} is not a base vertex of the target")
    F = {(x, m): (f[x], m) for m in range(HP.depth + 1) for x in HP.base.vertices}
    cert = measure_qi(F, HP.distances, HQ.distances)
    return Extension(F, cert)


def auto_correspondence(phi: Callable, G: CuspedSpace, H: CuspedSpace) -> dict:
    """Send each cell of ``G`` to the cell of ``H`` (same peripheral index) containing ``phi(rep)``."""
    out = {}
    for i, cs in enumerate(G.cosets):
        if i >= len(H.cosets):
            raise UsageError(f"target has no peripheral {i}")
        target = H.cosets[i]
        for rep in cs.representatives:
            img = phi(G.cayley.element(rep))
            if img not in H.cayley:
                continue
            lbl = H.cayley.vertex(img)
            out[(i, rep)] = (i, target.representatives[target.cell_of[lbl]])
    return out


def extend_to_cusped(
    phi: Callable,
    G: CuspedSpace,
    H: CuspedSpace,
    correspondence: Optional[Mapping] = None,
    interior_only: bool = True,
) -> Extension:
    """Extend a group map over horoballs, cell by cell, and measure it on interior vertices.

    ``phi`` acts on normal forms.  ``correspondence`` maps ``(peripheral,
    representative)`` of ``G`` to ``(peripheral, representative)`` of ``H``.
    """
    if correspondence is None:
        correspondence = auto_correspondence(phi, G, H)
    if H.depth < G.depth:
        raise PreconditionError("target cusped space is shallower than the source")
    domain = G.interior_vertices() if interior_only else list(G.graph.vertices)
    Phi = {}
    for v in domain:
        x = G.base_label(v)
        img = phi(G.cayley.element(x))
        if img not in H.cayley:
            raise PreconditionError(f"phi({x}) falls outside the target ball; enlarge its radius")
        y = H.cayley.vertex(img)
        if v[0] == "cay":
            Phi[v] = ("cay", y)
            continue
        _, i, rep, _, m = v
        if (i, rep) not in correspondence:
            raise UsageError(f"correspondence is missing cell {rep} of peripheral {i}")
        j, rep2 = correspondence[(i, rep)]
        cs = H.cosets[j]
        if cs.representatives[cs.cell_of[y]] != rep2:
            raise PreconditionError(f"phi({x}) = {y} is not in the designated cell {rep2}")
        Phi[v] = ("horo", j, rep2, y, m)
    codomain = H.interior_vertices() if interior_only else list(H.graph.vertices)
    cert = measure_qi(Phi, G.distances, H.distances, codomain=codomain)
    return Extension(Phi, cert)


# -- half-space model ---------------------------------------------------------------


@dataclass(frozen=True)
class HeightSchedule:
    values: tuple[float, ...]
    bound: float

    def __post_init__(self):
        if self.bound < 1:
            raise UsageError("schedule bound L must be at least 1")
        for n, y in enumerate(self.values):
            if not 1 <= y <= self.bound:
                raise UsageError(f"y_{n} = {y} is outside [1, {self.bound}]")

    @classmethod
    def constant(cls, depth: int, value: float = 1.0) -> "HeightSchedule":
        return cls(tuple([float(value)] * (depth + 1)), float(value))

    @classmethod
    def alternating(cls, depth: int, bound: float = 2.0) -> "HeightSchedule":
        return cls(tuple(1.0 if n % 2 == 0 else float(bound) for n in range(depth + 1)), float(bound))


@dataclass(frozen=True)
class HalfSpaceReport:
    pairs: int
    max_gap: float
    vertical_pairs: int
    max_gap_vertical: float
    level_pairs: int
    max_gap_level: float
    certificate: QiCertificate

    def to_json(self) -> dict:
        return {
            "status": "empirical",
            "comparison": "|d_H - ln2 * d_graph|",
            "pairs": self.pairs,
            "max_gap": round(self.max_gap, 12),
            "vertical_pairs": self.vertical_pairs,
            "max_gap_vertical": round(self.max_gap_vertical, 12),
            "same_level_pairs": self.level_pairs,
            "max_gap_same_level": round(self.max_gap_level, 12),
            "certificate": self.certificate.to_json(),
        }


def embed_in_half_space(phi: Mapping, schedule: HeightSchedule, HP: HoroballGraph) -> tuple[dict, HalfSpaceReport]:
    """``Phi(x, n) = (phi(x), y_n 2^n)`` compared against ``ln 2`` times the horoball metric."""
    if len(schedule.values) < HP.depth + 1:
        raise UsageError(f"schedule has {len(schedule.values)} heights, depth {HP.depth} needs {HP.depth + 1}")
    missing = [x for x in HP.base.vertices if x not in phi]
    if missing:
        raise UsageError(f"phi undefined at {missing[0]!r}")
    pts = {}
    for x, m in HP.graph.vertices:
        pts[(x, m)] = (np.atleast_1d(np.asarray(phi[x], dtype=float)), schedule.values[m] * 2.0**m)
    verts = list(HP.graph.vertices)
    D = HP.distances
    ln2 = math.log(2.0)
    gap = gv = gl = 0.0
    npairs = nv = nl = 0
    for i, u in enumerate(verts):
        zu, yu = pts[u]
        for v in verts[i + 1 :]:
            zv, yv = pts[v]
            g = abs(upper_half_space_distance(zu, yu, zv, yv) - ln2 * D(u, v))
            npairs += 1
            gap = max(gap, g)
            if u[0] == v[0]:
                nv += 1
                gv = max(gv, g)
            if u[1] == v[1]:
                nl += 1
                gl = max(gl, g)

    def dh(a, b):
        return upper_half_space_distance(*pts[a], *pts[b])

    ident = {v: v for v in verts}
    cert = measure_qi(ident, lambda a, b: D(a, b), dh)
    return pts, HalfSpaceReport(npairs, gap, nv, gv, nl, gl, cert)


def horoball_map_json(F: Mapping) -> dict:
    return {horoball_key(k): horoball_key(v) for k, v in F.items()}


def cusped_map_json(F: Mapping) -> dict:
    return {vertex_name(k): vertex_name(v) for k, v in F.items()}
