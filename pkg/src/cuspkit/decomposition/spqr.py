"""Triconnected components of a 2-connected graph by repeated splitting and merging.

Split: peel off bundles of parallel edges as bonds, and cut along any
separation pair ``{a, b}`` (found as an articulation point of ``G - a``) into
two pieces joined by a fresh virtual edge ``ab``.  What remains are triangles,
bonds and 3-connected graphs.  Merge: glue bonds sharing a virtual edge into
bigger bonds and triangles into polygons.  The resulting S (polygon),
P (bond) and R (3-connected) nodes are the SPQR nodes of the block.

This is quadratic-ish rather than linear time, which is plenty for the graph
sizes the decomposition tree is used on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable

from ..graph import FiniteGraph, articulation_points
from .nodes import BlockStructure

Edge = tuple[int, int, Hashable]


@dataclass(frozen=True)
class SpqrNode:
    kind: str  # "S", "P" or "R"
    vertices: frozenset
    edges: tuple[Edge, ...]


def _separation_classes(E: list[Edge], a: int, b: int) -> list[list[Edge]]:
    parent = list(range(len(E)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    first: dict[int, int] = {}
    for k, (u, v, _) in enumerate(E):
        for x in (u, v):
            if x in (a, b):
                continue
            if x in first:
                parent[find(k)] = find(first[x])
            else:
                first[x] = k
    groups: dict[int, list[Edge]] = {}
    for k, e in enumerate(E):
        groups.setdefault(find(k), []).append(e)
    return list(groups.values())


class _Splitter:
    def __init__(self):
        self.virtual = 0
        self.parts: list[tuple[str, list[Edge]]] = []

    def fresh(self) -> tuple:
        self.virtual += 1
        return ("virtual", self.virtual)

    def split_once(self, E: list[Edge]):
        verts = sorted({x for u, v, _ in E for x in (u, v)})
        if len(verts) == 2:
            return None
        bundles: dict[tuple[int, int], list[Edge]] = {}
        for e in E:
            bundles.setdefault((min(e[0], e[1]), max(e[0], e[1])), []).append(e)
        for (a, b), bundle in sorted(bundles.items()):
            if len(bundle) >= 2:
                t = self.fresh()
                rest = [e for e in E if e not in bundle]
                return [bundle + [(a, b, t)], rest + [(a, b, t)]]
        if len(E) == 3:
            return None
        pos = {v: i for i, v in enumerate(verts)}
        pairs = [(pos[u], pos[v]) for u, v, _ in E]
        for a in verts:
            g = FiniteGraph.from_index_edges(
                [v for v in verts if v != a], [(i, j) for i, j in _drop(pairs, pos[a])]
            )
            for b in articulation_points(g):
                classes = _separation_classes(E, a, b)
                big = [c for c in classes if len(c) >= 2]
                if len(big) < 2:
                    continue
                t = self.fresh()
                lo, hi = min(a, b), max(a, b)
                first = big[0]
                rest = [e for e in E if e not in first]
                return [first + [(lo, hi, t)], rest + [(lo, hi, t)]]
        return None

    def run(self, E: list[Edge]) -> None:
        stack = [E]
        while stack:
            part = stack.pop()
            pieces = self.split_once(part)
            if pieces is None:
                nverts = len({x for u, v, _ in part for x in (u, v)})
                kind = "P" if nverts == 2 else ("S" if len(part) == 3 else "R")
                self.parts.append((kind, part))
            else:
                stack.extend(reversed(pieces))


def _drop(pairs, k):
    """Index pairs avoiding vertex ``k``, renumbered to close the gap."""
    for i, j in pairs:
        if k in (i, j):
            continue
        yield (i - (i > k), j - (j > k))


def spqr_nodes(block: FiniteGraph) -> list[SpqrNode]:
    """S, P and R nodes of a 2-connected graph with at least three vertices."""
    E: list[Edge] = [(i, j, ("real", k)) for k, (i, j) in enumerate(block.index_edges)]
    sp = _Splitter()
    sp.run(E)
    parts = sp.parts
    # merge S with S and P with P across shared virtual edges
    owner: dict[Hashable, list[int]] = {}
    for k, (_, edges) in enumerate(parts):
        for u, v, t in edges:
            if t[0] == "virtual":
                owner.setdefault(t, []).append(k)
    parent = list(range(len(parts)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    internal = set()
    for t, (i, j) in sorted(owner.items(), key=lambda kv: kv[0][1]):
        if parts[i][0] == parts[j][0] and parts[i][0] in "SP":
            parent[find(i)] = find(j)
            internal.add(t)
    groups: dict[int, list[int]] = {}
    for k in range(len(parts)):
        groups.setdefault(find(k), []).append(k)
    verts = block.vertices
    out = []
    for members in groups.values():
        kind = parts[members[0]][0]
        edges = tuple(e for k in members for e in parts[k][1] if e[2] not in internal)
        vs = frozenset(verts[x] for u, v, _ in edges for x in (u, v))
        out.append(SpqrNode(kind, vs, edges))
    return out


def block_structure_spqr(block: FiniteGraph) -> BlockStructure:
    """Necklaces from S nodes, CutPairs from P nodes and from virtual edges between S/R nodes, Rigid from R nodes.

    A bridge (two-vertex block) becomes a two-vertex Rigid node.
    """
    verts = block.vertices
    if block.n == 2:
        return BlockStructure(verts, (), (), (frozenset(verts),))
    nodes = spqr_nodes(block)
    pairs = {n.vertices for n in nodes if n.kind == "P"}
    holders: dict[Hashable, list[SpqrNode]] = {}
    for n in nodes:
        for u, v, t in n.edges:
            if t[0] == "virtual":
                holders.setdefault(t, []).append(n)
    for t, (x, y) in holders.items():
        if x.kind != "P" and y.kind != "P":
            e = next(e for e in x.edges if e[2] == t)
            pairs.add(frozenset((verts[e[0]], verts[e[1]])))

    def ordered(sets):
        return tuple(sorted(sets, key=lambda s: sorted(block.index(v) for v in s)))

    return BlockStructure(
        verts,
        ordered(pairs),
        ordered(n.vertices for n in nodes if n.kind == "S"),
        ordered(n.vertices for n in nodes if n.kind == "R"),
    )
