"""Decomposition-tree nodes and the containment-tree assembly shared by both algorithms."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..errors import VerificationError
from ..graph import FiniteGraph, graph_to_dot, vertex_key

KINDS = ("CutPoint", "CutPair", "Necklace", "Rigid")
_RANK = {k: i for i, k in enumerate(KINDS)}


@dataclass(frozen=True)
class DecompositionNode:
    kind: str
    vertices: frozenset

    def __post_init__(self):
        if self.kind not in _RANK:
            raise ValueError(f"unknown node kind {self.kind!r}")
        size = len(self.vertices)
        if self.kind == "CutPoint" and size != 1:
            raise VerificationError("cut point nodes are singletons")
        if self.kind == "CutPair" and size != 2:
            raise VerificationError("cut pair nodes have two vertices")
        if self.kind == "Necklace" and size < 3:
            raise VerificationError("necklaces have at least three vertices")

    def key(self, order: dict) -> tuple:
        return (_RANK[self.kind], sorted(order[v] for v in self.vertices))


@dataclass(frozen=True)
class BlockStructure:
    """Typed structure nodes of one block (its CutPair, Necklace and Rigid sets)."""

    block: tuple
    cut_pairs: tuple[frozenset, ...]
    necklaces: tuple[frozenset, ...]
    rigid: tuple[frozenset, ...]

    def nodes(self) -> list[DecompositionNode]:
        return (
            [DecompositionNode("CutPair", s) for s in self.cut_pairs]
            + [DecompositionNode("Necklace", s) for s in self.necklaces]
            + [DecompositionNode("Rigid", s) for s in self.rigid]
        )


@dataclass(frozen=True)
class DecompositionTree:
    graph_vertices: tuple
    nodes: tuple[DecompositionNode, ...]
    edges: tuple[tuple[int, int], ...]

    def signature(self) -> tuple[frozenset, frozenset]:
        """Order-independent description used to compare two trees."""
        nodes = frozenset((n.kind, n.vertices) for n in self.nodes)
        edges = frozenset(
            frozenset({(self.nodes[i].kind, self.nodes[i].vertices), (self.nodes[j].kind, self.nodes[j].vertices)})
            for i, j in self.edges
        )
        return nodes, edges

    def is_tree(self) -> bool:
        n = len(self.nodes)
        if n == 0:
            return True
        if len(self.edges) != n - 1:
            return False
        adj = [[] for _ in range(n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == n

    def to_json(self) -> dict:
        order = {v: i for i, v in enumerate(self.graph_vertices)}
        return {
            "nodes": [
                {"kind": n.kind, "vertices": [vertex_key(v) for v in sorted(n.vertices, key=order.__getitem__)]}
                for n in self.nodes
            ],
            "edges": [list(e) for e in self.edges],
        }

    def to_dot(self) -> str:
        order = {v: i for i, v in enumerate(self.graph_vertices)}
        shapes = {"CutPoint": "point", "CutPair": "diamond", "Necklace": "ellipse", "Rigid": "box"}
        names = [f"{n.kind}{i}" for i, n in enumerate(self.nodes)]
        g = FiniteGraph(names, [(names[i], names[j]) for i, j in self.edges])

        def attrs(name):
            n = self.nodes[names.index(name)]
            label = ",".join(vertex_key(v) for v in sorted(n.vertices, key=order.__getitem__))
            return {"shape": shapes[n.kind], "label": f"{n.kind} {{{label}}}"}

        return graph_to_dot(g, "decomposition", attrs=attrs)


def assemble(graph: FiniteGraph, cut_points: Iterable, structures: Sequence[BlockStructure]) -> DecompositionTree:
    """Containment tree over cut points and per-block structure nodes.

    Inside a block, each CutPair is joined to every Necklace/Rigid node of that
    block containing it.  A cut point is joined, in each block through it, to
    a single structure node containing it: the smallest, then by kind, then by
    vertex order.  The result must be a tree; anything else is an internal
    error and is raised, not repaired.
    """
    order = {v: i for i, v in enumerate(graph.vertices)}
    cut_points = sorted(set(cut_points), key=order.__getitem__)
    nodes: dict[tuple, DecompositionNode] = {}
    for c in cut_points:
        n = DecompositionNode("CutPoint", frozenset([c]))
        nodes[(n.kind, n.vertices)] = n
    for st in structures:
        for n in st.nodes():
            nodes.setdefault((n.kind, n.vertices), n)
    ordered = sorted(nodes.values(), key=lambda n: n.key(order))
    index = {(n.kind, n.vertices): i for i, n in enumerate(ordered)}
    edges: set[tuple[int, int]] = set()
    for st in structures:
        big = [n for n in st.nodes() if n.kind != "CutPair"]
        for pair in st.cut_pairs:
            for n in big:
                if pair < n.vertices:
                    edges.add(tuple(sorted((index[("CutPair", pair)], index[(n.kind, n.vertices)]))))
        block = set(st.block)
        for c in cut_points:
            if c not in block:
                continue
            holders = [n for n in st.nodes() if c in n.vertices]
            if not holders:
                raise VerificationError(f"cut point {c!r} lies in no structure node of its block")
            best = min(holders, key=lambda n: (len(n.vertices), n.key(order)))
            edges.add(tuple(sorted((index[("CutPoint", frozenset([c]))], index[(best.kind, best.vertices)]))))
    tree = DecompositionTree(graph.vertices, tuple(ordered), tuple(sorted(edges)))
    if not tree.is_tree():
        raise VerificationError(
            f"decomposition is not a tree ({len(tree.nodes)} nodes, {len(tree.edges)} edges)"
        )
    return tree
