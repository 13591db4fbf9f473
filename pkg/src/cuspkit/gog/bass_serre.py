"""Finite balls in the Bass-Serre tree of a graph of groups."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..errors import BudgetExceeded, OracleError, PreconditionError, UsageError
from ..graph import FiniteGraph, graph_to_dot
from .core import GraphOfGroups, OrientedEdge

NODE_BUDGET = 100_000


@dataclass(frozen=True)
class BassSerreBall:
    root_type: str
    radius: int
    tree: FiniteGraph
    types: dict
    local_degree: dict

    def to_json(self) -> dict:
        return {
            "root": self.root_type,
            "radius": self.radius,
            "local_degree": dict(self.local_degree),
            "nodes": [{"id": v, "type": self.types[v], "degree": self.tree.degree(v)} for v in self.tree.vertices],
            "edges": [list(e) for e in self.tree.edges],
        }

    def to_dot(self) -> str:
        return graph_to_dot(self.tree, "bass_serre", attrs=lambda v: {"label": self.types[v]})


def _coset_table(gog: GraphOfGroups, v: str) -> list[tuple[OrientedEdge, list[str]]]:
    """For each oriented edge ``e`` ending at ``v``: labels of the left cosets of ``j_e(G_e)`` in ``G_v``."""
    G = gog.vertices[v]
    out = []
    for oe in gog.oriented_edges():
        if gog.terminal(oe) != v:
            continue
        gens = [h for h in gog.embedded_generators(oe) if not G.is_identity(h)]
        try:
            reps = G.left_coset_transversal(gens)
        except PreconditionError as exc:
            name = oe[0] if oe[1] > 0 else oe[0] + "~"
            raise PreconditionError(f"edge {name} at vertex {v!r}: {exc}") from None
        # the coset of the identity goes first: it is the edge back towards the parent
        home = next(
            (i for i, r in enumerate(reps) if (G.is_member(gens, r) if gens else G.is_identity(r))),
            None,
        )
        if home is None:
            raise OracleError(f"no coset representative at {v!r} lies in the edge subgroup")
        reps.insert(0, reps.pop(home))
        out.append((oe, [G.format(r) for r in reps]))
    return out


def bass_serre_ball(gog: GraphOfGroups, radius: int, root: Optional[str] = None) -> BassSerreBall:
    """Ball of the given radius around the vertex fixed by ``G_root``.

    A node of type ``v`` has one neighbour per pair (oriented edge ``e`` with
    ``t(e) = v``, left coset of ``j_e(G_e)`` in ``G_v``), of type ``o(e)``.  The
    edge towards the parent is the identity coset of the reversed edge.
    """
    if radius < 0:
        raise UsageError("radius must be non-negative")
    if not gog.vertices:
        raise UsageError("graph of groups has no vertices")
    root = root if root is not None else next(iter(gog.vertices))
    if root not in gog.vertices:
        raise UsageError(f"unknown vertex {root!r}")
    tables = {v: _coset_table(gog, v) for v in gog.vertices}
    degree = {v: sum(len(c) for _, c in t) for v, t in tables.items()}
    ids = [root]
    types = {root: root}
    pairs = []
    frontier = [(root, root, None)]
    for _ in range(radius):
        nxt = []
        for node, v, arrived in frontier:
            for oe, cosets in tables[v]:
                for k, label in enumerate(cosets):
                    if arrived is not None and oe == arrived and k == 0:
                        continue
                    name = oe[0] if oe[1] > 0 else oe[0] + "~"
                    child = f"{node}/{name}:{label}"
                    w = gog.origin(oe)
                    ids.append(child)
                    types[child] = w
                    pairs.append((node, child))
                    if len(ids) > NODE_BUDGET:
                        raise BudgetExceeded(f"Bass-Serre ball exceeds {NODE_BUDGET} nodes")
                    nxt.append((child, w, gog.bar(oe)))
        frontier = nxt
    index = {v: i for i, v in enumerate(ids)}
    tree = FiniteGraph.from_index_edges(ids, [(index[a], index[b]) for a, b in pairs])
    return BassSerreBall(root, radius, tree, types, degree)
