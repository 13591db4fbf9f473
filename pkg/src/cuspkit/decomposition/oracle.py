"""Brute-force decomposition straight from the definitions (small graphs only).

Within a block ``B``:

* a cut pair is a vertex pair whose deletion disconnects ``B``;
* a set is inseparable when no cut pair leaves two of its points in
  different components (points of the pair itself are deleted, not separated);
* a set ``S`` of at least three vertices is cyclic when ``B`` is covered by
  connected pieces ``M_1, ..., M_k`` meeting in a circle, consecutive pieces
  sharing exactly one point of ``S``.  With ``S``-bridges (single edges between
  points of ``S``, and components of ``B - S`` with their attachment points)
  this says: every bridge attaches to exactly two points of ``S``, and the
  attachment pairs form a single cycle through all of ``S``; that cycle is
  the circular order, and the bridges on each consecutive pair form ``M_i``.

Necklaces are maximal cyclic sets; Rigid nodes are maximal inseparable sets
not contained in a necklace; CutPair nodes are inseparable cut pairs.
"""

from __future__ import annotations

import itertools

from ..errors import PreconditionError
from ..graph import FiniteGraph, articulation_points, biconnected_components
from .nodes import BlockStructure, DecompositionTree, assemble

ORACLE_LIMIT = 12


def _components(adj: list[set], alive: set) -> list[set]:
    seen, out = set(), []
    for s in sorted(alive):
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w in alive and w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        out.append(comp)
    return out


def _is_cyclic(adj: list[set], n: int, S: frozenset) -> bool:
    pairs = set()
    for u in S:
        for w in adj[u]:
            if w in S and u < w:
                pairs.add((u, w))
    for comp in _components(adj, set(range(n)) - S):
        att = {w for u in comp for w in adj[u] if w in S}
        if len(att) != 2:
            return False
        pairs.add(tuple(sorted(att)))
    if len(pairs) != len(S):
        return False
    deg = {s: 0 for s in S}
    nbr = {s: [] for s in S}
    for a, b in pairs:
        deg[a] += 1
        deg[b] += 1
        nbr[a].append(b)
        nbr[b].append(a)
    if any(d != 2 for d in deg.values()):
        return False
    # a 2-regular pair graph is one cycle iff it is connected
    start = next(iter(S))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in nbr[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(S)


def _maximal_cliques(vertices: list[int], ok) -> list[frozenset]:
    """Bron-Kerbosch over the relation ``ok(u, w)``."""
    nbr = {v: {w for w in vertices if w != v and ok(v, w)} for v in vertices}
    out: list[frozenset] = []

    def expand(r: set, p: set, x: set) -> None:
        if not p and not x:
            out.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda u: len(nbr[u] & p))
        for v in sorted(p - nbr[pivot]):
            expand(r | {v}, p & nbr[v], x & nbr[v])
            p = p - {v}
            x = x | {v}

    expand(set(), set(vertices), set())
    return out


def block_structure_oracle(block: FiniteGraph) -> BlockStructure:
    n = block.n
    verts = block.vertices
    adj = [set(a) for a in block.index_adjacency]
    if n == 2:
        return BlockStructure(verts, (), (), (frozenset(verts),))
    everything = set(range(n))
    cut_pairs = []
    splits = {}
    if n >= 4:
        for a, b in itertools.combinations(range(n), 2):
            comps = _components(adj, everything - {a, b})
            if len(comps) > 1:
                cut_pairs.append((a, b))
                where = {}
                for k, comp in enumerate(comps):
                    for u in comp:
                        where[u] = k
                splits[(a, b)] = where

    def inseparable(u: int, w: int) -> bool:
        for (a, b), where in splits.items():
            if u in (a, b) or w in (a, b):
                continue
            if where[u] != where[w]:
                return False
        return True

    cyclic = []
    for size in range(3, n + 1):
        for S in itertools.combinations(range(n), size):
            S = frozenset(S)
            if _is_cyclic(adj, n, S):
                cyclic.append(S)
    necklaces = [S for S in cyclic if not any(S < T for T in cyclic)]
    insep = _maximal_cliques(list(range(n)), inseparable)
    rigid = [A for A in insep if len(A) >= 2 and not any(A <= N for N in necklaces)]
    pairs = [frozenset((a, b)) for a, b in cut_pairs if inseparable(a, b)]

    def name(sets):
        return tuple(sorted((frozenset(verts[i] for i in s) for s in sets), key=lambda s: sorted(block.index(v) for v in s)))

    return BlockStructure(verts, name(pairs), name(necklaces), name(rigid))


def brute_force_oracle(graph: FiniteGraph, max_vertices: int = ORACLE_LIMIT) -> DecompositionTree:
    """Decomposition tree computed literally from the definitions."""
    if graph.n > max_vertices:
        raise PreconditionError(f"the brute-force oracle is limited to {max_vertices} vertices")
    if graph.n < 3:
        raise PreconditionError("decomposition needs at least 3 vertices")
    cuts = articulation_points(graph)
    structures = [block_structure_oracle(graph.induced_subgraph(b)) for b in biconnected_components(graph)]
    return assemble(graph, cuts, structures)
