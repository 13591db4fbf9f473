"""Finite simple graphs with exact integer path metrics.

Everything downstream (Cayley balls, horoballs, cusped spaces, the
decomposition tree) is a :class:`FiniteGraph`.  Vertices are opaque hashable
identifiers kept in insertion order; internally the graph is stored as integer
adjacency so that breadth-first search and the separator scans stay cheap.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import deque
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import ParseError, PreconditionError, UnknownVertexError, UsageError

Vertex = Hashable


class FiniteGraph:
    """Undirected simple graph; immutable once built."""

    __slots__ = ("_vertices", "_index", "_adj", "_edges", "_labels")

    def __init__(
        self,
        vertices: Iterable[Vertex] = (),
        edges: Iterable[tuple[Vertex, Vertex]] = (),
        labels: Optional[Mapping[Vertex, str]] = None,
    ):
        verts = tuple(vertices)
        index = {v: i for i, v in enumerate(verts)}
        if len(index) != len(verts):
            raise UsageError("duplicate vertex identifier")
        pairs = []
        for u, v in edges:
            if u not in index:
                raise UnknownVertexError(f"edge endpoint {u!r} is not a vertex")
            if v not in index:
                raise UnknownVertexError(f"edge endpoint {v!r} is not a vertex")
            pairs.append((index[u], index[v]))
        self._init(verts, index, pairs, labels, strict=True)

    @classmethod
    def from_index_edges(
        cls,
        vertices: Sequence[Vertex],
        pairs: Iterable[tuple[int, int]],
        labels: Optional[Mapping[Vertex, str]] = None,
    ) -> "FiniteGraph":
        """Build from integer endpoint pairs; duplicates are merged silently."""
        self = cls.__new__(cls)
        verts = tuple(vertices)
        self._init(verts, {v: i for i, v in enumerate(verts)}, pairs, labels, strict=False)
        return self

    def _init(self, verts, index, pairs, labels, strict):
        n = len(verts)
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for i, j in pairs:
            if i == j:
                raise UsageError(f"self-loop at {verts[i]!r}")
            if j in nbrs[i]:
                if strict:
                    raise UsageError(f"duplicate edge {{{verts[i]!r}, {verts[j]!r}}}")
                continue
            nbrs[i].add(j)
            nbrs[j].add(i)
        self._vertices = verts
        self._index = index
        self._adj = tuple(tuple(sorted(s)) for s in nbrs)
        self._edges = tuple((i, j) for i in range(n) for j in self._adj[i] if i < j)
        self._labels = dict(labels) if labels else {}

    # -- basic access ---------------------------------------------------

    @property
    def vertices(self) -> tuple:
        return self._vertices

    @property
    def edges(self) -> tuple:
        v = self._vertices
        return tuple((v[i], v[j]) for i, j in self._edges)

    @property
    def index_edges(self) -> tuple[tuple[int, int], ...]:
        return self._edges

    @property
    def index_adjacency(self) -> tuple[tuple[int, ...], ...]:
        return self._adj

    @property
    def n(self) -> int:
        return len(self._vertices)

    @property
    def m(self) -> int:
        return len(self._edges)

    def __len__(self) -> int:
        return len(self._vertices)

    def __contains__(self, v) -> bool:
        return v in self._index

    def __repr__(self) -> str:
        return f"FiniteGraph(n={self.n}, m={self.m})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteGraph):
            return NotImplemented
        return self._vertices == other._vertices and set(map(frozenset, self.edges)) == set(
            map(frozenset, other.edges)
        )

    def __hash__(self):
        return hash((self._vertices, self._edges))

    def index(self, v: Vertex) -> int:
        try:
            return self._index[v]
        except (KeyError, TypeError):
            raise UnknownVertexError(f"unknown vertex {v!r}") from None

    def neighbors(self, v: Vertex) -> tuple:
        return tuple(self._vertices[j] for j in self._adj[self.index(v)])

    def degree(self, v: Vertex) -> int:
        return len(self._adj[self.index(v)])

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return self.index(v) in self._adj[self.index(u)]

    def label(self, v: Vertex) -> str:
        self.index(v)
        return self._labels.get(v, str(v))

    @property
    def labels(self) -> dict:
        return dict(self._labels)

    # -- derived graphs -------------------------------------------------

    def induced_subgraph(self, keep: Iterable[Vertex]) -> "FiniteGraph":
        """Induced subgraph; vertices keep the parent's insertion order."""
        wanted = {self.index(v) for v in keep}
        order = sorted(wanted)
        new = {old: k for k, old in enumerate(order)}
        pairs = [(new[i], new[j]) for i, j in self._edges if i in wanted and j in wanted]
        verts = [self._vertices[i] for i in order]
        labels = {v: self._labels[v] for v in verts if v in self._labels}
        return FiniteGraph.from_index_edges(verts, pairs, labels)

    def remove_vertices(self, drop: Iterable[Vertex]) -> "FiniteGraph":
        gone = {self.index(v) for v in drop}
        return self.induced_subgraph(
            self._vertices[i] for i in range(self.n) if i not in gone
        )

    def relabel(self, mapping: Callable[[Vertex], Vertex]) -> "FiniteGraph":
        verts = [mapping(v) for v in self._vertices]
        labels = {mapping(v): s for v, s in self._labels.items()}
        return FiniteGraph.from_index_edges(verts, self._edges, labels)

    # -- connectivity ---------------------------------------------------

    def component_indices(self, removed: Iterable[int] = ()) -> list[list[int]]:
        gone = set(removed)
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s] or s in gone:
                continue
            seen[s] = True
            comp, queue = [s], deque([s])
            while queue:
                u = queue.popleft()
                for w in self._adj[u]:
                    if not seen[w] and w not in gone:
                        seen[w] = True
                        comp.append(w)
                        queue.append(w)
            comps.append(sorted(comp))
        return comps

    def components(self) -> list[list[Vertex]]:
        return [[self._vertices[i] for i in c] for c in self.component_indices()]

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.component_indices()) == 1


# -- distances ------------------------------------------------------------


class DistanceMatrix:
    """All-pairs integer distances; ``-1`` in :attr:`matrix` means unreachable."""

    __slots__ = ("vertices", "matrix", "_index")

    def __init__(self, vertices: Sequence[Vertex], matrix: np.ndarray):
        self.vertices = tuple(vertices)
        self.matrix = matrix
        self.matrix.setflags(write=False)
        self._index = {v: i for i, v in enumerate(self.vertices)}

    def index(self, v: Vertex) -> int:
        try:
            return self._index[v]
        except (KeyError, TypeError):
            raise UnknownVertexError(f"unknown vertex {v!r}") from None

    def __call__(self, u: Vertex, v: Vertex) -> Optional[int]:
        d = int(self.matrix[self.index(u), self.index(v)])
        return None if d < 0 else d

    def row(self, v: Vertex) -> dict:
        r = self.matrix[self.index(v)]
        return {w: (None if r[k] < 0 else int(r[k])) for k, w in enumerate(self.vertices)}

    def __len__(self) -> int:
        return len(self.vertices)

    def diameter(self) -> int:
        if not len(self.vertices):
            return 0
        if (self.matrix < 0).any():
            raise PreconditionError("diameter of a disconnected graph is infinite")
        return int(self.matrix.max())

    def restrict(self, keep: Sequence[Vertex]) -> "DistanceMatrix":
        idx = np.array([self.index(v) for v in keep], dtype=np.intp)
        return DistanceMatrix(keep, self.matrix[np.ix_(idx, idx)].copy())


def bfs_distances(graph: FiniteGraph, source: Vertex) -> dict:
    """Unweighted shortest-path distances from ``source``.

    Unreachable vertices map to ``None``.
    """
    s = graph.index(source)
    dist = [-1] * graph.n
    dist[s] = 0
    queue = deque([s])
    adj = graph.index_adjacency
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return {v: (None if d < 0 else d) for v, d in zip(graph.vertices, dist)}


def all_pairs_distances(graph: FiniteGraph) -> DistanceMatrix:
    n = graph.n
    if n == 0:
        return DistanceMatrix((), np.zeros((0, 0), dtype=np.int64))
    e = np.array(graph.index_edges, dtype=np.int64).reshape(-1, 2)
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    adj = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    raw = shortest_path(adj, method="D", directed=False, unweighted=True)
    out = np.full((n, n), -1, dtype=np.int64)
    finite = np.isfinite(raw)
    out[finite] = raw[finite].astype(np.int64)
    return DistanceMatrix(graph.vertices, out)


# -- separators -------------------------------------------------------------


def _require_connected(graph: FiniteGraph, what: str) -> None:
    if not graph.is_connected():
        raise PreconditionError(f"{what} requires a connected graph")


def _tarjan(graph: FiniteGraph):
    """Iterative Hopcroft-Tarjan: articulation flags and blocks as vertex-index lists."""
    n = graph.n
    adj = graph.index_adjacency
    disc = [-1] * n
    low = [0] * n
    is_cut = [False] * n
    blocks: list[list[int]] = []
    clock = 0
    for root in range(n):
        if disc[root] >= 0:
            continue
        disc[root] = low[root] = clock
        clock += 1
        if not adj[root]:
            blocks.append([root])
            continue
        root_children = 0
        edge_stack: list[tuple[int, int]] = []
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            u, parent, it = stack[-1]
            advanced = False
            for w in it:
                if disc[w] < 0:
                    edge_stack.append((u, w))
                    disc[w] = low[w] = clock
                    clock += 1
                    stack.append((w, u, iter(adj[w])))
                    advanced = True
                    break
                if w != parent and disc[w] < disc[u]:
                    edge_stack.append((u, w))
                    low[u] = min(low[u], disc[w])
            if advanced:
                continue
            stack.pop()
            if parent < 0:
                continue
            low[parent] = min(low[parent], low[u])
            if low[u] >= disc[parent]:
                if parent == root:
                    root_children += 1
                else:
                    is_cut[parent] = True
                comp = set()
                while True:
                    a, b = edge_stack.pop()
                    comp.update((a, b))
                    if (a, b) == (parent, u):
                        break
                blocks.append(sorted(comp))
        if root_children > 1:
            is_cut[root] = True
    return is_cut, blocks


def articulation_points(graph: FiniteGraph) -> tuple:
    """Vertices whose removal increases the number of components, in vertex order."""
    _require_connected(graph, "articulation_points")
    is_cut, _ = _tarjan(graph)
    return tuple(v for v, c in zip(graph.vertices, is_cut) if c)


def biconnected_components(graph: FiniteGraph) -> list[list[Vertex]]:
    """Blocks (maximal 2-connected subgraphs or bridges) as ordered vertex lists.

    Blocks are sorted by their smallest vertex index, then lexicographically.
    """
    _, blocks = _tarjan(graph)
    blocks.sort()
    return [[graph.vertices[i] for i in b] for b in blocks]


def two_separators(graph: FiniteGraph) -> list[tuple[Vertex, Vertex]]:
    """All vertex pairs whose joint deletion disconnects a 2-connected graph.

    Computed by exhaustive deletion, so quadratic in the vertex count times a
    traversal.
    """
    _require_connected(graph, "two_separators")
    cuts = articulation_points(graph)
    if cuts:
        raise PreconditionError(
            f"two_separators needs a 2-connected graph; {cuts[0]!r} is an articulation point"
        )
    if graph.n < 4:
        raise PreconditionError("two_separators needs at least 4 vertices")
    out = []
    for i, j in itertools.combinations(range(graph.n), 2):
        if len(graph.component_indices((i, j))) > 1:
            out.append((graph.vertices[i], graph.vertices[j]))
    return out


# -- I/O ------------------------------------------------------------------


def loads_json(text: str, source: str = "<input>"):
    """``json.loads`` with a position-annotated :class:`ParseError`."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{source}: line {exc.lineno} column {exc.colno} (char {exc.pos}): {exc.msg}"
        ) from None


def graph_from_json(obj) -> FiniteGraph:
    if isinstance(obj, str):
        obj = loads_json(obj)
    if not isinstance(obj, dict) or "vertices" not in obj or "edges" not in obj:
        raise ParseError('graph JSON needs "vertices" and "edges"')
    verts = obj["vertices"]
    if not isinstance(verts, list) or not all(isinstance(v, (str, int)) for v in verts):
        raise ParseError('"vertices" must be a list of strings')
    verts = [str(v) for v in verts]
    edges = []
    for e in obj["edges"]:
        if not isinstance(e, list) or len(e) != 2:
            raise ParseError(f"edge {e!r} is not a pair")
        edges.append((str(e[0]), str(e[1])))
    labels = obj.get("labels") or None
    try:
        return FiniteGraph(verts, edges, labels)
    except UsageError as exc:
        raise ParseError(str(exc)) from None


def vertex_key(v: Vertex) -> str:
    return v if isinstance(v, str) else str(v)


def graph_to_json(graph: FiniteGraph, key: Callable[[Vertex], str] = vertex_key) -> dict:
    out = {
        "vertices": [key(v) for v in graph.vertices],
        "edges": [[key(u), key(v)] for u, v in graph.edges],
    }
    if graph.labels:
        out["labels"] = {key(v): graph.labels[v] for v in graph.vertices if v in graph.labels}
    return out


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph_to_dot(
    graph: FiniteGraph,
    name: str = "G",
    key: Callable[[Vertex], str] = vertex_key,
    attrs: Optional[Callable[[Vertex], dict]] = None,
) -> str:
    lines = [f"graph {_dot_quote(name)} {{"]
    for v in graph.vertices:
        a = dict(attrs(v)) if attrs else {}
        if v in graph.labels:
            a.setdefault("label", graph.labels[v])
        extra = ""
        if a:
            extra = " [" + ", ".join(f"{k}={_dot_quote(str(x))}" for k, x in a.items()) + "]"
        lines.append(f"  {_dot_quote(key(v))}{extra};")
    for u, v in graph.edges:
        lines.append(f"  {_dot_quote(key(u))} -- {_dot_quote(key(v))};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- standard families --------------------------------------------------------


def path_graph(n: int) -> FiniteGraph:
    return FiniteGraph.from_index_edges([str(i) for i in range(n)], [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> FiniteGraph:
    if n < 3:
        raise UsageError("a cycle needs at least 3 vertices")
    return FiniteGraph.from_index_edges([str(i) for i in range(n)], [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> FiniteGraph:
    return FiniteGraph.from_index_edges(
        [str(i) for i in range(n)], itertools.combinations(range(n), 2)
    )


def star_graph(k: int) -> FiniteGraph:
    """Centre ``c`` joined to ``k`` leaves."""
    return FiniteGraph.from_index_edges(["c"] + [str(i) for i in range(k)], [(0, i) for i in range(1, k + 1)])


def wheel_graph(k: int) -> FiniteGraph:
    """Hub ``h`` joined to every vertex of the cycle C_k."""
    verts = ["h"] + [str(i) for i in range(k)]
    pairs = [(0, i) for i in range(1, k + 1)] + [(i, i % k + 1) for i in range(1, k + 1)]
    return FiniteGraph.from_index_edges(verts, pairs)


def theta_graph(paths: int = 3, length: int = 2) -> FiniteGraph:
    """Hubs ``u`` and ``v`` joined by ``paths`` internally disjoint paths of ``length`` edges."""
    verts = ["u", "v"]
    pairs = []
    for p in range(paths):
        chain = [0]
        for j in range(1, length):
            verts.append(f"p{p}_{j}")
            chain.append(len(verts) - 1)
        chain.append(1)
        pairs.extend(zip(chain, chain[1:]))
    return FiniteGraph(verts, [(verts[i], verts[j]) for i, j in pairs])


def grid_graph(rows: int, cols: int) -> FiniteGraph:
    verts = [f"{r},{c}" for r in range(rows) for c in range(cols)]
    pairs = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                pairs.append((i, i + 1))
            if r + 1 < rows:
                pairs.append((i, i + cols))
    return FiniteGraph.from_index_edges(verts, pairs)


def block_chain(sizes: Sequence[int]) -> FiniteGraph:
    """Cycles of the given lengths glued in a chain at single vertices (length 2 = a bridge)."""
    verts: list[str] = ["0"]
    pairs: list[tuple[int, int]] = []
    joint = 0
    for size in sizes:
        ring = [joint]
        for _ in range(size - 1):
            verts.append(str(len(verts)))
            ring.append(len(verts) - 1)
        if size == 2:
            pairs.append((ring[0], ring[1]))
        else:
            pairs.extend((ring[i], ring[(i + 1) % size]) for i in range(size))
        joint = ring[len(ring) // 2]
    return FiniteGraph.from_index_edges(verts, pairs)


def random_connected_graph(n: int, p: float, rng: random.Random) -> FiniteGraph:
    """Uniformly random recursive spanning tree plus independent extra edges."""
    pairs = set()
    for i in range(1, n):
        pairs.add((rng.randrange(i), i))
    for i, j in itertools.combinations(range(n), 2):
        if (i, j) not in pairs and rng.random() < p:
            pairs.add((i, j))
    return FiniteGraph.from_index_edges([str(i) for i in range(n)], sorted(pairs))


FAMILIES: dict[str, Callable[..., FiniteGraph]] = {
    "path": path_graph,
    "cycle": cycle_graph,
    "complete": complete_graph,
    "star": star_graph,
    "wheel": wheel_graph,
    "theta": theta_graph,
    "grid": grid_graph,
    "block_chain": block_chain,
}


def graph_from_spec(spec) -> FiniteGraph:
    """Accept either the JSON graph schema or ``{"family": name, ...params}``."""
    if isinstance(spec, dict) and "family" in spec:
        params = {k: v for k, v in spec.items() if k != "family"}
        try:
            return FAMILIES[spec["family"]](**params)
        except KeyError:
            raise ParseError(f"unknown graph family {spec['family']!r}") from None
        except TypeError as exc:
            raise ParseError(f"bad parameters for family {spec['family']!r}: {exc}") from None
    return graph_from_json(spec)
