"""Graphs of groups with Serre's conventions.

Each geometric edge ``e`` comes with its reverse ``e~``; an oriented edge is
written ``(name, +1)`` for ``e`` (from ``origin`` to ``terminal``) and
``(name, -1)`` for its reverse.  The edge group is shared by both
orientations and ``j_e`` maps it into the vertex group at the terminal end.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from ..errors import ParseError, PreconditionError, UsageError, VerificationError
from ..groups import (
    FreeGroup,
    FreeProduct,
    MarkedGroup,
    PermutationGroup,
    RenamedGroup,
    TrivialGroup,
    enumerate_elements,
    group_from_config,
    is_trivial_group,
)
from ..words import Word, format_word, free_reduce, invert, parse_word

OrientedEdge = tuple[str, int]


@dataclass(frozen=True)
class GogEdge:
    name: str
    origin: str
    terminal: str
    group: MarkedGroup = field(default_factory=TrivialGroup)
    into_terminal: Mapping[str, Word] = field(default_factory=dict)
    into_origin: Mapping[str, Word] = field(default_factory=dict)


def substitute(word: Iterable, images: Mapping[str, Word]) -> Word:
    out: list = []
    for s, e in word:
        img = images[s]
        out.extend(img if e > 0 else invert(img))
    return free_reduce(out)


class GraphOfGroups:
    def __init__(self, vertices: Mapping[str, MarkedGroup], edges: Sequence[GogEdge], check: bool = True):
        self.vertices: dict[str, MarkedGroup] = dict(vertices)
        self.edges: tuple[GogEdge, ...] = tuple(edges)
        self._edge = {}
        for e in self.edges:
            if e.name in self._edge:
                raise UsageError(f"duplicate edge name {e.name!r}")
            for end in (e.origin, e.terminal):
                if end not in self.vertices:
                    raise UsageError(f"edge {e.name!r} ends at unknown vertex {end!r}")
            self._edge[e.name] = e
        if check:
            self.validate()

    def __repr__(self):
        return f"GraphOfGroups(vertices={list(self.vertices)}, edges={[e.name for e in self.edges]})"

    # -- Serre structure -----------------------------------------------------

    def oriented_edges(self) -> list[OrientedEdge]:
        return [(e.name, s) for e in self.edges for s in (1, -1)]

    def edge(self, name: str) -> GogEdge:
        try:
            return self._edge[name]
        except KeyError:
            raise UsageError(f"unknown edge {name!r}") from None

    @staticmethod
    def bar(oe: OrientedEdge) -> OrientedEdge:
        return (oe[0], -oe[1])

    def terminal(self, oe: OrientedEdge) -> str:
        e = self.edge(oe[0])
        return e.terminal if oe[1] > 0 else e.origin

    def origin(self, oe: OrientedEdge) -> str:
        return self.terminal(self.bar(oe))

    def edge_group(self, oe: OrientedEdge) -> MarkedGroup:
        return self.edge(oe[0]).group

    def images(self, oe: OrientedEdge) -> Mapping[str, Word]:
        e = self.edge(oe[0])
        return e.into_terminal if oe[1] > 0 else e.into_origin

    def embed(self, oe: OrientedEdge, g) -> object:
        """``j_oe(g)`` as a normal form of the terminal vertex group."""
        target = self.vertices[self.terminal(oe)]
        return target.evaluate(substitute(self.edge_group(oe).to_word(g), self.images(oe)))

    def embedded_generators(self, oe: OrientedEdge) -> list:
        G = self.edge_group(oe)
        return [self.embed(oe, G.evaluate(((s, 1),))) for s in G.generators]

    def has_trivial_edge_groups(self) -> bool:
        return all(is_trivial_group(e.group) for e in self.edges)

    def validate(self) -> None:
        for e in self.edges:
            for oe in ((e.name, 1), (e.name, -1)):
                target = self.vertices[self.terminal(oe)]
                imgs = self.images(oe)
                for s in e.group.generators:
                    if s not in imgs:
                        raise UsageError(f"edge {e.name!r}: no image for {s!r} in {self.terminal(oe)!r}")
                    target.check_word(imgs[s])
                try:
                    rels = e.group.relators()
                except NotImplementedError:
                    rels = []
                for r in rels:
                    if not target.is_identity(target.evaluate(substitute(r, imgs))):
                        raise VerificationError(
                            f"edge {e.name!r}: relator {format_word(r)} does not map to the identity"
                        )
                if e.group.is_finite:
                    seen = {}
                    for g in enumerate_elements(e.group):
                        h = self.embed(oe, g)
                        if h in seen:
                            raise VerificationError(f"edge {e.name!r}: edge group map is not injective")
                        seen[h] = g

    # -- underlying graph --------------------------------------------------------

    def default_spanning_tree(self) -> tuple[str, ...]:
        """Breadth-first spanning tree, visiting vertices and edges in declaration order."""
        verts = list(self.vertices)
        if not verts:
            return ()
        seen = {verts[0]}
        tree = []
        queue = deque([verts[0]])
        while queue:
            v = queue.popleft()
            for e in self.edges:
                for a, b in ((e.origin, e.terminal), (e.terminal, e.origin)):
                    if a == v and b not in seen:
                        seen.add(b)
                        tree.append(e.name)
                        queue.append(b)
        if len(seen) != len(verts):
            raise PreconditionError("underlying graph is disconnected")
        return tuple(tree)

    def check_spanning_tree(self, tree: Iterable[str]) -> tuple[str, ...]:
        tree = tuple(tree)
        for name in tree:
            self.edge(name)
        if len(set(tree)) != len(tree) or len(tree) != len(self.vertices) - 1:
            raise PreconditionError(
                f"a spanning tree needs exactly {len(self.vertices) - 1} distinct edges, got {len(tree)}"
            )
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for name in tree:
            e = self.edge(name)
            a, b = find(e.origin), find(e.terminal)
            if a == b:
                raise PreconditionError(f"edge {name!r} closes a cycle in the proposed spanning tree")
            parent[a] = b
        return tree

    def generator_names(self) -> dict[tuple[str, str], str]:
        """Global names for vertex-group generators; clashes get a ``vertex.`` prefix."""
        count: dict[str, int] = {}
        for G in self.vertices.values():
            for s in G.generators:
                count[s] = count.get(s, 0) + 1
        edge_names = set(self._edge)
        out = {}
        for v, G in self.vertices.items():
            for s in G.generators:
                out[(v, s)] = s if count[s] == 1 and s not in edge_names else f"{v}.{s}"
        return out

    def renamed_vertex_group(self, v: str) -> MarkedGroup:
        names = self.generator_names()
        G = self.vertices[v]
        return RenamedGroup(G, {s: names[(v, s)] for s in G.generators})

    # -- JSON --------------------------------------------------------------------

    @classmethod
    def from_json(cls, obj: dict) -> "GraphOfGroups":
        if not isinstance(obj, dict) or "vertices" not in obj:
            raise ParseError('graph of groups JSON needs "vertices"')
        verts = {}
        for item in obj["vertices"]:
            try:
                verts[str(item["name"])] = group_from_config(item.get("group", {"kind": "trivial"}))
            except (KeyError, TypeError):
                raise ParseError(f"bad vertex entry {item!r}") from None
        edges = []
        for item in obj.get("edges", []):
            try:
                group = group_from_config(item.get("group", {"kind": "trivial"}))
                edges.append(
                    GogEdge(
                        name=str(item["name"]),
                        origin=str(item["from"]),
                        terminal=str(item["to"]),
                        group=group,
                        into_terminal={k: parse_word(w) for k, w in item.get("into_to", {}).items()},
                        into_origin={k: parse_word(w) for k, w in item.get("into_from", {}).items()},
                    )
                )
            except (KeyError, TypeError, AttributeError):
                raise ParseError(f"bad edge entry {item!r}") from None
        return cls(verts, edges)


# -- presentations --------------------------------------------------------------


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...]

    def to_text(self) -> str:
        return "<" + ", ".join(self.generators) + " | " + ", ".join(format_word(r) for r in self.relators) + ">"

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "relators": [format_word(r) for r in self.relators],
            "text": self.to_text(),
        }

    def free_group(self) -> FreeGroup:
        return FreeGroup(self.generators)

    def parse(self, word) -> Word:
        w = parse_word(word)
        gens = set(self.generators)
        for s, _ in w:
            if s not in gens:
                raise ParseError(f"{s!r} is not a generator of the presentation")
        return w

    def deficiency(self) -> int:
        return len(self.generators) - len(self.relators)


def fundamental_presentation(gog: GraphOfGroups, spanning_tree: Optional[Iterable[str]] = None) -> Presentation:
    """Presentation of the fundamental group relative to a spanning tree.

    Generators: vertex-group generators and one stable letter (named after the
    edge) per edge outside the tree.  Relators: vertex-group relators and
    ``t_e j_e(g) t_e^-1 = j_e~(g)`` for each edge-group generator ``g``.
    """
    tree = gog.default_spanning_tree() if spanning_tree is None else gog.check_spanning_tree(spanning_tree)
    names = gog.generator_names()
    gens: list[str] = []
    rels: list[Word] = []
    for v, G in gog.vertices.items():
        ren = {s: names[(v, s)] for s in G.generators}
        gens.extend(ren[s] for s in G.generators)
        try:
            vrels = G.relators()
        except NotImplementedError:
            raise UsageError(f"vertex group at {v!r} has no presentation") from None
        rels.extend(tuple((ren[s], e) for s, e in r) for r in vrels)
    tree_set = set(tree)
    for e in gog.edges:
        if e.name not in tree_set:
            gens.append(e.name)
    for e in gog.edges:
        stable = () if e.name in tree_set else ((e.name, 1),)
        to_ren = {s: names[(e.terminal, s)] for s in gog.vertices[e.terminal].generators}
        from_ren = {s: names[(e.origin, s)] for s in gog.vertices[e.origin].generators}
        for g in e.group.generators:
            a = tuple((to_ren[s], x) for s, x in e.into_terminal[g])
            b = tuple((from_ren[s], x) for s, x in e.into_origin[g])
            r = free_reduce(stable + a + invert(stable) + invert(b))
            if r:
                rels.append(r)
    return Presentation(tuple(gens), tuple(rels))


def free_product_group(gog: GraphOfGroups, spanning_tree: Optional[Iterable[str]] = None) -> FreeProduct:
    """The fundamental group of a graph of groups with trivial edge groups, as a free product.

    Factors are the vertex groups (renamed as in the presentation) followed by
    one infinite cyclic factor per stable letter.
    """
    if not gog.has_trivial_edge_groups():
        raise PreconditionError("normal forms are only available for trivial edge groups")
    tree = gog.default_spanning_tree() if spanning_tree is None else gog.check_spanning_tree(spanning_tree)
    factors = [gog.renamed_vertex_group(v) for v in gog.vertices]
    factors += [FreeGroup([e.name]) for e in gog.edges if e.name not in set(tree)]
    return FreeProduct(factors)


def free_product_normal_form(gog: GraphOfGroups, word, spanning_tree=None) -> list[tuple[str, str]]:
    """Reduced syllable sequence ``[(factor, element), ...]``; empty iff ``word`` is trivial."""
    P = free_product_group(gog, spanning_tree)
    nf = P.evaluate(parse_word(word))
    names = list(gog.vertices) + [f.generators[0] for f in P.factors[len(gog.vertices) :]]
    return [(names[i], P.factors[i].format(h)) for i, h in nf]


# -- quotients by vertex subgroups -----------------------------------------------


def _coset_quotient(G: MarkedGroup, N: set) -> tuple[PermutationGroup, dict]:
    """``G / N`` acting on the right cosets of the normal subgroup ``N``."""
    elems = enumerate_elements(G)
    coset_of: dict = {}
    cosets: list = []
    for g in elems:
        if g in coset_of:
            continue
        k = len(cosets)
        members = [G.mul(n, g) for n in N]
        cosets.append(g)
        for h in members:
            coset_of[h] = k
    perms = {}
    for s in G.generators:
        perms[s] = tuple(coset_of[G.act(g, (s, 1))] for g in cosets)
    Q = PermutationGroup(len(cosets), perms)
    # element of G  ->  element of Q
    proj = {g: Q.evaluate(G.to_word(g)) for g in elems}
    return Q, proj


def _subgroup_closure(G: MarkedGroup, gens: Sequence) -> set:
    e = G.identity()
    seen = {e}
    queue = deque([e])
    steps = list(gens) + [G.inverse(g) for g in gens]
    while queue:
        g = queue.popleft()
        for p in steps:
            h = G.mul(g, p)
            if h not in seen:
                seen.add(h)
                queue.append(h)
    return seen


def quotient_by_vertex_subgroups(gog: GraphOfGroups, normal: Mapping[str, Sequence]) -> GraphOfGroups:
    """Replace every ``G_v`` by ``G_v / G'_v`` (finite vertex groups).

    ``normal[v]`` lists words generating ``G'_v`` (omitted vertices: trivial).
    Each ``G'_v`` must be normal, and every edge must satisfy
    ``j_e^-1(G'_t(e)) = j_e~^-1(G'_t(e~))``.
    """
    unknown = set(normal) - set(gog.vertices)
    if unknown:
        raise UsageError(f"unknown vertex {sorted(unknown)[0]!r}")
    subs: dict[str, set] = {}
    quots: dict[str, tuple] = {}
    for v, G in gog.vertices.items():
        words = [parse_word(w) for w in normal.get(v, [])]
        if not G.is_finite:
            if words:
                raise PreconditionError(f"vertex {v!r}: quotients need a finite vertex group")
            continue
        N = _subgroup_closure(G, [G.evaluate(w) for w in words])
        for s in G.generators:
            x = G.evaluate(((s, 1),))
            xi = G.inverse(x)
            for n in N:
                if G.mul(G.mul(xi, n), x) not in N:
                    raise PreconditionError(f"vertex {v!r}: subgroup is not normal")
        subs[v] = N
        quots[v] = _coset_quotient(G, N)
    new_vertices = {v: (quots[v][0] if v in quots else G) for v, G in gog.vertices.items()}
    new_edges = []
    for e in gog.edges:
        kernels = []
        for oe in ((e.name, 1), (e.name, -1)):
            t = gog.terminal(oe)
            if t not in subs:
                kernels.append({e.group.identity()} if e.group.is_finite else None)
                continue
            kernels.append({g for g in enumerate_elements(e.group) if gog.embed(oe, g) in subs[t]})
        if kernels[0] != kernels[1]:
            raise PreconditionError(f"edge {e.name!r}: preimages of the two vertex subgroups differ")
        K = kernels[0]
        if K is None:
            new_edges.append(e)
            continue
        Ge, _ = _coset_quotient(e.group, K)
        new_edges.append(GogEdge(e.name, e.origin, e.terminal, Ge, dict(e.into_terminal), dict(e.into_origin)))
    # GraphOfGroups validation re-checks that each induced edge map is a well-defined injection
    return GraphOfGroups(new_vertices, new_edges, check=True)


def graph_of_groups_to_json(gog: GraphOfGroups) -> dict:
    def group_json(G: MarkedGroup) -> dict:
        out = {"type": type(G).__name__, "generators": list(G.generators)}
        if G.is_finite:
            out["order"] = len(enumerate_elements(G))
        return out

    return {
        "vertices": [{"name": v, "group": group_json(G)} for v, G in gog.vertices.items()],
        "edges": [
            {
                "name": e.name,
                "from": e.origin,
                "to": e.terminal,
                "group": group_json(e.group),
                "into_to": {k: format_word(w) for k, w in e.into_terminal.items()},
                "into_from": {k: format_word(w) for k, w in e.into_origin.items()},
            }
            for e in gog.edges
        ],
    }
