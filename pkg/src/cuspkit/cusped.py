"""Truncated cusped spaces: a Cayley ball with a horoball glued on every peripheral coset cell."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import UnknownVertexError, UsageError
from .graph import DistanceMatrix, FiniteGraph, all_pairs_distances, graph_to_dot
from .groups import CayleyBall, CosetSystem, MarkedGroup, cayley_ball, coset_representatives
from .horoball import horoball_edges
from .words import WordLike

RIM_WIDTH = 2


@dataclass(frozen=True)
class HoroballPiece:
    """One horoball: glued over a connected piece of a coset cell."""

    peripheral: int
    representative: str
    base: tuple[str, ...]


@dataclass(frozen=True)
class CuspedSpace:
    cayley: CayleyBall
    cosets: tuple[CosetSystem, ...]
    pieces: tuple[HoroballPiece, ...]
    depth: int
    graph: FiniteGraph
    split_cells: int = 0
    notes: tuple[str, ...] = field(default=())

    @cached_property
    def distances(self) -> DistanceMatrix:
        return all_pairs_distances(self.graph)

    def distance(self, u, v) -> int:
        if u not in self.graph:
            raise UnknownVertexError(f"unknown vertex {u!r}")
        if v not in self.graph:
            raise UnknownVertexError(f"unknown vertex {v!r}")
        d = self.distances(u, v)
        assert d is not None
        return d

    def cayley_vertex(self, label: str) -> tuple:
        return ("cay", label)

    def horoball_vertex(self, peripheral: int, label: str, height: int) -> tuple:
        """Vertex above Cayley vertex ``label`` in the horoball of ``peripheral``."""
        if height == 0:
            return ("cay", label)
        cs = self.cosets[peripheral]
        rep = cs.representatives[cs.cell_of[label]]
        return ("horo", peripheral, rep, label, height)

    def base_label(self, v: tuple) -> str:
        return v[1] if v[0] == "cay" else v[3]

    def height(self, v: tuple) -> int:
        return 0 if v[0] == "cay" else v[4]

    def is_rim(self, v: tuple) -> bool:
        """Vertices near the ball's edge, where truncation distorts distances."""
        return self.cayley.length(self.base_label(v)) >= self.cayley.radius - RIM_WIDTH

    def interior_vertices(self) -> list[tuple]:
        return [v for v in self.graph.vertices if not self.is_rim(v)]

    def summary(self) -> dict:
        return {
            "radius": self.cayley.radius,
            "depth": self.depth,
            "vertices": self.graph.n,
            "edges": self.graph.m,
            "cayley_vertices": self.cayley.graph.n,
            "horoballs": len(self.pieces),
            "split_cells": self.split_cells,
            "interior_vertices": len(self.interior_vertices()),
            "cells_per_peripheral": [len(c.cells) for c in self.cosets],
        }

    def to_json(self) -> dict:
        return {
            "summary": self.summary(),
            "cosets": [c.to_json() for c in self.cosets],
            "vertices": [
                {"id": vertex_name(v), "type": "cayley" if v[0] == "cay" else "horoball",
                 "rim": self.is_rim(v)}
                for v in self.graph.vertices
            ],
            "edges": [[vertex_name(u), vertex_name(v)] for u, v in self.graph.edges],
        }

    def to_dot(self) -> str:
        def attrs(v):
            if v[0] == "cay":
                return {"color": "black"}
            return {"color": ["blue", "red", "darkgreen", "orange"][v[1] % 4]}

        return graph_to_dot(self.graph, "cusped", key=vertex_name, attrs=attrs)


def vertex_name(v: tuple) -> str:
    if v[0] == "cay":
        return v[1]
    _, i, rep, x, m = v
    return f"P{i}[{rep}]:{x}@{m}"


def build_cusped(
    group: MarkedGroup,
    peripherals: Sequence[Sequence[WordLike]],
    radius: int,
    depth: int,
    coset_bound: Optional[int] = None,
) -> CuspedSpace:
    """Glue a depth-``depth`` horoball over every coset cell of every peripheral.

    A cell whose induced subgraph is disconnected (possible for
    non-convex peripherals in a truncated ball) gets one horoball per connected
    piece; the count is reported as ``split_cells``.
    """
    if radius < 0 or depth < 0:
        raise UsageError("radius and depth must be non-negative")
    ball = cayley_ball(group, radius)
    cosets = tuple(coset_representatives(group, p, ball, bound=coset_bound) for p in peripherals)
    cg = ball.graph
    verts: list[tuple] = [("cay", v) for v in cg.vertices]
    pairs: list[tuple[int, int]] = list(cg.index_edges)
    pieces: list[HoroballPiece] = []
    split = 0
    for i, cs in enumerate(cosets):
        for rep, cell in zip(cs.representatives, cs.cells):
            sub = cg.induced_subgraph(cell)
            comps = sub.components()
            if len(comps) > 1:
                split += 1
            for comp in comps:
                comp = sorted(comp, key=cg.index)
                pieces.append(HoroballPiece(i, rep, tuple(comp)))
                if depth == 0:
                    continue
                base = cg.induced_subgraph(comp)
                bd = all_pairs_distances(base).matrix
                k = len(comp)
                # local index t*k + j  ->  global index; height 0 is the Cayley vertex itself
                local = [cg.index(x) for x in comp]
                start = len(verts)
                for m in range(1, depth + 1):
                    verts.extend(("horo", i, rep, x, m) for x in comp)

                def glob(t: int, _local=local, _start=start, _k=k) -> int:
                    h, j = divmod(t, _k)
                    return _local[j] if h == 0 else _start + (h - 1) * _k + j

                for a, b in horoball_edges(bd, depth):
                    if a < k and b < k:
                        continue
                    pairs.append((glob(a), glob(b)))
    graph = FiniteGraph.from_index_edges(verts, pairs)
    return CuspedSpace(ball, cosets, tuple(pieces), depth, graph, split)


def cusped_distance(space: CuspedSpace, u, v) -> int:
    return space.distance(u, v)
