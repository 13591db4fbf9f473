"""Cut-point / cut-pair decomposition trees of finite graphs."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import PreconditionError
from ..graph import FiniteGraph, articulation_points, biconnected_components, vertex_key
from .nodes import KINDS, BlockStructure, DecompositionNode, DecompositionTree, assemble
from .oracle import ORACLE_LIMIT, block_structure_oracle, brute_force_oracle
from .spqr import SpqrNode, block_structure_spqr, spqr_nodes


@dataclass(frozen=True)
class RClasses:
    blocks: tuple[tuple, ...]
    cut_points: tuple
    incidence: dict  # cut point -> indices of the blocks through it

    def to_json(self) -> dict:
        return {
            "blocks": [[vertex_key(v) for v in b] for b in self.blocks],
            "cut_points": [vertex_key(c) for c in self.cut_points],
            "incidence": {vertex_key(c): list(ix) for c, ix in self.incidence.items()},
        }


def r_classes(graph: FiniteGraph) -> RClasses:
    """Blocks (biconnected components) and cut points of a connected graph."""
    if graph.n == 0 or not graph.is_connected():
        raise PreconditionError("r_classes needs a connected, non-empty graph")
    blocks = tuple(tuple(b) for b in biconnected_components(graph))
    cuts = articulation_points(graph)
    incidence = {c: tuple(i for i, b in enumerate(blocks) if c in b) for c in cuts}
    return RClasses(blocks, cuts, incidence)


def block_structures(block: FiniteGraph) -> BlockStructure:
    """CutPair / Necklace / Rigid sets of one 2-connected block (fast path)."""
    if block.n < 2 or not block.is_connected():
        raise PreconditionError("block must be connected with at least 2 vertices")
    if block.n > 2 and articulation_points(block):
        raise PreconditionError("block is not 2-connected")
    return block_structure_spqr(block)


def combined_tree(graph: FiniteGraph) -> DecompositionTree:
    """Containment tree on cut points, inseparable cut pairs, necklaces and rigid sets."""
    if graph.n < 3:
        raise PreconditionError("decomposition needs at least 3 vertices")
    rc = r_classes(graph)
    structures = [block_structure_spqr(graph.induced_subgraph(b)) for b in rc.blocks]
    return assemble(graph, rc.cut_points, structures)


__all__ = [
    "KINDS",
    "ORACLE_LIMIT",
    "BlockStructure",
    "DecompositionNode",
    "DecompositionTree",
    "RClasses",
    "SpqrNode",
    "assemble",
    "block_structure_oracle",
    "block_structure_spqr",
    "block_structures",
    "brute_force_oracle",
    "combined_tree",
    "r_classes",
    "spqr_nodes",
]
