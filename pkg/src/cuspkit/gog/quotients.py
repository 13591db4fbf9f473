"""Homomorphisms from presented groups onto finite permutation groups."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from ..errors import BudgetExceeded, PreconditionError, UsageError, VerificationError
from ..groups import CyclicGroup, MarkedGroup, PermutationGroup, enumerate_elements
from ..words import Word, exponent_sum, format_word, free_reduce
from .core import GraphOfGroups, Presentation, free_product_group, fundamental_presentation

SEARCH_TRIALS = 100_000


def _compose(p: tuple, q: tuple) -> tuple:
    return tuple(q[i] for i in p)


def _inverse(p: tuple) -> tuple:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


@dataclass(frozen=True)
class Homomorphism:
    """Generators of ``source`` sent to permutations of ``range(degree)`` (right action)."""

    source: Presentation
    degree: int
    images: Mapping[str, tuple]
    method: str = "given"

    def __post_init__(self):
        for s in self.source.generators:
            p = self.images.get(s)
            if p is None:
                raise UsageError(f"no image for generator {s!r}")
            if sorted(p) != list(range(self.degree)):
                raise UsageError(f"image of {s!r} is not a permutation of degree {self.degree}")

    def image(self, word) -> tuple:
        g = tuple(range(self.degree))
        for s, e in self.source.parse(word):
            p = self.images[s]
            g = _compose(g, p if e > 0 else _inverse(p))
        return g

    def is_trivial_on(self, word) -> bool:
        return self.image(word) == tuple(range(self.degree))

    def verify(self) -> None:
        for r in self.source.relators:
            if not self.is_trivial_on(r):
                raise VerificationError(f"relator {format_word(r)} does not map to the identity")

    def image_group(self) -> PermutationGroup:
        return PermutationGroup(self.degree, {s: self.images[s] for s in self.source.generators})

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "degree": self.degree,
            "image_order": self.image_group().order(),
            "images": {s: list(self.images[s]) for s in self.source.generators},
        }


def homomorphism_from_json(pres: Presentation, obj: dict) -> Homomorphism:
    """``{"degree": n, "images": {gen: [perm]}}`` or ``{"cyclic": n, "images": {gen: k}}``."""
    if "cyclic" in obj:
        n = int(obj["cyclic"])
        images = {s: tuple((i + int(obj["images"].get(s, 0))) % n for i in range(n)) for s in pres.generators}
        return Homomorphism(pres, n, images)
    return Homomorphism(pres, int(obj["degree"]), {s: tuple(map(int, p)) for s, p in obj["images"].items()})


def _regular_action(G: MarkedGroup) -> tuple[list, dict[str, tuple]]:
    """Right regular permutation action of a finite group on its own elements."""
    elems = enumerate_elements(G)
    index = {g: i for i, g in enumerate(elems)}
    perms = {s: tuple(index[G.act(g, (s, 1))] for g in elems) for s in G.generators}
    return elems, perms


def _faithful_action(G: MarkedGroup) -> dict[str, tuple]:
    if isinstance(G, PermutationGroup) or hasattr(G, "base") and isinstance(G.base, PermutationGroup):
        base = G if isinstance(G, PermutationGroup) else G.base
        return {new: base.perm(old) for old, new in zip(base.generators, G.generators)}
    return _regular_action(G)[1]


def _direct_sum(blocks: list[dict[str, tuple]], degrees: list[int], gens: Sequence[str]) -> tuple[int, dict]:
    """Place each block's permutations on its own range of points; absent generators act trivially."""
    total = sum(degrees)
    images = {s: list(range(total)) for s in gens}
    off = 0
    for block, d in zip(blocks, degrees):
        for s, p in block.items():
            img = images[s]
            for i in range(d):
                img[off + i] = off + p[i]
        off += d
    return total, {s: tuple(v) for s, v in images.items()}


def _forbidden_words(gog: GraphOfGroups, pres: Presentation, forbidden) -> list[Word]:
    group = free_product_group(gog)
    out = []
    for f in forbidden:
        w = free_reduce(pres.parse(f))
        if group.is_identity(group.evaluate(w)):
            raise UsageError(f"forbidden element {format_word(w)} is the identity")
        out.append(w)
    return out


def finite_quotient_avoiding(
    gog: GraphOfGroups,
    forbidden: Sequence,
    seed: int = 0,
    trials: int = SEARCH_TRIALS,
    max_degree: int = 60,
) -> Homomorphism:
    """A finite permutation quotient in which no forbidden element dies and every vertex group embeds.

    First tries the product of the vertex groups with one cyclic factor
    ``Z/N_e`` per stable letter, ``N_e = 1 + max |exponent sum of e|`` over the
    forbidden words.  If some forbidden element still dies there, searches
    seeded random permutation representations (a random conjugate of a
    faithful action per vertex group, random permutations for stable letters)
    until the budget runs out.
    """
    if not gog.has_trivial_edge_groups():
        raise PreconditionError("finite quotients are only searched for trivial edge groups")
    for v, G in gog.vertices.items():
        if not G.is_finite:
            raise PreconditionError(f"vertex group at {v!r} must be finite")
    pres = fundamental_presentation(gog)
    words = _forbidden_words(gog, pres, forbidden)
    stable = [s for s in pres.generators if s in {e.name for e in gog.edges}]
    vgroups = [gog.renamed_vertex_group(v) for v in gog.vertices]
    blocks, degrees = [], []
    for G in vgroups:
        act = _faithful_action(G)
        blocks.append(act)
        degrees.append(len(next(iter(act.values()))) if act else 1)
    for t in stable:
        n = 1 + max([abs(exponent_sum(w, t)) for w in words] or [0])
        blocks.append({t: CyclicGroup(n).perm("a")})
        degrees.append(n)
    degree, images = _direct_sum(blocks, degrees, pres.generators)
    hom = Homomorphism(pres, degree, images, method="canonical")
    if all(not hom.is_trivial_on(w) for w in words):
        hom.verify()
        _check_embeds(hom, gog)
        return hom
    rng = random.Random(seed)
    orders = [len(enumerate_elements(G)) for G in vgroups]
    regular = [_regular_action(G)[1] for G in vgroups]
    base = math.lcm(*orders) if orders else 1
    used = 0
    k = 1
    while used < trials:
        d = base * k
        if d > max_degree:
            k = 1
            d = base
            if d > max_degree:
                break
        blocks = []
        for G, act, o in zip(vgroups, regular, orders):
            copies = d // o
            sigma = list(range(d))
            rng.shuffle(sigma)
            inv = _inverse(tuple(sigma))
            # copies of the regular action, conjugated by sigma
            block = {}
            for s, p in act.items():
                q = [0] * d
                for c in range(copies):
                    for i in range(o):
                        q[c * o + i] = c * o + p[i]
                block[s] = tuple(sigma[q[inv[x]]] for x in range(d))
            blocks.append(block)
        images = {s: tuple(range(d)) for s in pres.generators}
        for block in blocks:
            images.update(block)
        for t in stable:
            perm = list(range(d))
            rng.shuffle(perm)
            images[t] = tuple(perm)
        hom = Homomorphism(pres, d, images, method=f"random search (seed {seed}, trial {used + 1})")
        used += 1
        if all(not hom.is_trivial_on(w) for w in words):
            hom.verify()
            _check_embeds(hom, gog)
            return hom
        k += 1
    raise BudgetExceeded(f"no separating quotient found in {used} trials up to degree {max_degree}")


def _check_embeds(hom: Homomorphism, gog: GraphOfGroups) -> None:
    for v in gog.vertices:
        G = gog.renamed_vertex_group(v)
        seen = set()
        for g in enumerate_elements(G):
            img = hom.image(G.to_word(g))
            if img in seen:
                raise VerificationError(f"vertex group at {v!r} does not embed in the quotient")
            seen.add(img)
