"""Kernels of maps onto finite groups by Reidemeister-Schreier rewriting."""

from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass
from typing import Optional

from ..errors import BudgetExceeded
from ..words import Word, cyclic_reduce, format_word, free_reduce, invert
from .core import Presentation
from .quotients import Homomorphism, _compose

COSET_BUDGET = 50_000


@dataclass(frozen=True)
class KernelReport:
    index: int
    coset_representatives: tuple[Word, ...]
    schreier_edges: tuple[tuple[int, str, int], ...]
    schreier_generators: tuple[Word, ...]
    rewritten_relators: int
    generators_after_tietze: int
    relators_after_tietze: tuple[Word, ...]
    free_rank: Optional[int]

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "coset_representatives": [format_word(w) for w in self.coset_representatives],
            "coset_graph": [[a, s, b] for a, s, b in self.schreier_edges],
            "schreier_generators": [format_word(w) for w in self.schreier_generators],
            "rewritten_relators": self.rewritten_relators,
            "generators_after_tietze": self.generators_after_tietze,
            "relators_after_tietze": [format_word(r) for r in self.relators_after_tietze],
            "free_rank": self.free_rank,
        }


def _canonical_cyclic(r: Word) -> Word:
    r = cyclic_reduce(r)
    if not r:
        return r
    rots = [r[i:] + r[:i] for i in range(len(r))]
    rots += [invert(x) for x in rots]
    return min(rots)


def tietze_eliminate(gens: list[str], rels: list[Word]) -> tuple[list[str], list[Word]]:
    """Repeatedly solve a relator for a generator occurring in it exactly once, then drop both.

    Relators are taken shortest first.  An occurrence index keeps each
    elimination proportional to the relators that actually mention the
    eliminated generator.
    """
    live: dict[int, Word] = {}
    seen: set[Word] = set()
    occ: dict[str, set[int]] = {}
    heap: list[tuple[int, Word, int]] = []
    counter = itertools.count()

    def add(r: Word) -> None:
        r = _canonical_cyclic(free_reduce(r))
        if not r or r in seen:
            return
        k = next(counter)
        seen.add(r)
        live[k] = r
        for s, _ in r:
            occ.setdefault(s, set()).add(k)
        heapq.heappush(heap, (len(r), r, k))

    def drop(k: int) -> Word:
        r = live.pop(k)
        seen.discard(r)
        for s, _ in r:
            occ[s].discard(k)
        return r

    for r in rels:
        add(r)
    removed: set[str] = set()
    while heap:
        _, r, k = heapq.heappop(heap)
        if live.get(k) != r:
            continue
        counts: dict[str, int] = {}
        for s, _ in r:
            counts[s] = counts.get(s, 0) + 1
        once = [s for s in counts if counts[s] == 1]
        if not once:
            # unchanged relators stay ineligible; rewritten ones re-enter the heap as new entries
            continue
        y = min(once)
        i = next(j for j, (s, _) in enumerate(r) if s == y)
        # r = u y^e v = 1  =>  y^e = u^-1 v^-1  =>  y = (v u)^-e
        u, (_, e), v = r[:i], r[i], r[i + 1 :]
        sol = invert(v + u) if e > 0 else v + u
        inv_sol = invert(sol)
        drop(k)
        removed.add(y)
        for j in sorted(occ.pop(y, set())):
            q = drop(j)
            out: list = []
            for s, x in q:
                if s == y:
                    out.extend(sol if x > 0 else inv_sol)
                else:
                    out.append((s, x))
            add(tuple(out))
    return [g for g in gens if g not in removed], sorted(live.values(), key=lambda r: (len(r), r))


def kernel_subgroup(pres: Presentation, hom: Homomorphism, budget: int = COSET_BUDGET) -> KernelReport:
    """Index, coset graph, Schreier generators and rewritten relators of ``ker(hom)``.

    Cosets of the kernel are the elements of the image; the spanning tree of
    the coset graph is breadth-first.  When Tietze elimination removes every
    relator the kernel is free and its rank is reported.
    """
    hom.verify()
    e = tuple(range(hom.degree))
    index = {e: 0}
    elems = [e]
    reps: list[Word] = [()]
    tree_edge: set[tuple[int, str]] = set()
    queue = deque([e])
    while queue:
        g = queue.popleft()
        i = index[g]
        for s in pres.generators:
            h = _compose(g, hom.images[s])
            if h not in index:
                if len(index) >= budget:
                    raise BudgetExceeded(f"image has more than {budget} elements")
                index[h] = len(elems)
                elems.append(h)
                reps.append(reps[i] + ((s, 1),))
                tree_edge.add((i, s))
                queue.append(h)
    n = len(elems)
    step = {}
    edges = []
    for i, g in enumerate(elems):
        for s in pres.generators:
            j = index[_compose(g, hom.images[s])]
            step[(i, s)] = j
            edges.append((i, s, j))
    # Schreier generator for every non-tree edge (i, s)
    sgen: dict[tuple[int, str], str] = {}
    words: list[Word] = []
    for i, s, j in edges:
        if (i, s) in tree_edge:
            continue
        sgen[(i, s)] = f"y{len(words)}"
        words.append(free_reduce(reps[i] + ((s, 1),) + invert(reps[j])))
    back = {}
    for (i, s), j in step.items():
        back[(j, s)] = i

    def rewrite(start: int, word: Word) -> Word:
        out = []
        c = start
        for s, x in word:
            if x > 0:
                name = sgen.get((c, s))
                if name:
                    out.append((name, 1))
                c = step[(c, s)]
            else:
                p = back[(c, s)]
                name = sgen.get((p, s))
                if name:
                    out.append((name, -1))
                c = p
        return free_reduce(out)

    rewritten = [rewrite(c, r) for r in pres.relators for c in range(n)]
    gens, rels = tietze_eliminate([f"y{k}" for k in range(len(words))], rewritten)
    return KernelReport(
        index=n,
        coset_representatives=tuple(reps),
        schreier_edges=tuple(edges),
        schreier_generators=tuple(words),
        rewritten_relators=len(rewritten),
        generators_after_tietze=len(gens),
        relators_after_tietze=tuple(rels),
        free_rank=len(gens) if not rels else None,
    )


def in_kernel(hom: Homomorphism, word) -> bool:
    return hom.is_trivial_on(word)

