"""Groups presented through a normal-form oracle.

A :class:`MarkedGroup` knows its generator names, its identity, how to
multiply a normal form on the right by a single letter, and how to write a
normal form back as a word.  Everything else (products, inverses, Cayley balls,
coset partitions) is derived from those three operations.

Built-in instances: free abelian groups, free groups, finite permutation
groups (with cyclic and trivial shortcuts), and free/direct products of these.
Arbitrary groups can be plugged in through :class:`OracleGroup`.
"""

from __future__ import annotations

import abc
import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Optional, Sequence

from .errors import BudgetExceeded, OracleError, ParseError, PreconditionError, UsageError
from .graph import FiniteGraph
from .words import Letter, Word, WordLike, cyclic_reduce, format_word, free_reduce, invert, parse_word

NormalForm = Hashable

ENUMERATION_BUDGET = 200_000


class MarkedGroup(abc.ABC):
    """A group together with a finite generating set ``S``."""

    generators: tuple[str, ...] = ()
    is_finite: bool = False

    @abc.abstractmethod
    def identity(self) -> NormalForm: ...

    @abc.abstractmethod
    def act(self, g: NormalForm, letter: Letter) -> NormalForm:
        """Normal form of ``g * s^exp``."""

    @abc.abstractmethod
    def to_word(self, g: NormalForm) -> Word: ...

    # -- derived operations -------------------------------------------------

    def letters(self) -> list[Letter]:
        return [(s, e) for s in self.generators for e in (1, -1)]

    def check_word(self, word: Iterable[Letter]) -> Word:
        word = tuple(word)
        gens = set(self.generators)
        for name, _ in word:
            if name not in gens:
                raise UsageError(f"{name!r} is not a generator of {self!r}")
        return word

    def evaluate(self, word: WordLike, start: Optional[NormalForm] = None) -> NormalForm:
        g = self.identity() if start is None else start
        for letter in self.check_word(parse_word(word)):
            g = self.act(g, letter)
        return g

    def mul(self, g: NormalForm, h: NormalForm) -> NormalForm:
        return self.evaluate(self.to_word(h), start=g)

    def inverse(self, g: NormalForm) -> NormalForm:
        return self.evaluate(invert(self.to_word(g)))

    def is_identity(self, g: NormalForm) -> bool:
        return g == self.identity()

    def format(self, g: NormalForm) -> str:
        return format_word(self.to_word(g))

    def sort_key(self, g: NormalForm):
        return g

    def relators(self) -> list[Word]:
        """Defining relators over :attr:`generators` (empty for free groups)."""
        raise NotImplementedError(f"{type(self).__name__} has no known presentation")

    def order_of(self, g: NormalForm, bound: int = 10_000) -> Optional[int]:
        """Order of ``g``; ``None`` if it exceeds ``bound`` (infinite for our purposes)."""
        h = g
        for k in range(1, bound + 1):
            if self.is_identity(h):
                return k
            h = self.mul(h, g)
        return None

    def is_member(self, gens: Sequence[NormalForm], g: NormalForm) -> Optional[bool]:
        """Exact subgroup membership when the group knows how; ``None`` otherwise."""
        return None

    def left_coset_transversal(self, gens: Sequence[NormalForm]) -> list[NormalForm]:
        """Representatives of the left cosets ``gH``; raises on infinite or unknown index."""
        raise PreconditionError(f"cannot enumerate cosets in {self!r}")


# -- free abelian -------------------------------------------------------------


def _echelon(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Integer row echelon form with positive pivots (Euclid on columns)."""
    work = [list(r) for r in rows if any(r)]
    basis: list[list[int]] = []
    for col in range(ncols):
        while True:
            nz = [r for r in work if r[col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda r: (abs(r[col]), r))
            others = [r for r in work if r is not piv]
            done = True
            for r in others:
                if r[col]:
                    q = r[col] // piv[col]
                    for k in range(ncols):
                        r[k] -= q * piv[k]
                    if r[col]:
                        done = False
            work = [r for r in others if any(r)]
            if done:
                if piv[col] < 0:
                    piv = [-x for x in piv]
                basis.append(piv)
                break
            work.append(piv)
    return basis


def _reduce_mod_lattice(vec: Sequence[int], basis: list[list[int]]) -> list[int]:
    v = list(vec)
    for row in basis:
        col = next(k for k, x in enumerate(row) if x)
        q = v[col] // row[col]
        if q:
            for k in range(len(v)):
                v[k] -= q * row[k]
    return v


class FreeAbelianGroup(MarkedGroup):
    """``Z^n`` with normal forms the exponent vectors."""

    def __init__(self, rank: int = 1, names: Optional[Sequence[str]] = None):
        if names is None:
            names = ["x", "y", "z", "w"][:rank] if rank <= 4 else [f"x{i}" for i in range(rank)]
        if len(names) != rank:
            raise UsageError("need one generator name per coordinate")
        self.rank = rank
        self.generators = tuple(names)
        self._pos = {s: i for i, s in enumerate(names)}

    def __repr__(self):
        return f"FreeAbelianGroup({self.rank})"

    def identity(self):
        return (0,) * self.rank

    def act(self, g, letter):
        name, exp = letter
        i = self._pos[name]
        return g[:i] + (g[i] + exp,) + g[i + 1 :]

    def mul(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inverse(self, g):
        return tuple(-a for a in g)

    def to_word(self, g):
        out: list[Letter] = []
        for name, k in zip(self.generators, g):
            out.extend([(name, 1 if k > 0 else -1)] * abs(k))
        return tuple(out)

    def sort_key(self, g):
        return (sum(abs(x) for x in g), g)

    def format(self, g):
        return str(g[0]) if self.rank == 1 else "(" + ",".join(map(str, g)) + ")"

    def relators(self):
        return [
            ((a, 1), (b, 1), (a, -1), (b, -1))
            for a, b in itertools.combinations(self.generators, 2)
        ]

    def order_of(self, g, bound=10_000):
        return 1 if not any(g) else None

    def is_member(self, gens, g):
        basis = _echelon(gens, self.rank)
        return not any(_reduce_mod_lattice(g, basis))

    def left_coset_transversal(self, gens):
        basis = _echelon(gens, self.rank)
        if len(basis) < self.rank:
            raise PreconditionError("subgroup has infinite index in Z^n")
        pivots = [row[next(k for k, x in enumerate(row) if x)] for row in basis]
        return [tuple(v) for v in itertools.product(*(range(p) for p in pivots))]


# -- free groups --------------------------------------------------------------


class _Folded:
    """Stallings folding of a finite set of words into a based graph."""

    def __init__(self, words: Iterable[Word]):
        self.parent: list[int] = [0]
        self.out: list[dict] = [{}]
        self._pending: list[tuple[int, int]] = []
        for w in words:
            w = free_reduce(w)
            if not w:
                continue
            cur = 0
            for k, (name, exp) in enumerate(w):
                nxt = 0 if k == len(w) - 1 else self._new()
                self._add(cur, (name, exp), nxt)
                cur = nxt
        self._fold()

    def _new(self) -> int:
        self.parent.append(len(self.parent))
        self.out.append({})
        return len(self.parent) - 1

    def find(self, v: int) -> int:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def _set(self, u: int, key: Letter, v: int) -> None:
        u = self.find(u)
        if key in self.out[u]:
            self._pending.append((self.out[u][key], v))
        else:
            self.out[u][key] = v

    def _add(self, u: int, letter: Letter, v: int) -> None:
        self._set(u, letter, v)
        self._set(v, (letter[0], -letter[1]), u)
        self._fold()

    def _fold(self) -> None:
        while self._pending:
            a, b = self._pending.pop()
            a, b = self.find(a), self.find(b)
            if a == b:
                continue
            if b < a:
                a, b = b, a
            self.parent[b] = a
            moved, self.out[b] = self.out[b], {}
            for key, t in moved.items():
                self._set(a, key, t)

    def step(self, v: int, letter: Letter) -> Optional[int]:
        t = self.out[self.find(v)].get(letter)
        return None if t is None else self.find(t)

    def accepts(self, word: Word) -> bool:
        v: Optional[int] = 0
        for letter in word:
            v = self.step(v, letter)
            if v is None:
                return False
        return v == 0

    def vertices(self) -> list[int]:
        return sorted({self.find(v) for v in range(len(self.parent))})


class FreeGroup(MarkedGroup):
    """Free group on the given names; normal forms are freely reduced words."""

    def __init__(self, names: Sequence[str] | int = ("a", "b")):
        if isinstance(names, int):
            names = [chr(ord("a") + i) for i in range(names)] if names <= 26 else [f"g{i}" for i in range(names)]
        self.generators = tuple(names)

    def __repr__(self):
        return f"FreeGroup({list(self.generators)!r})"

    def identity(self):
        return ()

    def act(self, g, letter):
        if g and g[-1][0] == letter[0] and g[-1][1] == -letter[1]:
            return g[:-1]
        return g + (letter,)

    def mul(self, g, h):
        return free_reduce(g + h)

    def inverse(self, g):
        return invert(g)

    def to_word(self, g):
        return g

    def sort_key(self, g):
        return (len(g), g)

    def relators(self):
        return []

    def order_of(self, g, bound=10_000):
        return 1 if not g else None

    def is_member(self, gens, g):
        return _Folded(gens).accepts(g)

    def left_coset_transversal(self, gens):
        folded = _Folded(gens)
        letters = self.letters()
        verts = folded.vertices()
        if any(folded.step(v, s) is None for v in verts for s in letters):
            raise PreconditionError("subgroup has infinite index in the free group")
        # words from the base vertex give right cosets H*u; invert for left cosets
        reach = {0: ()}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for s in letters:
                w = folded.step(v, s)
                if w not in reach:
                    reach[w] = reach[v] + (s,)
                    queue.append(w)
        return [invert(reach[v]) for v in verts]


# -- finite permutation groups -------------------------------------------------


def _compose(p: tuple, q: tuple) -> tuple:
    """Apply ``p`` then ``q`` (right action)."""
    return tuple(q[i] for i in p)


def _perm_inverse(p: tuple) -> tuple:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


class PermutationGroup(MarkedGroup):
    """Finite group generated by permutations of ``range(degree)``.

    Permutations act on the right: ``g*s`` maps ``i`` to ``s[g[i]]``.
    """

    is_finite = True

    def __init__(self, degree: int, generators: dict[str, Sequence[int]]):
        self.degree = degree
        self.generators = tuple(generators)
        self._perms = {}
        for name, img in generators.items():
            img = tuple(int(x) for x in img)
            if sorted(img) != list(range(degree)):
                raise UsageError(f"generator {name!r} is not a permutation of range({degree})")
            self._perms[name] = img
        self._inv = {name: _perm_inverse(p) for name, p in self._perms.items()}

    def __repr__(self):
        return f"PermutationGroup(degree={self.degree}, generators={list(self.generators)!r})"

    def identity(self):
        return tuple(range(self.degree))

    def perm(self, name: str, exp: int = 1) -> tuple:
        return self._perms[name] if exp > 0 else self._inv[name]

    def act(self, g, letter):
        return _compose(g, self.perm(*letter))

    def mul(self, g, h):
        return _compose(g, h)

    def inverse(self, g):
        return _perm_inverse(g)

    @cached_property
    def _tree(self) -> dict:
        """Breadth-first spanning tree of the Cayley graph: element -> (parent, letter)."""
        e = self.identity()
        tree = {e: None}
        queue = deque([e])
        while queue:
            g = queue.popleft()
            for letter in self.letters():
                h = self.act(g, letter)
                if h not in tree:
                    if len(tree) >= ENUMERATION_BUDGET:
                        raise BudgetExceeded(f"group order exceeds {ENUMERATION_BUDGET}")
                    tree[h] = (g, letter)
                    queue.append(h)
        return tree

    def elements(self) -> list:
        return list(self._tree)

    def order(self) -> int:
        return len(self._tree)

    def to_word(self, g):
        tree = self._tree
        if g not in tree:
            raise OracleError(f"{g!r} is not an element of {self!r}")
        out = []
        while tree[g] is not None:
            g, letter = tree[g]
            out.append(letter)
        return tuple(reversed(out))

    def sort_key(self, g):
        return (len(self.to_word(g)), self.to_word(g))

    def relators(self):
        tree = self._tree
        seen = set()
        out = []
        for g in tree:
            for name in self.generators:
                h = self.act(g, (name, 1))
                if tree[h] == (g, (name, 1)):
                    continue
                r = cyclic_reduce(self.to_word(g) + ((name, 1),) + invert(self.to_word(h)))
                if not r:
                    continue
                key = min(min(r[i:] + r[:i], invert(r[i:] + r[:i])) for i in range(len(r)))
                if key not in seen:
                    seen.add(key)
                    out.append(r)
        return out

    def order_of(self, g, bound=10_000):
        h, k = g, 1
        while h != self.identity():
            h = _compose(h, g)
            k += 1
        return k

    def subgroup_elements(self, gens: Sequence[tuple]) -> set:
        e = self.identity()
        seen = {e}
        queue = deque([e])
        gens = list(gens) + [_perm_inverse(p) for p in gens]
        while queue:
            g = queue.popleft()
            for p in gens:
                h = _compose(g, p)
                if h not in seen:
                    seen.add(h)
                    queue.append(h)
        return seen

    def is_member(self, gens, g):
        return g in self.subgroup_elements(gens)

    def left_coset_transversal(self, gens):
        sub = self.subgroup_elements(gens)
        reps, covered = [], set()
        for g in sorted(self.elements(), key=self.sort_key):
            if g in covered:
                continue
            reps.append(g)
            covered.update(_compose(g, h) for h in sub)
        return reps


class CyclicGroup(PermutationGroup):
    """``Z/n`` as the rotation group of an ``n``-cycle, presented as ``<a | a^n>``."""

    def __init__(self, n: int, name: str = "a"):
        if n < 1:
            raise UsageError("cyclic group order must be at least 1")
        self.n = n
        super().__init__(n, {name: tuple((i + 1) % n for i in range(n))})

    def __repr__(self):
        return f"CyclicGroup({self.n}, {self.generators[0]!r})"

    def relators(self):
        return [((self.generators[0], 1),) * self.n]


class TrivialGroup(PermutationGroup):
    def __init__(self):
        super().__init__(1, {})

    def __repr__(self):
        return "TrivialGroup()"

    def relators(self):
        return []


# -- products -----------------------------------------------------------------


def _factor_map(factors: Sequence[MarkedGroup]) -> dict[str, int]:
    owner: dict[str, int] = {}
    for i, f in enumerate(factors):
        for s in f.generators:
            if s in owner:
                raise UsageError(f"generator {s!r} appears in two factors")
            owner[s] = i
    return owner


class FreeProduct(MarkedGroup):
    """Free product; normal forms are alternating tuples of ``(factor, nontrivial nf)``."""

    def __init__(self, factors: Sequence[MarkedGroup]):
        self.factors = tuple(factors)
        self._owner = _factor_map(self.factors)
        self.generators = tuple(s for f in self.factors for s in f.generators)
        nontrivial = [f for f in self.factors if not (f.is_finite and getattr(f, "order", lambda: 2)() == 1)]
        self.is_finite = len(nontrivial) <= 1 and all(f.is_finite for f in nontrivial)

    def __repr__(self):
        return "FreeProduct(" + ", ".join(map(repr, self.factors)) + ")"

    def identity(self):
        return ()

    def act(self, g, letter):
        i = self._owner[letter[0]]
        f = self.factors[i]
        if g and g[-1][0] == i:
            h = f.act(g[-1][1], letter)
            return g[:-1] if f.is_identity(h) else g[:-1] + ((i, h),)
        h = f.act(f.identity(), letter)
        return g if f.is_identity(h) else g + ((i, h),)

    def to_word(self, g):
        return tuple(x for i, h in g for x in self.factors[i].to_word(h))

    def sort_key(self, g):
        return tuple((i, self.factors[i].sort_key(h)) for i, h in g)

    def relators(self):
        return [r for f in self.factors for r in f.relators()]

    def syllables(self, g) -> list[tuple[int, str]]:
        """Readable syllable list ``[(factor index, element label), ...]``."""
        return [(i, self.factors[i].format(h)) for i, h in g]


class DirectProduct(MarkedGroup):
    """Direct product; normal forms are tuples of factor normal forms."""

    def __init__(self, factors: Sequence[MarkedGroup]):
        self.factors = tuple(factors)
        self._owner = _factor_map(self.factors)
        self.generators = tuple(s for f in self.factors for s in f.generators)
        self.is_finite = all(f.is_finite for f in self.factors)

    def __repr__(self):
        return "DirectProduct(" + ", ".join(map(repr, self.factors)) + ")"

    def identity(self):
        return tuple(f.identity() for f in self.factors)

    def act(self, g, letter):
        i = self._owner[letter[0]]
        return g[:i] + (self.factors[i].act(g[i], letter),) + g[i + 1 :]

    def to_word(self, g):
        return tuple(x for f, h in zip(self.factors, g) for x in f.to_word(h))

    def sort_key(self, g):
        return tuple(f.sort_key(h) for f, h in zip(self.factors, g))

    def relators(self):
        out = [r for f in self.factors for r in f.relators()]
        for (i, f), (j, h) in itertools.combinations(enumerate(self.factors), 2):
            for a in f.generators:
                for b in h.generators:
                    out.append(((a, 1), (b, 1), (a, -1), (b, -1)))
        return out


class OracleGroup(MarkedGroup):
    """User-supplied group: callbacks for identity, right multiplication by a letter, and words."""

    def __init__(
        self,
        generators: Sequence[str],
        identity: NormalForm,
        act: Callable[[NormalForm, Letter], NormalForm],
        to_word: Callable[[NormalForm], Word],
        sort_key: Optional[Callable[[NormalForm], object]] = None,
    ):
        self.generators = tuple(generators)
        self._identity = identity
        self._act = act
        self._to_word = to_word
        self._sort_key = sort_key

    def identity(self):
        return self._identity

    def act(self, g, letter):
        return self._act(g, letter)

    def to_word(self, g):
        return tuple(self._to_word(g))

    def sort_key(self, g):
        return self._sort_key(g) if self._sort_key else repr(g)


# -- configuration --------------------------------------------------------------


def group_from_config(cfg: dict) -> MarkedGroup:
    """Build a group from ``{"kind": "free"|"free_abelian"|"perm"|"cyclic"|"trivial"|"product", ...}``."""
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise ParseError('group config needs a "kind"')
    kind = cfg["kind"]
    try:
        if kind == "free":
            return FreeGroup(cfg.get("generators") or int(cfg.get("rank", 2)))
        if kind == "free_abelian":
            rank = int(cfg.get("rank", len(cfg.get("generators", [])) or 1))
            return FreeAbelianGroup(rank, cfg.get("generators"))
        if kind == "perm":
            return PermutationGroup(int(cfg["degree"]), dict(cfg["generators"]))
        if kind == "cyclic":
            return CyclicGroup(int(cfg["n"]), cfg.get("generator", "a"))
        if kind == "trivial":
            return TrivialGroup()
        if kind == "product":
            factors = [group_from_config(f) for f in cfg["factors"]]
            ptype = cfg.get("type", "free")
            if ptype == "free":
                return FreeProduct(factors)
            if ptype == "direct":
                return DirectProduct(factors)
            raise ParseError(f"unknown product type {ptype!r}")
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad {kind!r} group config: {exc}") from None
    raise ParseError(f"unknown group kind {kind!r}")


# -- Cayley balls and coset partitions ------------------------------------------


@dataclass(frozen=True)
class CayleyBall:
    """Ball of given radius around the identity in ``Cay(G, S)``.

    ``graph`` vertices are the element labels; ``elements[i]`` is the normal
    form of ``graph.vertices[i]`` and ``lengths[i]`` its word length.
    """

    group: MarkedGroup
    radius: int
    graph: FiniteGraph
    elements: tuple
    lengths: tuple

    @cached_property
    def _vertex_of(self) -> dict:
        return {g: v for g, v in zip(self.elements, self.graph.vertices)}

    @property
    def center(self) -> str:
        return self.graph.vertices[0]

    def vertex(self, g: NormalForm) -> str:
        try:
            return self._vertex_of[g]
        except KeyError:
            raise UsageError(f"{self.group.format(g)} is outside the ball") from None

    def element(self, v: str) -> NormalForm:
        return self.elements[self.graph.index(v)]

    def length(self, v: str) -> int:
        return self.lengths[self.graph.index(v)]

    def __contains__(self, g) -> bool:
        return g in self._vertex_of

    def sphere_sizes(self) -> list[int]:
        sizes = [0] * (self.radius + 1)
        for k in self.lengths:
            sizes[k] += 1
        return sizes


def cayley_ball(group: MarkedGroup, radius: int) -> CayleyBall:
    """Breadth-first closure of the identity under right multiplication by ``S`` and ``S^-1``."""
    if radius < 0:
        raise UsageError("radius must be non-negative")
    e = group.identity()
    index = {e: 0}
    order, lengths = [e], [0]
    frontier = [e]
    letters = group.letters()
    for r in range(1, radius + 1):
        nxt = []
        for g in frontier:
            for letter in letters:
                h = group.act(g, letter)
                if h not in index:
                    index[h] = len(order)
                    order.append(h)
                    lengths.append(r)
                    nxt.append(h)
        frontier = nxt
    pairs = []
    for i, g in enumerate(order):
        for name in group.generators:
            h = group.act(g, (name, 1))
            back = group.act(h, (name, -1))
            if back != g:
                raise OracleError(
                    f"oracle inconsistency: ({group.format(g)})*{name}*{name}^-1 != {group.format(g)}"
                )
            j = index.get(h)
            if j is not None and j != i:
                pairs.append((i, j))
    labels = [group.format(g) for g in order]
    if len(set(labels)) != len(labels):
        raise OracleError("distinct normal forms share a label")
    graph = FiniteGraph.from_index_edges(labels, pairs)
    return CayleyBall(group, radius, graph, tuple(order), tuple(lengths))


@dataclass(frozen=True)
class CosetSystem:
    """Partition of a Cayley ball into left cosets ``gP`` of a peripheral subgroup."""

    peripheral: tuple[Word, ...]
    cells: tuple[tuple[str, ...], ...]
    representatives: tuple[str, ...]
    bound: int
    exact: bool
    cell_of: dict = field(compare=False, repr=False)

    def to_json(self) -> dict:
        return {
            "peripheral": [format_word(w) for w in self.peripheral],
            "bound": self.bound,
            "cross_checked": self.exact,
            "cells": [
                {"representative": r, "members": list(c)}
                for r, c in zip(self.representatives, self.cells)
            ],
        }


def _subgroup_ball(group: MarkedGroup, gens: list, bound: int, budget: int) -> set:
    e = group.identity()
    seen = {e}
    frontier = [e]
    steps = gens + [group.inverse(p) for p in gens]
    for _ in range(bound):
        nxt = []
        for g in frontier:
            for p in steps:
                h = group.mul(g, p)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
                    if len(seen) > budget:
                        raise BudgetExceeded(
                            f"peripheral subgroup ball exceeds {budget} elements before radius {bound}"
                        )
        frontier = nxt
        if not frontier:
            break
    return seen


def coset_representatives(
    group: MarkedGroup,
    peripheral_gens: Sequence[WordLike],
    ball: CayleyBall,
    bound: Optional[int] = None,
    budget: int = ENUMERATION_BUDGET,
) -> CosetSystem:
    """Partition ``ball`` into left cosets of ``P = <peripheral_gens>``.

    ``g`` and ``h`` share a cell iff ``g^-1 h`` is a product of at most
    ``bound`` (default ``2 * radius``) peripheral generators.  When the group
    offers exact membership the cells are cross-checked against it and a
    disagreement raises :class:`BudgetExceeded` instead of returning a wrong
    partition.
    """
    words = tuple(group.check_word(parse_word(w)) for w in peripheral_gens)
    gens = [group.evaluate(w) for w in words]
    gens = [p for p in gens if not group.is_identity(p)]
    if bound is None:
        bound = 2 * ball.radius
    sub = _subgroup_ball(group, gens, bound, budget) if gens else {group.identity()}
    verts = ball.graph.vertices
    cell_index: dict[str, int] = {}
    cells: list[list[str]] = []
    for v, g in zip(verts, ball.elements):
        if v in cell_index:
            continue
        members = []
        for p in sub:
            h = group.mul(g, p)
            if h in ball:
                members.append(ball.vertex(h))
        clash = [w for w in members if w in cell_index]
        if clash:
            raise BudgetExceeded(
                f"coset relation not transitive within bound {bound} (at {v} and {clash[0]})"
            )
        k = len(cells)
        for w in members:
            cell_index[w] = k
        cells.append(sorted(members, key=ball.graph.index))
    reps = [min(c, key=lambda w: group.sort_key(ball.element(w))) for c in cells]
    exact = False
    if gens and len(cells) <= 2000:
        rep_elems = [ball.element(r) for r in reps]
        probe = group.is_member(gens, group.identity())
        if probe is not None:
            exact = True
            for (i, a), (j, b) in itertools.combinations(enumerate(rep_elems), 2):
                if group.is_member(gens, group.mul(group.inverse(a), b)):
                    raise BudgetExceeded(
                        f"cells of {reps[i]} and {reps[j]} lie in one coset but are not joined "
                        f"within bound {bound}"
                    )
    elif not gens:
        exact = True
    return CosetSystem(
        peripheral=words,
        cells=tuple(tuple(c) for c in cells),
        representatives=tuple(reps),
        bound=bound,
        exact=exact,
        cell_of=cell_index,
    )


class RenamedGroup(MarkedGroup):
    """The same group with its generators renamed through ``mapping`` (old -> new)."""

    def __init__(self, base: MarkedGroup, mapping: dict[str, str]):
        self.base = base
        self._to_new = {s: mapping.get(s, s) for s in base.generators}
        self._to_old = {v: k for k, v in self._to_new.items()}
        if len(self._to_old) != len(self._to_new):
            raise UsageError("renaming merges two generators")
        self.generators = tuple(self._to_new[s] for s in base.generators)
        self.is_finite = base.is_finite

    def __repr__(self):
        return f"RenamedGroup({self.base!r}, {self._to_new!r})"

    def identity(self):
        return self.base.identity()

    def act(self, g, letter):
        return self.base.act(g, (self._to_old[letter[0]], letter[1]))

    def to_word(self, g):
        return tuple((self._to_new[s], e) for s, e in self.base.to_word(g))

    def mul(self, g, h):
        return self.base.mul(g, h)

    def inverse(self, g):
        return self.base.inverse(g)

    def sort_key(self, g):
        return self.base.sort_key(g)

    def relators(self):
        return [tuple((self._to_new[s], e) for s, e in r) for r in self.base.relators()]

    def order_of(self, g, bound=10_000):
        return self.base.order_of(g, bound)

    def is_member(self, gens, g):
        return self.base.is_member(gens, g)

    def left_coset_transversal(self, gens):
        return self.base.left_coset_transversal(gens)


def enumerate_elements(group: MarkedGroup, budget: int = ENUMERATION_BUDGET) -> list:
    """All elements of a finite group, in breadth-first order from the identity."""
    if isinstance(group, PermutationGroup):
        if group.order() > budget:
            raise BudgetExceeded(f"group order exceeds {budget}")
        return group.elements()
    e = group.identity()
    seen = {e: None}
    queue = deque([e])
    while queue:
        g = queue.popleft()
        for letter in group.letters():
            h = group.act(g, letter)
            if h not in seen:
                if len(seen) >= budget:
                    raise BudgetExceeded(f"{group!r} has more than {budget} elements (or is infinite)")
                seen[h] = None
                queue.append(h)
    return list(seen)


def is_trivial_group(group: MarkedGroup) -> bool:
    return all(group.is_identity(group.evaluate(((s, 1),))) for s in group.generators)
