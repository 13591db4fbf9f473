"""Dehn fillings of free groups along basis letters.

Filling ``F(S)`` by ``s_j^{n_j}`` gives the free product of ``Z/n_j`` (filled
letters) and ``Z`` (the rest).  The filled group is realised as a graph of
groups: a trivial base vertex, one tree edge to a ``Z/n_j`` vertex per filled
letter, and one loop per unfilled letter.  Its finite quotients pulled back to
``F(S)`` give the finite-index subgroups ``H`` meeting each ``<s_j>`` in
exactly ``<s_j^{n_j}>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from ..errors import UsageError, VerificationError
from ..groups import CyclicGroup, FreeGroup, FreeProduct, MarkedGroup, TrivialGroup, cayley_ball
from ..words import format_word
from .core import GogEdge, GraphOfGroups, Presentation, fundamental_presentation
from .quotients import Homomorphism, finite_quotient_avoiding
from .schreier import KernelReport, kernel_subgroup

ORDER_BOUND = 50


@dataclass(frozen=True)
class FillingSpec:
    exponents: Mapping[str, int]
    depth_subgroups: Optional[Mapping[str, list]] = None

    def __post_init__(self):
        for s, n in self.exponents.items():
            if int(n) < 1:
                raise UsageError(f"filling exponent for {s!r} must be at least 1")


@dataclass(frozen=True)
class FilledGroup:
    free: FreeGroup
    spec: FillingSpec
    group: FreeProduct
    gog: GraphOfGroups

    def order(self, letter: str, bound: int = ORDER_BOUND) -> Optional[int]:
        """Order of the image of a basis letter, decided by the free-product normal form."""
        return self.group.order_of(self.group.evaluate(((letter, 1),)), bound)

    def to_json(self) -> dict:
        return {
            "basis": list(self.free.generators),
            "filled": {s: int(n) for s, n in self.spec.exponents.items()},
            "factors": [
                {"generator": f.generators[0], "order": (f.n if isinstance(f, CyclicGroup) else None)}
                for f in self.group.factors
            ],
            "peripheral_orders": {s: self.order(s) for s in self.spec.exponents},
            "presentation": fundamental_presentation(self.gog).to_json(),
        }


def dehn_fill_free(F: FreeGroup, spec: FillingSpec) -> FilledGroup:
    for s in spec.exponents:
        if s not in F.generators:
            raise UsageError(
                f"peripheral {s!r} is not a basis letter; only basis-letter fillings are supported"
            )
    factors: list[MarkedGroup] = []
    vertices: dict[str, MarkedGroup] = {"o": TrivialGroup()}
    edges = []
    for s in F.generators:
        if s in spec.exponents:
            C = CyclicGroup(int(spec.exponents[s]), s)
            factors.append(C)
            vertices[f"v_{s}"] = C
            edges.append(GogEdge(f"e_{s}", "o", f"v_{s}"))
        else:
            factors.append(FreeGroup([s]))
    for s in F.generators:
        if s not in spec.exponents:
            edges.append(GogEdge(s, "o", "o"))
    return FilledGroup(F, spec, FreeProduct(factors), GraphOfGroups(vertices, edges))


@dataclass(frozen=True)
class FillingSubgroup:
    homomorphism: Homomorphism
    kernel: KernelReport
    checked_elements: int
    checked_conjugates: int

    def to_json(self) -> dict:
        return {
            "quotient": self.homomorphism.to_json(),
            "kernel": self.kernel.to_json(),
            "intersection_check": {
                "ball_radius": 6,
                "peripheral_elements_checked": self.checked_elements,
                "conjugates_checked": self.checked_conjugates,
                "holds": True,
            },
        }


def filling_subgroup(filled: FilledGroup, seed: int = 0, radius: int = 6, conjugator_radius: int = 2) -> FillingSubgroup:
    """Finite-index ``H <= F`` with ``H`` meeting each conjugate of ``<s_j>`` in the conjugate of ``<s_j^{n_j}>``.

    ``H`` is the kernel of ``F -> filled group -> Q`` for a finite quotient
    ``Q`` in which no power ``s_j^k`` with ``0 < k < n_j`` dies.  The
    intersection property is checked on every power of ``s_j`` in the
    radius-``radius`` ball and on its conjugates by the radius-``conjugator_radius`` ball.
    """
    forbidden = [((s, 1),) * k for s, n in filled.spec.exponents.items() for k in range(1, int(n))]
    quotient = finite_quotient_avoiding(filled.gog, forbidden, seed=seed)
    pres_F = Presentation(tuple(filled.free.generators), ())
    hom = Homomorphism(pres_F, quotient.degree, dict(quotient.images), method=quotient.method)
    kernel = kernel_subgroup(pres_F, hom)
    F = filled.free
    ball = cayley_ball(F, radius)
    conj = cayley_ball(F, conjugator_radius).elements
    checked = conjugates = 0
    for s, n in filled.spec.exponents.items():
        n = int(n)
        for g in ball.elements:
            if not g or any(x[0] != s for x in g) or len({x[1] for x in g}) != 1:
                continue
            k = len(g) * g[0][1]
            checked += 1
            for c in conj:
                w = F.mul(F.mul(c, g), F.inverse(c))
                conjugates += 1
                if hom.is_trivial_on(w) != (k % n == 0):
                    raise VerificationError(
                        f"H meets the conjugate by {format_word(c)} of <{s}> wrongly at {s}^{k}"
                    )
    return FillingSubgroup(hom, kernel, checked, conjugates)
