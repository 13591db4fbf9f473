"""The acceptance suite: nine criteria, each reported as one pass/fail line.

Shared by ``cuspkit verify-all`` and ``tests/test_acceptance.py``.  Reports
carry tolerances next to the measured values.  Wall-clock times go to the
printed lines only, so that the JSON report is byte-stable.
"""

from __future__ import annotations

import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, TextIO

from .cusped import build_cusped
from .decomposition import brute_force_oracle, combined_tree
from .errors import CuspkitError
from .graph import (
    all_pairs_distances,
    block_chain,
    complete_graph,
    cycle_graph,
    path_graph,
    random_connected_graph,
    star_graph,
    theta_graph,
    wheel_graph,
)
from .groups import CyclicGroup, FreeAbelianGroup, FreeGroup, cayley_ball
from .horoball import build_horoball, ceil_log2, verify_distance_formulas
from .metrics import delta_four_point, format_rational
from .qi import HeightSchedule, builtin_map, embed_in_half_space, extend_to_horoball, measure_qi

HOROBALL_SEED = 20240601
DECOMPOSITION_SEED = 8
ASYMPTOTIC_TOLERANCE = 6
QI_SLACK = 8
HALF_SPACE_TOLERANCE = 3
CUSPED_DEPTH = 4


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number}: {self.name} ({self.seconds:.1f}s)"

    def to_json(self) -> dict:
        return {"criterion": self.number, "name": self.name, "passed": self.passed, "details": self.details}


def _pool_map(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


# -- 1 and 2: horoballs ----------------------------------------------------------


def horoball_suite():
    rng = random.Random(HOROBALL_SEED)
    graphs = []
    for k in range(50):
        n = rng.randint(2, 40)
        graphs.append((f"random{k}", random_connected_graph(n, rng.choice([0.0, 0.05, 0.1, 0.2]), rng)))
    graphs += [(f"P{n}", path_graph(n)) for n in (2, 5, 9, 17, 33)]
    graphs += [(f"C{n}", cycle_graph(n)) for n in (3, 8, 16, 31)]
    graphs += [(f"star{k}", star_graph(k)) for k in (3, 10)]
    return graphs


_horoball_cache: dict = {}


def _horoball_reports(threads: int):
    if "reports" not in _horoball_cache:
        suite = horoball_suite()

        def run(item):
            name, g = item
            diam = int(all_pairs_distances(g).diameter())
            return name, verify_distance_formulas(g, ceil_log2(diam) + 2)

        _horoball_cache["reports"] = _pool_map(run, suite, threads)
    return _horoball_cache["reports"]


def criterion_1(threads: int = 1) -> CriterionResult:
    t = time.perf_counter()
    reports = _horoball_reports(threads)
    elapsed = time.perf_counter() - t
    bad = [(n, r.first_mismatch) for n, r in reports if r.mismatches]
    ok = not bad and elapsed <= 60
    return CriterionResult(1, "horoball closed form equals BFS distance", ok, {
        "graphs": len(reports),
        "pairs_checked": sum(r.pairs_checked for _, r in reports),
        "mismatches": sum(r.mismatches for _, r in reports),
        "failing_graphs": [n for n, _ in bad],
        "runtime_limit_s": 60,
        "within_runtime": elapsed <= 60,
    }, elapsed)


def criterion_2(threads: int = 1) -> CriterionResult:
    t = time.perf_counter()
    reports = _horoball_reports(threads)
    gap = max(r.max_asymptotic_gap for _, r in reports)
    return CriterionResult(2, "horoball asymptotic form within tolerance", gap <= ASYMPTOTIC_TOLERANCE, {
        "max_gap": round(gap, 12),
        "tolerance": ASYMPTOTIC_TOLERANCE,
    }, time.perf_counter() - t)


# -- 3: hyperbolicity sanity --------------------------------------------------------


def criterion_3(threads: int = 1) -> CriterionResult:
    t = time.perf_counter()

    def delta(g):
        return delta_four_point(g, max_vertices=g.n).delta

    free = {r: delta(cayley_ball(FreeGroup(2), r).graph) for r in (2, 3, 4, 5)}
    c4 = delta(cycle_graph(4))
    Z2 = FreeAbelianGroup(2)
    radii = (4, 6, 8)
    flat = {r: delta(cayley_ball(Z2, r).graph) for r in radii}
    cusped = {}
    for r in radii:
        space = build_cusped(Z2, [["x", "y"]], r, CUSPED_DEPTH)
        cusped[r] = delta_four_point(space.graph, max_vertices=space.graph.n, distances=space.distances).delta
    checks = {
        "free_group_delta_zero": all(d == 0 for d in free.values()),
        "c4_delta_one": c4 == 1,
        "z2_strictly_increasing": all(flat[a] < flat[b] for a, b in zip(radii, radii[1:])),
        "cusped_z2_spread_at_most_one": max(cusped.values()) - min(cusped.values()) <= 1,
    }

    def fmt(d):
        return {str(k): format_rational(v) for k, v in d.items()}

    return CriterionResult(3, "four-point delta sanity", all(checks.values()), {
        "free_group": fmt(free),
        "c4": format_rational(c4),
        "z2_balls": fmt(flat),
        "cusped_z2": fmt(cusped),
        "cusped_depth": CUSPED_DEPTH,
        "checks": checks,
    }, time.perf_counter() - t)


# -- 4 and 5: quasi-isometries ---------------------------------------------------------


QI_CASES = (("identity", 1, 5, 5), ("shift", 5, 5, 10), ("scale", 2, 5, 10))


def criterion_4(threads: int = 1) -> CriterionResult:
    t = time.perf_counter()
    Z = FreeAbelianGroup(1)
    rows, ok = [], True
    for name, k, r_src, r_dst in QI_CASES:
        X, Y = cayley_ball(Z, r_src), cayley_ball(Z, r_dst)
        f = builtin_map(name, Z, k)
        fmap = {v: Y.vertex(f(X.element(v))) for v in X.graph.vertices}
        base = measure_qi(fmap, all_pairs_distances(X.graph), all_pairs_distances(Y.graph))
        depth = ceil_log2(2 * r_dst) + 1
        ext = extend_to_horoball(fmap, build_horoball(X.graph, depth), build_horoball(Y.graph, depth)).certificate
        good = (
            ext.lam == base.lam
            and ext.c <= base.c + QI_SLACK
            and ext.violations == 0
            and base.violations == 0
        )
        ok &= good
        rows.append({"map": name, "k": k, "depth": depth, "base": base.to_json(),
                     "extension": ext.to_json(), "passed": good})
    return CriterionResult(4, "horoball extension keeps lambda, c within slack", ok,
                           {"slack": QI_SLACK, "cases": rows}, time.perf_counter() - t)


def criterion_5(threads: int = 1) -> CriterionResult:
    t = time.perf_counter()
    rows, worst = [], 0.0
    for kind in ("constant", "alternating"):
        for depth in range(1, 7):
            for n in (1, 5, 9):
                sched = HeightSchedule.constant(depth) if kind == "constant" else HeightSchedule.alternating(depth, 2.0)
                H = build_horoball(path_graph(n), depth)
                _, rep = embed_in_half_space({str(i): [float(i)] for i in range(n)}, sched, H)
                g = max(rep.max_gap_vertical, rep.max_gap_level)
                worst = max(worst, g)
                rows.append({"schedule": kind, "depth": depth, "base_vertices": n,
                             "max_gap_vertical": round(rep.max_gap_vertical, 12),
                             "max_gap_same_level": round(rep.max_gap_level, 12)})
    return CriterionResult(5, "half-space embedding gap within tolerance", worst <= HALF_SPACE_TOLERANCE, {
        "tolerance": HALF_SPACE_TOLERANCE,
        "max_gap": round(worst, 12),
        "cases": rows,
    }, time.perf_counter() - t)


# -- 6 and 7: graphs of groups ---------------------------------------------------------


def _z2_z3():
    from .gog import GogEdge, GraphOfGroups

    return GraphOfGroups({"A": CyclicGroup(2, "a"), "B": CyclicGroup(3, "b")}, [GogEdge("e", "A", "B")])


def criterion_6(threads: int = 1) -> CriterionResult:
    from .gog import GogEdge, GraphOfGroups, finite_quotient_avoiding, fundamental_presentation, homomorphism_from_json, kernel_subgroup
    from .groups import TrivialGroup

    t = time.perf_counter()
    g = _z2_z3()
    P = fundamental_presentation(g)
    k1 = kernel_subgroup(P, homomorphism_from_json(P, {"cyclic": 6, "images": {"a": 3, "b": 2}}))
    # Euler characteristic: 6 * (1/2 + 1/3 - 1) = -1, so a free kernel of index 6 has rank 2
    chi = 6 * (Fraction(1, 2) + Fraction(1, 3) - 1)
    free2 = GraphOfGroups({"o": TrivialGroup()}, [GogEdge("a", "o", "o"), GogEdge("b", "o", "o")])
    P2 = fundamental_presentation(free2)
    k2 = kernel_subgroup(P2, homomorphism_from_json(P2, {"cyclic": 2, "images": {"a": 1, "b": 0}}))
    forbidden = ["a", "b", "b^2"]
    q1 = finite_quotient_avoiding(g, forbidden, seed=0)
    q2 = finite_quotient_avoiding(g, forbidden, seed=0)
    avoids = all(not q1.is_trivial_on(w) for w in forbidden)
    checks = {
        "z2_z3_kernel_index_6": k1.index == 6,
        "z2_z3_kernel_rank_matches_euler_characteristic": k1.free_rank == 1 - chi,
        "f2_kernel_rank_matches_nielsen_schreier": k2.free_rank == 1 + k2.index * (2 - 1),
        "f2_kernel_rank_3": k2.free_rank == 3,
        "finite_quotient_avoids_forbidden": avoids,
        "finite_quotient_deterministic": q1.to_json() == q2.to_json(),
    }
    return CriterionResult(6, "graph-of-groups kernels and finite quotients", all(checks.values()), {
        "z2_z3_kernel": {"index": k1.index, "free_rank": k1.free_rank},
        "f2_kernel": {"index": k2.index, "free_rank": k2.free_rank},
        "finite_quotient": q1.to_json(),
        "checks": checks,
    }, time.perf_counter() - t)


def criterion_7(threads: int = 1) -> CriterionResult:
    from .gog import FillingSpec, dehn_fill_free, filling_subgroup

    t = time.perf_counter()
    rows, ok = [], True
    F = FreeGroup(["a", "b"])
    for n in range(2, 7):
        filled = dehn_fill_free(F, FillingSpec({"a": n}))
        order = filled.order("a")
        try:
            sub = filling_subgroup(filled, seed=0, radius=6)
            holds = True
            extra = {"quotient_degree": sub.homomorphism.degree, "kernel_index": sub.kernel.index,
                     "conjugates_checked": sub.checked_conjugates}
        except CuspkitError as exc:
            holds, extra = False, {"error": str(exc)}
        good = order == n and holds
        ok &= good
        rows.append({"n": n, "order_of_a": order, "intersection_holds": holds, **extra})
    return CriterionResult(7, "Dehn filling of F(a,b) by a^n", ok, {"cases": rows}, time.perf_counter() - t)


# -- 8: decomposition trees ---------------------------------------------------------


def decomposition_suite():
    rng = random.Random(DECOMPOSITION_SEED)
    graphs = []
    for k in range(500):
        n = rng.randint(3, 8)
        graphs.append((f"random{k}", random_connected_graph(n, rng.choice([0.1, 0.25, 0.4, 0.6]), rng)))
    graphs += [(f"C{n}", cycle_graph(n)) for n in range(5, 11)]
    graphs += [("K4", complete_graph(4)), ("K5", complete_graph(5)), ("W5", wheel_graph(5)), ("W6", wheel_graph(6))]
    graphs += [("theta3x2", theta_graph(3, 2)), ("theta4x3", theta_graph(4, 3)), ("theta5x2", theta_graph(5, 2))]
    graphs += [("chain3-4-2-5", block_chain([3, 4, 2, 5])), ("chain2-3-2-4", block_chain([2, 3, 2, 4]))]
    return graphs


def criterion_8(threads: int = 1) -> CriterionResult:
    t = time.perf_counter()

    def run(item):
        name, g = item
        try:
            fast, slow = combined_tree(g), brute_force_oracle(g)
        except CuspkitError as exc:
            return name, False, str(exc)
        return name, fast.signature() == slow.signature() and fast.is_tree() and slow.is_tree(), None

    out = _pool_map(run, decomposition_suite(), threads)
    elapsed = time.perf_counter() - t
    bad = [n for n, good, _ in out if not good]
    return CriterionResult(8, "decomposition tree equals brute-force oracle", not bad and elapsed <= 120, {
        "graphs": len(out),
        "disagreements": bad,
        "runtime_limit_s": 120,
        "within_runtime": elapsed <= 120,
    }, elapsed)


# -- 9: CLI determinism ------------------------------------------------------------------


def criterion_9(threads: int = 1) -> CriterionResult:
    """Each demo config is run in two fresh interpreters with different string-hash seeds."""
    import os
    import subprocess
    import tempfile
    from pathlib import Path

    from .demos import write_demo_configs

    t = time.perf_counter()
    rows, ok = [], True
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        jobs = []
        for sub, argv in write_demo_configs(tmp / "configs"):
            for k in range(2):
                out = tmp / f"{sub}.{k}.out"
                env = dict(os.environ, PYTHONHASHSEED=str(k + 1))
                jobs.append((sub, out, [sys.executable, "-m", "cuspkit", sub, *argv, "--out", str(out)], env))

        def launch(job):
            sub, out, cmd, env = job
            proc = subprocess.run(cmd, env=env, capture_output=True, check=False)
            return proc.returncode, out.read_bytes() if out.exists() else None

        results = _pool_map(launch, jobs, threads)
        for (sub, *_), first, second in zip(jobs[::2], results[::2], results[1::2]):
            codes = [first[0], second[0]]
            same = first[1] is not None and first[1] == second[1] and codes == [0, 0]
            ok &= same
            rows.append({"subcommand": sub, "exit_codes": codes, "identical": same})
    return CriterionResult(9, "CLI subcommands are byte-deterministic", ok, {"runs": rows}, time.perf_counter() - t)


CRITERIA: dict[int, Callable[..., CriterionResult]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
}


def run_acceptance(
    criteria: Optional[Sequence[int]] = None,
    threads: int = 1,
    stream: Optional[TextIO] = None,
) -> list[CriterionResult]:
    """Run the selected criteria (all by default), printing one line each to ``stream``."""
    stream = stream if stream is not None else sys.stderr
    results = []
    for k in criteria or sorted(CRITERIA):
        t = time.perf_counter()
        try:
            res = CRITERIA[k](threads)
        except CuspkitError as exc:
            res = CriterionResult(k, CRITERIA[k].__name__, False, {"error": f"{type(exc).__name__}: {exc}"},
                                  time.perf_counter() - t)
        results.append(res)
        print(res.line(), file=stream, flush=True)
    return results
