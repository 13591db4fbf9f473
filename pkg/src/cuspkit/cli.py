"""Command-line front end.

Every subcommand reads a JSON config (``--config``) and/or a JSON graph
(``--graph``), writes one JSON report (or DOT with ``--format dot``) to
``--out`` or stdout, and exits with 0 (success), 1 (a verification failed),
2 (usage or parse error) or 3 (a resource budget ran out).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import __version__
from .errors import CuspkitError, ParseError, UsageError
from .graph import FiniteGraph, graph_from_json, graph_from_spec, graph_to_dot, graph_to_json, loads_json

THREADS_ENV = "CUSPKIT_THREADS"


class Run:
    """Parsed arguments plus the loaded config, with typed accessors."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config: dict = {}
        if args.config:
            cfg = loads_json(_read(args.config), args.config)
            if not isinstance(cfg, dict):
                raise ParseError(f"{args.config}: config must be a JSON object")
            self.config = cfg
        self._graph = None
        if args.graph:
            self._graph = graph_from_json(loads_json(_read(args.graph), args.graph))

    @property
    def format(self) -> str:
        return self.args.format

    def get(self, key: str, default=None):
        return self.config.get(key, default)

    def require(self, key: str):
        if key not in self.config:
            raise UsageError(f"config is missing {key!r}")
        return self.config[key]

    def integer(self, key: str, default=None) -> int:
        v = self.config.get(key, default)
        if v is None:
            raise UsageError(f"config is missing {key!r}")
        if isinstance(v, bool) or not isinstance(v, int):
            raise UsageError(f"{key!r} must be an integer")
        return v

    def seed(self, required: bool) -> Optional[int]:
        s = self.args.seed if self.args.seed is not None else self.config.get("seed")
        if s is None and required:
            raise UsageError("this mode is randomized: pass --seed or set \"seed\" in the config")
        return s

    def graph(self, key: str = "graph") -> FiniteGraph:
        if self._graph is not None and key == "graph":
            return self._graph
        if key not in self.config:
            raise UsageError(f"no input graph: pass --graph or set {key!r} in the config")
        return graph_from_spec(self.config[key])

    def group(self, key: str = "group"):
        from .groups import group_from_config

        return group_from_config(self.require(key))


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


class Output:
    """What a subcommand produced: a JSON report, optionally a DOT rendering, and an exit status."""

    def __init__(self, report: dict, dot: Optional[str] = None, status: int = 0):
        self.report, self.dot, self.status = report, dot, status


COMMANDS: dict[str, tuple[Callable[[Run], Output], str]] = {}


def command(name: str, help: str):
    def deco(fn):
        COMMANDS[name] = (fn, help)
        return fn

    return deco


# -- groups, horoballs, cusped spaces -------------------------------------------------


@command("cayley", "ball in a Cayley graph")
def cmd_cayley(run: Run) -> Output:
    from .groups import cayley_ball

    ball = cayley_ball(run.group(), run.integer("radius"))
    report = {"radius": ball.radius, "sphere_sizes": ball.sphere_sizes(), "graph": graph_to_json(ball.graph)}
    return Output(report, graph_to_dot(ball.graph, "cayley"))


@command("coset", "partition of a Cayley ball into peripheral cosets")
def cmd_coset(run: Run) -> Output:
    from .groups import cayley_ball, coset_representatives

    group = run.group()
    ball = cayley_ball(group, run.integer("radius"))
    cs = coset_representatives(group, run.require("peripheral"), ball, bound=run.get("bound"))
    return Output({"radius": ball.radius, **cs.to_json()})


def _depth(run: Run) -> int:
    d = run.integer("depth")
    if d < 0:
        raise UsageError("depth must be non-negative")
    return d


@command("horoball", "combinatorial horoball over a graph")
def cmd_horoball(run: Run) -> Output:
    from .horoball import build_horoball, horoball_key

    hb = build_horoball(run.graph(), _depth(run))
    return Output(hb.to_json(), graph_to_dot(hb.graph, "horoball", key=horoball_key))


@command("horodist", "horoball distances: closed form, BFS and asymptotic form")
def cmd_horodist(run: Run) -> Output:
    from .horoball import build_horoball, horoball_distance_asymptotic

    hb = build_horoball(run.graph(), _depth(run))
    rows = []
    for item in run.require("pairs"):
        try:
            x, m, y, n = item
        except (TypeError, ValueError):
            raise ParseError(f"pair {item!r} is not [x, m, y, n]") from None
        u, v = hb.vertex(str(x), int(m)), hb.vertex(str(y), int(n))
        d = hb.base_distances(u[0], v[0])
        rows.append({
            "from": [u[0], u[1]],
            "to": [v[0], v[1]],
            "base_distance": d,
            "closed_form": hb.closed_form(u, v),
            "bfs": int(hb.distances(u, v)),
            "asymptotic": round(horoball_distance_asymptotic(u[0], u[1], v[0], v[1], d), 12),
        })
    bad = sum(r["closed_form"] != r["bfs"] for r in rows)
    return Output({"depth": hb.depth, "pairs": rows, "mismatches": bad}, status=1 if bad else 0)


@command("horoverify", "closed-form horoball distances checked against BFS on all pairs")
def cmd_horoverify(run: Run) -> Output:
    from .horoball import verify_distance_formulas

    rep = verify_distance_formulas(run.graph(), _depth(run))
    return Output(rep.to_json(), status=1 if rep.mismatches else 0)


def _cusped(cfg: dict):
    from .cusped import build_cusped
    from .groups import group_from_config

    try:
        group, peri, radius, depth = cfg["group"], cfg["peripherals"], cfg["radius"], cfg["depth"]
    except KeyError as exc:
        raise UsageError(f"cusped-space config is missing {exc.args[0]!r}") from None
    return build_cusped(group_from_config(group), peri, int(radius), int(depth), coset_bound=cfg.get("coset_bound"))


@command("cusped", "truncated cusped space")
def cmd_cusped(run: Run) -> Output:
    space = _cusped(run.config)
    report = space.to_json() if run.get("full", False) else {"summary": space.summary(),
                                                              "cosets": [c.to_json() for c in space.cosets]}
    return Output(report, space.to_dot())


# -- metrics --------------------------------------------------------------------------


def _metric_space(run: Run):
    """The graph to measure: ``--graph``/``graph``, or a ``cusped`` or ``cayley`` block."""
    if run._graph is not None or "graph" in run.config:
        g = run.graph()
        return g, None
    if "cusped" in run.config:
        space = _cusped(run.config["cusped"])
        return space.graph, space
    if "cayley" in run.config:
        from .groups import cayley_ball, group_from_config

        cfg = run.config["cayley"]
        return cayley_ball(group_from_config(cfg["group"]), int(cfg["radius"])).graph, None
    raise UsageError("no input: pass --graph or set one of 'graph', 'cusped', 'cayley'")


@command("delta", "four-point hyperbolicity constant")
def cmd_delta(run: Run) -> Output:
    from .cusped import vertex_name
    from .metrics import EXHAUSTIVE_LIMIT, delta_four_point

    g, space = _metric_space(run)
    mode = run.get("mode", "exhaustive")
    seed = run.seed(required=(mode == "sampled"))
    rep = delta_four_point(
        g,
        mode=mode,
        seed=seed,
        samples=run.integer("samples", 100_000),
        max_vertices=run.integer("max_vertices", EXHAUSTIVE_LIMIT),
        distances=space.distances if space is not None else None,
    )
    out = rep.to_json()
    if space is not None and rep.witness is not None:
        out["witness"] = [vertex_name(v) for v in rep.witness]
    return Output(out)


@command("crossratio", "cross-ratios of vertex quadruples and visual values")
def cmd_crossratio(run: Run) -> Output:
    from .graph import all_pairs_distances
    from .metrics import DegenerateConfiguration, cross_ratio, format_rational, visual_values

    g = run.graph()
    D = all_pairs_distances(g)
    rows = []
    for quad in run.require("quadruples"):
        if not isinstance(quad, list) or len(quad) != 4:
            raise ParseError(f"quadruple {quad!r} needs four vertices")
        quad = [str(q) for q in quad]
        try:
            val = format_rational(cross_ratio(D, *quad))
        except DegenerateConfiguration as exc:
            val = None
            rows.append({"quadruple": quad, "cross_ratio": val, "degenerate": str(exc)})
            continue
        rows.append({"quadruple": quad, "cross_ratio": val})
    out = {"cross_ratios": rows}
    vis = run.get("visual")
    if vis is not None:
        sample = [str(v) for v in vis.get("sample", list(g.vertices))]
        out["visual"] = visual_values(D, str(vis["basepoint"]), sample, float(vis.get("epsilon", 0.5))).to_json()
    return Output(out)


# -- quasi-isometries -----------------------------------------------------------------


def _group_map(run: Run, group):
    from .qi import builtin_map

    return builtin_map(run.get("map", "identity"), group, run.integer("k", 1))


@command("qi-measure", "quasi-isometry constants of a map")
def cmd_qi_measure(run: Run) -> Output:
    from .graph import all_pairs_distances
    from .groups import cayley_ball
    from .qi import measure_qi

    if "group" in run.config:
        group = run.group()
        X = cayley_ball(group, run.integer("radius"))
        Y = cayley_ball(group, run.integer("target_radius", run.get("radius")))
        phi = _group_map(run, group)
        mapping = {v: Y.vertex(phi(X.element(v))) for v in X.graph.vertices}
        src, dst = X.graph, Y.graph
    else:
        src, dst = run.graph("source"), run.graph("target")
        raw = run.require("mapping")
        mapping = {str(k): str(v) for k, v in raw.items()}
        for k, v in mapping.items():
            if k not in src or v not in dst:
                raise UsageError(f"mapping entry {k!r} -> {v!r} is not between the two graphs")
    cert = measure_qi(mapping, all_pairs_distances(src), all_pairs_distances(dst))
    return Output({"certificate": cert.to_json()}, status=0 if cert.verified else 1)


@command("qi-extend", "extend a group map over horoballs or a cusped space")
def cmd_qi_extend(run: Run) -> Output:
    from .graph import all_pairs_distances
    from .groups import cayley_ball
    from .horoball import build_horoball
    from .qi import extend_to_cusped, extend_to_horoball, measure_qi

    group = run.group()
    phi = _group_map(run, group)
    target = run.integer("target_radius", run.get("radius"))
    if run.get("space", "horoball") == "horoball":
        X, Y = cayley_ball(group, run.integer("radius")), cayley_ball(group, target)
        fmap = {v: Y.vertex(phi(X.element(v))) for v in X.graph.vertices}
        base = measure_qi(fmap, all_pairs_distances(X.graph), all_pairs_distances(Y.graph))
        d = _depth(run)
        ext = extend_to_horoball(fmap, build_horoball(X.graph, d), build_horoball(Y.graph, d))
        report = {"space": "horoball", "depth": d, "base": base.to_json(), "extension": ext.certificate.to_json()}
    else:
        from .cusped import build_cusped

        peri = run.require("peripherals")
        G = build_cusped(group, peri, run.integer("radius"), _depth(run))
        H = build_cusped(group, peri, target, _depth(run))
        ext = extend_to_cusped(phi, G, H)
        report = {"space": "cusped", "depth": G.depth, "extension": ext.certificate.to_json()}
    return Output(report, status=0 if ext.certificate.verified else 1)


@command("qi-halfspace", "horoball embedded in the upper half-space")
def cmd_qi_halfspace(run: Run) -> Output:
    from .horoball import build_horoball
    from .qi import HeightSchedule, embed_in_half_space

    g = run.graph()
    depth = _depth(run)
    coords = run.get("coordinates")
    if coords is None:
        coords = {v: [float(i)] for i, v in enumerate(g.vertices)}
    else:
        coords = {str(k): [float(t) for t in (v if isinstance(v, list) else [v])] for k, v in coords.items()}
    sched = run.get("schedule", {"kind": "constant"})
    kind = sched.get("kind", "constant")
    if kind == "constant":
        schedule = HeightSchedule.constant(depth, float(sched.get("value", 1.0)))
    elif kind == "alternating":
        schedule = HeightSchedule.alternating(depth, float(sched.get("bound", 2.0)))
    elif kind == "explicit":
        schedule = HeightSchedule(tuple(float(y) for y in sched["values"]), float(sched["bound"]))
    else:
        raise UsageError(f"unknown schedule kind {kind!r}")
    _, rep = embed_in_half_space(coords, schedule, build_horoball(g, depth))
    return Output({"depth": depth, "schedule": list(schedule.values), **rep.to_json()})


# -- graphs of groups -----------------------------------------------------------------


def _gog(run: Run):
    from .gog import GraphOfGroups

    return GraphOfGroups.from_json(run.require("gog"))


@command("gog-present", "presentation and normal forms of a fundamental group")
def cmd_gog_present(run: Run) -> Output:
    from .gog import fundamental_presentation, free_product_normal_form, graph_of_groups_to_json

    gog = _gog(run)
    tree = run.get("spanning_tree")
    pres = fundamental_presentation(gog, tree)
    out = {"graph_of_groups": graph_of_groups_to_json(gog), "presentation": pres.to_json()}
    words = run.get("normal_forms", [])
    if words:
        if not gog.has_trivial_edge_groups():
            raise UsageError("normal forms are only computed for trivial edge groups")
        out["normal_forms"] = {
            w: [[a, b] for a, b in free_product_normal_form(gog, w, tree)] for w in words
        }
    return Output(out)


@command("gog-quotient", "quotient by normal subgroups of the vertex groups")
def cmd_gog_quotient(run: Run) -> Output:
    from .gog import fundamental_presentation, graph_of_groups_to_json, quotient_by_vertex_subgroups

    q = quotient_by_vertex_subgroups(_gog(run), run.require("normal"))
    return Output({"graph_of_groups": graph_of_groups_to_json(q), "presentation": fundamental_presentation(q).to_json()})


@command("gog-quotient-finite", "finite quotient in which the forbidden elements survive")
def cmd_gog_quotient_finite(run: Run) -> Output:
    from .gog import finite_quotient_avoiding

    seed = run.seed(required=False) or 0
    hom = finite_quotient_avoiding(_gog(run), run.get("forbidden", []), seed=seed,
                                   trials=run.integer("trials", 100_000))
    return Output({"seed": seed, "quotient": hom.to_json()})


@command("gog-kernel", "kernel of a map onto a finite group (Reidemeister-Schreier)")
def cmd_gog_kernel(run: Run) -> Output:
    from .gog import fundamental_presentation, homomorphism_from_json, kernel_subgroup

    pres = fundamental_presentation(_gog(run))
    hom = homomorphism_from_json(pres, run.require("homomorphism"))
    hom.verify()
    rep = kernel_subgroup(pres, hom)
    return Output({"presentation": pres.to_json(), "homomorphism": hom.to_json(), "kernel": rep.to_json()})


@command("gog-fill", "Dehn filling of a free group along basis letters")
def cmd_gog_fill(run: Run) -> Output:
    from .gog import FillingSpec, dehn_fill_free, filling_subgroup
    from .groups import FreeGroup

    gens = run.get("generators") or run.integer("rank", 2)
    filled = dehn_fill_free(FreeGroup(gens), FillingSpec({str(k): int(v) for k, v in run.require("exponents").items()}))
    out = {"filled": filled.to_json()}
    if run.get("subgroup", True):
        seed = run.seed(required=False) or 0
        out["seed"] = seed
        out["subgroup"] = filling_subgroup(filled, seed=seed, radius=run.integer("radius", 6)).to_json()
    return Output(out)


@command("gog-tree", "ball in the Bass-Serre tree")
def cmd_gog_tree(run: Run) -> Output:
    from .gog import bass_serre_ball

    ball = bass_serre_ball(_gog(run), run.integer("radius"), run.get("root"))
    return Output(ball.to_json(), ball.to_dot())


# -- decompositions -------------------------------------------------------------------


@command("decompose", "cut-point / cut-pair decomposition tree (fast path)")
def cmd_decompose(run: Run) -> Output:
    from .decomposition import combined_tree, r_classes

    g = run.graph()
    tree = combined_tree(g)
    return Output({"r_classes": r_classes(g).to_json(), "tree": tree.to_json()}, tree.to_dot())


@command("decompose-oracle", "decomposition tree from the definitions (small graphs)")
def cmd_decompose_oracle(run: Run) -> Output:
    from .decomposition import brute_force_oracle, combined_tree

    g = run.graph()
    tree = brute_force_oracle(g)
    out = {"tree": tree.to_json()}
    if run.get("compare", True):
        same = combined_tree(g).signature() == tree.signature()
        out["matches_fast_path"] = same
        return Output(out, tree.to_dot(), status=0 if same else 1)
    return Output(out, tree.to_dot())


# -- acceptance -----------------------------------------------------------------------


@command("verify-all", "run the acceptance suite")
def cmd_verify_all(run: Run) -> Output:
    from .acceptance import CRITERIA, run_acceptance

    picked = run.args.criteria or run.get("criteria")
    if picked:
        try:
            picked = [int(k) for k in (picked.split(",") if isinstance(picked, str) else picked)]
        except ValueError:
            raise UsageError("criteria must be integers") from None
        unknown = [k for k in picked if k not in CRITERIA]
        if unknown:
            raise UsageError(f"unknown criteria {unknown}")
    results = run_acceptance(picked, threads=run.args.threads)
    ok = all(r.passed for r in results)
    return Output({"passed": ok, "criteria": [r.to_json() for r in results]}, status=0 if ok else 1)


# -- entry point ----------------------------------------------------------------------


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cuspkit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"cuspkit {__version__}")
    subs = p.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_) in COMMANDS.items():
        s = subs.add_parser(name, help=help_)
        s.add_argument("--config", help="JSON config file")
        s.add_argument("--graph", help="JSON graph file {vertices, edges}")
        s.add_argument("--out", help="output file (default: stdout)")
        s.add_argument("--format", choices=("json", "dot"), default="json")
        s.add_argument("--seed", type=int, help="seed for randomized modes")
        s.add_argument("--threads", type=int, default=_default_threads(),
                       help=f"worker threads (default: ${THREADS_ENV} or 1)")
        if name == "verify-all":
            s.add_argument("--criteria", help="comma-separated subset, e.g. 1,2,8")
    return p


def _render(out: Output, fmt: str, name: str) -> str:
    if fmt == "dot":
        if out.dot is None:
            raise UsageError(f"{name} has no DOT output")
        return out.dot
    return json.dumps(out.report, indent=2, ensure_ascii=False) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fn, _ = COMMANDS[args.command]
    try:
        run = Run(args)
        out = fn(run)
        text = _render(out, args.format, args.command)
    except CuspkitError as exc:
        print(f"cuspkit {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except RecursionError:
        print(f"cuspkit {args.command}: input too large", file=sys.stderr)
        return 3
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if out.status == 1 and args.command != "verify-all":
        print(f"cuspkit {args.command}: verification failed (see report)", file=sys.stderr)
    return out.status


if __name__ == "__main__":
    sys.exit(main())
