"""Small ready-made configs, one per CLI subcommand.

They double as worked examples (``configs/`` in the repository is generated
from them) and as the inputs of the CLI determinism check.
"""

from __future__ import annotations

import json
from pathlib import Path

Z = {"kind": "free_abelian", "rank": 1}
Z2 = {"kind": "free_abelian", "rank": 2}
F2 = {"kind": "free", "rank": 2}
Z2_Z3 = {
    "vertices": [
        {"name": "A", "group": {"kind": "cyclic", "n": 2, "generator": "a"}},
        {"name": "B", "group": {"kind": "cyclic", "n": 3, "generator": "b"}},
    ],
    "edges": [{"name": "e", "from": "A", "to": "B"}],
}
HNN_Z = {
    "vertices": [{"name": "v", "group": {"kind": "free_abelian", "rank": 1, "generators": ["x"]}}],
    "edges": [
        {
            "name": "t",
            "from": "v",
            "to": "v",
            "group": {"kind": "free_abelian", "rank": 1, "generators": ["c"]},
            "into_to": {"c": "x"},
            "into_from": {"c": "x^2"},
        }
    ],
}
THETA = {"family": "theta", "paths": 3, "length": 2}

# subcommand -> (config, extra command-line arguments)
DEMOS: dict[str, tuple[dict, list[str]]] = {
    "cayley": ({"group": F2, "radius": 2}, []),
    "coset": ({"group": F2, "radius": 2, "peripheral": ["a"]}, []),
    "horoball": ({"graph": {"family": "path", "n": 4}, "depth": 2}, []),
    "horodist": (
        {"graph": {"family": "path", "n": 9}, "depth": 5, "pairs": [["0", 0, "8", 0], ["0", 2, "5", 1], ["3", 4, "3", 0]]},
        [],
    ),
    "horoverify": ({"graph": {"family": "path", "n": 9}, "depth": 6}, []),
    "cusped": ({"group": Z2, "peripherals": [["x"]], "radius": 3, "depth": 3}, []),
    "delta": ({"cusped": {"group": Z2, "peripherals": [["x", "y"]], "radius": 4, "depth": 3}, "max_vertices": 1000}, []),
    "crossratio": (
        {
            "graph": {"family": "cycle", "n": 8},
            "quadruples": [["0", "2", "4", "6"], ["0", "1", "2", "3"], ["0", "0", "1", "1"]],
            "visual": {"basepoint": "0", "sample": ["2", "4", "6"], "epsilon": 0.5},
        },
        [],
    ),
    "qi-measure": ({"group": Z2, "radius": 3, "target_radius": 3, "map": "swap"}, []),
    "qi-extend": ({"group": Z, "radius": 5, "target_radius": 10, "map": "shift", "k": 5, "depth": 5}, []),
    "qi-halfspace": ({"graph": {"family": "path", "n": 9}, "depth": 4, "schedule": {"kind": "alternating", "bound": 2}}, []),
    "gog-present": ({"gog": Z2_Z3, "normal_forms": ["a a b", "b a b^-1 a"]}, []),
    "gog-quotient": (
        {
            "gog": {
                "vertices": [
                    {"name": "A", "group": {"kind": "perm", "degree": 3, "generators": {"s": [1, 0, 2], "r": [1, 2, 0]}}},
                    {"name": "B", "group": {"kind": "cyclic", "n": 2, "generator": "c"}},
                ],
                "edges": [{"name": "e", "from": "A", "to": "B"}],
            },
            "normal": {"A": ["r"]},
        },
        [],
    ),
    "gog-quotient-finite": ({"gog": Z2_Z3, "forbidden": ["a", "b", "b^2", "a b"]}, ["--seed", "0"]),
    "gog-kernel": ({"gog": Z2_Z3, "homomorphism": {"cyclic": 6, "images": {"a": 3, "b": 2}}}, []),
    "gog-fill": ({"generators": ["a", "b"], "exponents": {"a": 3}, "radius": 6}, ["--seed", "0"]),
    "gog-tree": ({"gog": HNN_Z, "radius": 3}, []),
    "decompose": ({"graph": {"family": "block_chain", "sizes": [3, 4, 2, 5]}}, []),
    "decompose-oracle": ({"graph": THETA}, []),
    "verify-all": ({"criteria": [6]}, []),
}


def write_demo_configs(directory) -> list[tuple[str, list[str]]]:
    """Write ``<subcommand>.json`` files and return ``(subcommand, argv)`` pairs that use them."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    runs = []
    for name, (cfg, extra) in DEMOS.items():
        path = directory / f"{name}.json"
        path.write_text(json.dumps(cfg, indent=2) + "\n")
        runs.append((name, ["--config", str(path), *extra]))
    return runs
