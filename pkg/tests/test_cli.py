import json
import subprocess
import sys

import pytest

from cuspkit.cli import COMMANDS, main
from cuspkit.demos import DEMOS, write_demo_configs


def run(tmp_path, argv, config=None, graph=None):
    args = list(argv)
    if config is not None:
        p = tmp_path / "config.json"
        p.write_text(json.dumps(config))
        args += ["--config", str(p)]
    if graph is not None:
        p = tmp_path / "graph.json"
        p.write_text(graph if isinstance(graph, str) else json.dumps(graph))
        args += ["--graph", str(p)]
    out = tmp_path / "out.txt"
    code = main(args + ["--out", str(out)])
    return code, (out.read_text() if out.exists() else None)


def test_every_subcommand_has_a_demo():
    assert set(DEMOS) == set(COMMANDS)
    assert len(COMMANDS) == 20


def test_horoverify_p9(tmp_path):
    code, text = run(tmp_path, ["horoverify"], {"graph": {"family": "path", "n": 9}, "depth": 6})
    assert code == 0
    assert json.loads(text)["mismatches"] == 0


def test_delta_on_tree(tmp_path):
    tree = {"vertices": ["a", "b", "c", "d", "e"], "edges": [["a", "b"], ["b", "c"], ["b", "d"], ["d", "e"]]}
    code, text = run(tmp_path, ["delta"], graph=tree)
    assert code == 0 and json.loads(text)["delta"] == "0"


def test_malformed_graph_exits_2(tmp_path, capsys):
    code, _ = run(tmp_path, ["decompose"], graph='{"vertices": ["a", "b"], "edges": [["a", "b"]')
    assert code == 2
    assert "line 1 column" in capsys.readouterr().err


def test_sampled_mode_needs_seed(tmp_path):
    cfg = {"graph": {"family": "cycle", "n": 6}, "mode": "sampled"}
    assert run(tmp_path, ["delta"], cfg)[0] == 2
    code, text = run(tmp_path, ["delta", "--seed", "7"], cfg)
    assert code == 0 and json.loads(text)["seed"] == 7


def test_budget_exceeded_exits_3(tmp_path):
    gog = DEMOS["gog-kernel"][0]["gog"]
    assert run(tmp_path, ["gog-tree"], {"gog": gog, "radius": 60})[0] == 3


def test_usage_errors_exit_2(tmp_path):
    assert run(tmp_path, ["horoball"], {"depth": 2})[0] == 2
    assert run(tmp_path, ["horodist", "--format", "dot"], DEMOS["horodist"][0])[0] == 2
    assert main(["no-such-command"]) == 2


def test_dot_output(tmp_path):
    code, text = run(tmp_path, ["decompose", "--format", "dot"], DEMOS["decompose"][0])
    assert code == 0 and text.startswith('graph "decomposition"')


def test_demos_are_deterministic(tmp_path):
    for sub, argv in write_demo_configs(tmp_path / "configs"):
        if sub == "verify-all":
            continue
        a, b = tmp_path / "a", tmp_path / "b"
        assert main([sub, *argv, "--out", str(a)]) == 0, sub
        assert main([sub, *argv, "--out", str(b)]) == 0, sub
        assert a.read_bytes() == b.read_bytes(), sub


def test_module_entry_point(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(DEMOS["cayley"][0]))
    proc = subprocess.run([sys.executable, "-m", "cuspkit", "cayley", "--config", str(cfg)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["sphere_sizes"] == [1, 4, 12]


@pytest.mark.parametrize("value, expected", [("3", 3), ("x", 1), ("", 1)])
def test_threads_env_default(monkeypatch, value, expected):
    from cuspkit.cli import build_parser

    monkeypatch.setenv("CUSPKIT_THREADS", value)
    assert build_parser().parse_args(["decompose"]).threads == expected
