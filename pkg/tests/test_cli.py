import json
import subprocess
import sys

import numpy as np
import pytest

from crvrtda.cli import main, read_config, stage_seeds
from crvrtda.network import load_network

from support import FIGURE_S1_TEXT


def run(*argv):
    try:
        return main([str(a) for a in argv])
    except SystemExit as exc:
        return exc.code


@pytest.fixture(scope="module")
def assortative(tmp_path_factory):
    d = tmp_path_factory.mktemp("net")
    path = d / "net.edges"
    assert run("generate", "--structure", "assortative", "--groups", 4, "--size", 10, "--seed", 7, "-o", path) == 0
    return path


def test_generate_block(assortative):
    net = load_network(assortative)
    assert net.n == 40
    meta = json.loads((assortative.parent / "net.edges.json").read_text())
    assert meta["spec"]["structure"] == "assortative" and meta["seed"] == 7
    assert meta["planted_labels"] == np.repeat(np.arange(4), 10).tolist()
    assert meta["rng"] == "numpy.random.PCG64"


def test_generate_er_and_dense(tmp_path):
    assert run("generate", "--er", "--n", 40, "--p", 0.5, "-o", tmp_path / "er.mat") == 0
    net = load_network(tmp_path / "er.mat")
    assert net.n == 40
    meta = json.loads((tmp_path / "er.mat.json").read_text())
    assert meta["kind"] == "erdos_renyi" and meta["planted_labels"] is None and meta["format"] == "dense"


def test_generate_noisy(tmp_path):
    assert run("generate", "--p", 0.7, "--q", 0.3, "--seed", 1, "-o", tmp_path / "n.edges") == 0
    w = load_network(tmp_path / "n.edges").weights
    off = ~np.eye(40, dtype=bool)
    assert w[off].min() >= 0.1
    assert json.loads((tmp_path / "n.edges.json").read_text())["kind"] == "noisy_block"


@pytest.mark.parametrize("argv", [
    ["generate", "--structure", "hierarchical"],
    ["generate", "--p", "1.5"],
    ["generate", "--size", "0"],
    ["frobnicate"],
    [],
])
def test_usage_errors(argv):
    assert run(*argv) == 2


def test_analyze_assortative(assortative, tmp_path, capsys):
    out = tmp_path / "a"
    assert run("analyze", assortative, "--outdir", out) == 0
    label, score = capsys.readouterr().out.split()
    assert label == "assortative" and 0 < float(score) <= 1
    assert (out / "barcode.csv").read_text().startswith("# zeta=0.1, tau=1.0, seed=0\ndim,birth,death\n")
    assert (out / "diagram.svg").read_text().startswith("<?xml")
    report = json.loads((out / "features.json").read_text())
    assert report["classification"]["label"] == "assortative" and report["n"] == 40


def test_analyze_figure_s1(tmp_path):
    path = tmp_path / "s1.filt"
    path.write_text(FIGURE_S1_TEXT)
    assert run("analyze", "--filtration-in", path, "--outdir", tmp_path) == 0
    lines = (tmp_path / "barcode.csv").read_text().splitlines()
    assert lines[1:] == ["dim,birth,death", "0,0.0,1.0", "0,0.0,2.0", "0,0.0,inf", "1,2.0,3.0"]


@pytest.mark.parametrize("zeta", ["0", "-0.5", "abc"])
def test_zeta_usage_error(assortative, tmp_path, zeta):
    assert run("analyze", assortative, "--zeta", zeta, "--outdir", tmp_path) == 2


@pytest.mark.parametrize("cmd", ["analyze", "louvain", "wsbm", "compare"])
def test_missing_input_is_usage_error(cmd, tmp_path):
    assert run(cmd, tmp_path / "nope.edges") == 2


def test_analyze_needs_input(tmp_path):
    assert run("analyze", "--outdir", tmp_path) == 2


def test_malformed_input_is_runtime_error(tmp_path, capsys):
    bad = tmp_path / "bad.edges"
    bad.write_text("0 1 1.0\n1 2\n")
    assert run("louvain", bad) == 1
    assert "line 2" in capsys.readouterr().err


def test_louvain_and_wsbm_commands(assortative, tmp_path):
    assert run("louvain", assortative, "--seed", 3, "-o", tmp_path / "l.json") == 0
    part = json.loads((tmp_path / "l.json").read_text())
    assert part["n_communities"] == 4 and part["seed"] == 3
    assert run("wsbm", assortative, "--K", 4, "-o", tmp_path / "w.json") == 0
    fit = json.loads((tmp_path / "w.json").read_text())
    assert fit["ari_vs_planted"] == 1.0 and len(fit["edge_prob"]) == 4


def test_compare_assortative(assortative, tmp_path):
    out = tmp_path / "r.json"
    assert run("compare", assortative, "--seed", 7, "-o", out) == 0
    report = json.loads(out.read_text())
    assert report["topology"]["label"] == "assortative"
    assert report["louvain"]["n_communities"] == 4
    assert report["wsbm"]["ari_vs_planted"] == 1.0
    assert report["stage_seeds"] == stage_seeds(7)
    assert report["rng"] == "numpy.random.PCG64"


def test_compare_er_smoke(tmp_path):
    net = tmp_path / "er.edges"
    assert run("generate", "--er", "--n", 40, "--p", 0.5, "-o", net) == 0
    assert run("compare", net, "-o", tmp_path / "r.json") == 0
    report = json.loads((tmp_path / "r.json").read_text())
    assert report["topology"]["label"] in ("assortative", "disassortative", "core_periphery", "ordered")
    assert "ari_vs_planted" not in report["wsbm"]


def test_compare_byte_identical(assortative, tmp_path):
    for tag in ("a", "b"):
        assert run("compare", assortative, "--seed", 11, "-o", tmp_path / f"{tag}.json",
                   "--outdir", tmp_path / tag) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    for name in ("barcode.csv", "diagram.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# generator settings\nstructure = ordered\nsize = 5\nseed = 4\nstrong = 2 8\n")
    assert read_config(cfg) == {"structure": "ordered", "size": "5", "seed": "4", "strong": "2 8"}
    assert run("generate", "--config", cfg, "--size", 6, "-o", tmp_path / "o.edges") == 0
    meta = json.loads((tmp_path / "o.edges.json").read_text())
    assert meta["spec"]["structure"] == "ordered" and meta["spec"]["group_size"] == 6
    assert meta["seed"] == 4 and meta["spec"]["strong_interval"] == [2.0, 8.0]
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert run("generate", "--config", bad, "-o", tmp_path / "x.edges") == 2


def test_repeat_names_outputs_by_seed(tmp_path):
    assert run("generate", "--size", 3, "--seed", 10, "--repeat", 3, "-o", tmp_path / "g.edges") == 0
    names = sorted(p.name for p in tmp_path.glob("g_seed*.edges"))
    assert names == ["g_seed10.edges", "g_seed11.edges", "g_seed12.edges"]
    seeds = [json.loads((tmp_path / f"{n}.json").read_text())["seed"] for n in names]
    assert seeds == [10, 11, 12]
    assert run("generate", "--repeat", 0, "-o", tmp_path / "z.edges") == 2


def test_stage_seeds_distinct_and_stable():
    s = stage_seeds(7)
    assert s == stage_seeds(7) and s["louvain"] != s["wsbm"] and s != stage_seeds(8)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "crvrtda", "analyze", str(tmp_path / "missing")],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "not found" in proc.stderr
    proc = subprocess.run([sys.executable, "-m", "crvrtda", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "0.1.0" in proc.stdout
