import json
import subprocess
import sys

import pytest

from svnkit.cli import main

WEIGHTED = "a\tb\t9.9\na\tc\t0.1\nb\tc\t1.0\nc\td\t4.0\nd\te\t0.2\nc\te\t2.0\n"


@pytest.fixture
def weighted(tmp_path):
    path = tmp_path / "w.tsv"
    path.write_text(WEIGHTED)
    return path


@pytest.fixture
def bipartite(tmp_path):
    out = tmp_path / "bench"
    assert main(["benchmark", "--out", str(out), "--blocks", "2", "--a-per-block", "15", "--b-per-block", "30", "--intra", "0.4", "--inter", "0.03", "--quiet"]) == 0
    return out / "bipartite.tsv"


def _files(directory, skip=("manifest.json",)):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir()) if p.name not in skip}


def test_backbone(weighted, tmp_path):
    out = tmp_path / "bb"
    assert main(["backbone", "--input", str(weighted), "--out", str(out), "--correction", "none", "--symmetrize", "union", "--quiet"]) == 0
    rows = [line.split("\t") for line in (out / "backbone.tsv").read_text().splitlines()]
    assert ["a", "b"] == rows[0][:2]
    assert (out / "backbone_union.tsv").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "backbone"
    assert manifest["parameters"]["alpha"] == 0.05
    assert list(manifest["inputs"].values())[0]
    assert manifest["results"]["n_tests"] == 12


def test_backbone_missing_input(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["backbone", "--out", str(tmp_path)])
    assert info.value.code == 2
    assert "--input" in capsys.readouterr().err


def test_backbone_bad_alpha(weighted, tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["backbone", "--input", str(weighted), "--out", str(tmp_path), "--alpha", "1.5"])
    assert info.value.code == 2
    assert "--alpha" in capsys.readouterr().err


def test_malformed_input_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.tsv"
    bad.write_text("a\tb\t1\nc\tc\t1\n")
    assert main(["backbone", "--input", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["backbone", "--input", str(tmp_path / "nope.tsv"), "--out", str(tmp_path / "o")]) == 2


def test_unknown_subcommand(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize("tails", ["one", "two"])
def test_validate(bipartite, tmp_path, tails):
    out = tmp_path / f"v{tails}"
    assert main(["validate", "--input", str(bipartite), "--out", str(out), "--tails", tails, "--quiet"]) == 0
    lines = (out / "validated.tsv").read_text().splitlines()
    assert lines
    assert all(line.split("\t")[3] in ("over", "under") for line in lines)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["results"]["n_validated"] == len(lines)
    if tails == "two":
        assert manifest["results"]["n_tests"] == 30 * 29


def test_communities_and_compare_with_self(bipartite, tmp_path):
    out = tmp_path / "c"
    assert main(["communities", "--input", str(bipartite), "--out", str(out), "--network", "full", "--quiet"]) == 0
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["n_communities"] >= 2 and metrics["modularity"] > 0
    part = str(out / "partition.tsv")
    cmp_out = tmp_path / "cmp"
    assert main(["compare", "--candidate", part, "--reference", part, "--out", str(cmp_out), "--quiet"]) == 0
    metrics = json.loads((cmp_out / "metrics.json").read_text())
    assert (metrics["r_adj"], metrics["w_adj"]) == (1.0, 1.0)


def test_compare_undefined_metric(tmp_path):
    (tmp_path / "s.tsv").write_text("a\t0\nb\t1\nc\t2\n")
    (tmp_path / "r.tsv").write_text("a\t0\nb\t0\nc\t1\n")
    out = tmp_path / "o"
    assert main(["compare", "--candidate", str(tmp_path / "s.tsv"), "--reference", str(tmp_path / "r.tsv"), "--out", str(out), "--quiet"]) == 0
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["w_adj"] is None and "w_adj_error" in metrics


def test_experiment_noiseless_row(tmp_path):
    out = tmp_path / "e"
    argv = ["experiment", "--out", str(out), "--realizations", "1", "--p-r", "0", "--blocks", "2", "--a-per-block", "10", "--b-per-block", "20", "--quiet"]
    assert main(argv) == 0
    rows = [line.split("\t") for line in (out / "experiment.tsv").read_text().splitlines()]
    assert rows[0] == ["network_kind", "p_r", "metric", "mean", "std"]
    full = {r[2]: float(r[3]) for r in rows[1:] if r[0] == "full"}
    assert full["r_adj"] == 1.0


def test_rerun_is_byte_identical(bipartite, tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    runs = []
    for k, threads in enumerate(("1", "2")):
        out = tmp_path / f"run{k}"
        assert main(["communities", "--input", str(bipartite), "--out", str(out), "--threads", threads, "--quiet"]) == 0
        runs.append(_files(out, skip=()))
    assert runs[0] == runs[1]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "svnkit", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "svnkit" in proc.stdout
