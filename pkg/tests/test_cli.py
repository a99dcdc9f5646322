from __future__ import annotations

import json

import pytest

from torsionkit.cli import run


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_then_detect(tmp_path, capsys):
    path = tmp_path / "k.facets"
    assert _run(capsys, "gen", "--space", "klein", "-o", str(path))[0] == 0
    code, out, _ = _run(capsys, "detect", "-i", str(path), "-r", "1", "--primes", "2,3,5", "--method", "exact", "--json")
    assert code == 0
    rep = json.loads(out)["reports"][0]
    assert rep["verdict"] == "torsion_detected" and rep["torsion_primes"] == [2]


def test_homology_text(tmp_path, capsys):
    path = tmp_path / "sphere2.facets"
    _run(capsys, "gen", "--space", "sphere2", "-o", str(path))
    code, out, _ = _run(capsys, "homology", "-i", str(path), "-r", "2")
    assert (code, out) == (0, "betti=1 torsion=[]\n")
    code, out, _ = _run(capsys, "homology", "--space", "rp2")
    assert out.splitlines()[1] == "r=1 betti=0 torsion=[2]"


def test_emulate_detect_is_byte_identical(capsys):
    argv = ["detect", "--space", "torus", "-r", "1", "--primes", "2,3", "--method", "emulate", "--seed", "7", "--json"]
    first = _run(capsys, *argv)
    second = _run(capsys, *argv)
    assert first[0] == 0 and first[1] == second[1]
    doc = json.loads(first[1])
    assert doc["seed"] == 7
    for entry in doc["reports"][0]["primes"]:
        assert entry["method"] == "emulate" and entry["seed"] == 7


@pytest.mark.parametrize("space", ["sphere2", "sphere3", "torus", "rp2", "klein"])
def test_sketch_agrees_with_exact_over_seeds(capsys, space):
    def verdict_dims(method, seed):
        code, out, _ = _run(capsys, "detect", "--space", space, "--scan", "--method", method,
                            "--seed", str(seed), "--json", "--no-oracle")
        assert code == 0
        return [[e["dim_Fp"] for e in rep["primes"]] for rep in json.loads(out)["reports"]]

    exact = verdict_dims("exact", 0)
    for seed in range(20):
        assert verdict_dims("sketch", seed) == exact


def test_rank_subcommand(capsys):
    code, out, _ = _run(capsys, "rank", "--space", "rp2", "-r", "1", "--primes", "2,3", "--json")
    assert code == 0
    vals = {x["prime"]: x["value"] for x in json.loads(out)["results"]}
    assert vals == {2: 8, 3: 10}
    code, out, _ = _run(capsys, "rank", "--space", "sphere2", "-r", "1", "--operator", "boundary")
    assert out == "R: rank=3 method=exact\n"
    code, out, _ = _run(capsys, "rank", "--space", "sphere2", "-r", "0", "--method", "stochastic", "--json")
    est = json.loads(out)["results"][0]
    assert est["method"] == "stochastic" and abs(est["value"] - 3) < 0.3
    code, out, _ = _run(capsys, "rank", "--space", "rp2", "-r", "1", "--primes", "2", "--method", "sketch", "--json")
    assert json.loads(out)["results"][0]["params"]["seed"] == 0


def test_emulate_subcommand(capsys):
    code, out, _ = _run(capsys, "emulate", "--space", "rp2", "-r", "1", "--primes", "2,3", "--seed", "5")
    assert code == 0
    res = json.loads(out)["results"]
    assert [x["trace"]["p"] for x in res] == [2, 3]
    assert res[0]["nullity"] == 7 and res[0]["trace"]["seed"] == 5


def test_bounds_subcommand(capsys, tmp_path):
    path = tmp_path / "b.csv"
    code, _, err = _run(capsys, "bounds", "--N", "8", "--primes", "3", "--trials", "500", "-o", str(path))
    assert code == 0 and "cantelli" in err
    lines = path.read_text().splitlines()
    assert lines[0] == "N,p,S,cantelli,berry_esseen,empirical,trials,seed" and len(lines) == 10


def test_table_output(capsys):
    code, out, _ = _run(capsys, "detect", "--space", "rp2", "-r", "1")
    assert code == 0 and "verdict: torsion_detected at p in [2]" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["detect", "--space", "rp2"],  # no order
        ["detect", "--space", "rp2", "-i", "x", "-r", "1"],  # two inputs
        ["detect", "--space", "rp2", "-r", "1", "--primes", "2,4"],
        ["detect", "--space", "rp2", "-r", "1", "--bogus"],
        ["homology"],
        ["frobnicate"],
        ["detect", "-i", "/nonexistent/file", "-r", "1"],
        ["rank", "--space", "rp2", "-r", "1", "--method", "sketch"],
        ["bounds", "--primes", "2"],
    ],
)
def test_usage_errors(capsys, argv):
    assert _run(capsys, *argv)[0] == 2


def test_computation_errors(capsys, tmp_path):
    code, _, err = _run(capsys, "detect", "--space", "rp2", "-r", "5")
    assert code == 3 and "DimensionOutOfRange" in err
    bad = tmp_path / "bad.facets"
    bad.write_text("facet 0 0 1\n")
    assert _run(capsys, "homology", "-i", str(bad))[0] == 3
    bad.write_text("face 0 1\n")
    code, _, err = _run(capsys, "homology", "-i", str(bad))
    assert code == 3 and "ComplexSyntaxError" in err


def test_help_exits_zero(capsys):
    assert _run(capsys, "--help")[0] == 0
