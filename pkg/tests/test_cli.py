"""Tests for the batch command-line front end."""

import json

import numpy as np
import pandas as pd
import pytest

from fda_engine.cli import parse_grid, run
from fda_engine.core.serializer import from_long, load_fundata
from fda_engine.mfpca.models import MFPCAFit


def _simulate(tmp_path, name="sim.json", seed=1, extra=()):
    out = tmp_path / name
    status = run([
        "simulate", "--kind", "fourier", "--m", "10", "--decay", "linear", "--n", "8",
        "--grid", "0:1:101", "--seed", str(seed), "--out", str(out),
        "--truth", str(tmp_path / "truth.json"), *extra,
    ])
    assert status == 0
    return out


def _split(tmp_path, name="multi.json", n=40):
    out = tmp_path / name
    status = run([
        "simulate", "--construction", "split", "--kind", "fourier", "--m", "5",
        "--element", "grid=0:1:51", "--element", "grid=-1:1:41",
        "--decay", "linear", "--n", str(n), "--seed", "3", "--out", str(out),
    ])
    assert status == 0
    return out


def _expansions(tmp_path, specs):
    path = tmp_path / "expansions.json"
    path.write_text(json.dumps(specs), encoding="utf-8")
    return path


def _pipeline(workdir):
    workdir.mkdir()
    sim = _split(workdir, n=60)
    noisy = workdir / "noisy.json"
    assert run(["transform", "--in", str(sim), "--noise", "0.1,0.2", "--seed", "4",
                "--out", str(noisy)]) == 0
    spec = _expansions(workdir, [{"type": "fpca", "npc": 4}, {"type": "fpca", "pve": 0.95}])
    fit = workdir / "fit.json"
    assert run(["mfpca", "--in", str(noisy), "--expansions", str(spec), "--m", "3",
                "--weights", "auto", "--fit", "--bootstrap", "4", "--seed", "5",
                "--out", str(fit)]) == 0
    return [sim, noisy, fit]


# ---------------------------------------------------------------------------
# Flag helpers
# ---------------------------------------------------------------------------


class TestParseGrid:
    def test_inclusive_endpoints(self):
        grid = parse_grid("-0.5:0.5:101")
        assert grid.size == 101
        assert grid[0] == -0.5 and grid[-1] == 0.5

    @pytest.mark.parametrize("text", ["0:1", "1:0:10", "0:1:1", "a:b:c"])
    def test_malformed(self, text):
        from fda_engine.cli import UsageError

        with pytest.raises(UsageError):
            parse_grid(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


class TestSimulate:
    def test_univariate_files(self, tmp_path):
        out = _simulate(tmp_path)
        data = load_fundata(out)
        assert data.n_obs == 8
        assert data.n_obs_points == (101,)
        truth = json.loads((tmp_path / "truth.json").read_text(encoding="utf-8"))
        assert len(truth["trueVals"]) == 10
        assert set(truth) == {"trueVals", "trueFuns"}

    def test_split_construction(self, tmp_path):
        data = load_fundata(_split(tmp_path))
        assert data.kind == "multi"
        assert data.n_obs_points == [(51,), (41,)]

    def test_weighted_construction(self, tmp_path):
        out = tmp_path / "w.json"
        status = run([
            "simulate", "--construction", "weighted",
            "--element", "kinds=fourier;m=6;grid=0:1:31",
            "--element", "kinds=wiener,legendre;m=2,3;grid=0:1:11,0:1:9",
            "--decay", "exponential", "--n", "5", "--seed", "1", "--out", str(out),
        ])
        assert status == 0
        assert load_fundata(out).dim_supp == (1, 2)

    def test_image(self, tmp_path):
        out = tmp_path / "img.json"
        status = run([
            "simulate", "--kind", "fourier,legendre", "--m", "3,4", "--grid", "0:1:11,0:1:9",
            "--decay", "wiener", "--n", "2", "--seed", "1", "--out", str(out),
        ])
        assert status == 0
        assert load_fundata(out).n_obs_points == (11, 9)


class TestTransformAndInfo:
    def test_sparsify_counts(self, tmp_path, capsys):
        sim = _simulate(tmp_path)
        sparse = tmp_path / "sparse.json"
        assert run(["transform", "--in", str(sim), "--sparsify", "5:10", "--seed", "1",
                    "--out", str(sparse)]) == 0
        capsys.readouterr()
        assert run(["info", "--in", str(sparse)]) == 0
        info = json.loads(capsys.readouterr().out)
        assert info["nObs"] == 8
        assert 5 <= info["observedPerCurve"]["min"]
        assert info["observedPerCurve"]["max"] <= 10

    def test_info_fields(self, tmp_path, capsys):
        sim = _simulate(tmp_path)
        capsys.readouterr()
        assert run(["info", "--in", str(sim)]) == 0
        info = json.loads(capsys.readouterr().out)
        assert info["kind"] == "dense"
        assert info["nObsPoints"] == [101]
        assert info["dimSupp"] == 1

    def test_demean_and_affine(self, tmp_path):
        sim = _simulate(tmp_path)
        out = tmp_path / "t.json"
        assert run(["transform", "--in", str(sim), "--demean", "--affine", "2,1",
                    "--out", str(out)]) == 0
        data = load_fundata(out)
        np.testing.assert_allclose(data.X.mean(axis=0), 1.0, atol=1e-12)

    def test_noise_needs_seed(self, tmp_path, capsys):
        sim = _simulate(tmp_path)
        status = run(["transform", "--in", str(sim), "--noise", "0.1",
                      "--out", str(tmp_path / "n.json")])
        assert status == 1
        assert capsys.readouterr().err.startswith("E_USAGE:")


class TestConvert:
    def test_long_csv_round_trip(self, tmp_path):
        sim = _simulate(tmp_path)
        csv = tmp_path / "sim.csv"
        back = tmp_path / "back.json"
        assert run(["convert", "--in", str(sim), "--to", "long", "--out", str(csv)]) == 0
        assert run(["convert", "--in", str(csv), "--to", "dense", "--out", str(back)]) == 0
        assert np.array_equal(load_fundata(back).X, load_fundata(sim).X)

    def test_dense_to_irregular(self, tmp_path):
        sim = _simulate(tmp_path)
        out = tmp_path / "irreg.json"
        assert run(["convert", "--in", str(sim), "--to", "irregular", "--out", str(out)]) == 0
        assert load_fundata(out).kind == "irregular"

    def test_impossible_conversion(self, tmp_path, capsys):
        multi = _split(tmp_path)
        status = run(["convert", "--in", str(multi), "--to", "irregular",
                      "--out", str(tmp_path / "x.json")])
        assert status == 2
        assert capsys.readouterr().err.startswith("E_INPUT:")


class TestIntegrateAndNorm:
    def test_one_value_per_observation(self, tmp_path, capsys):
        sim = _simulate(tmp_path)
        capsys.readouterr()
        assert run(["integrate", "--in", str(sim), "--rule", "midpoint"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 8
        assert all(np.isfinite(float(v)) for v in lines)

    def test_weighted_norm(self, tmp_path, capsys):
        multi = _split(tmp_path)
        capsys.readouterr()
        assert run(["norm", "--in", str(multi), "--squared", "--weights", "1,2"]) == 0
        values = [float(v) for v in capsys.readouterr().out.split()]
        assert len(values) == 40
        assert min(values) >= 0


class TestMfpcaAndPlotdata:
    def test_fit_and_plotdata(self, tmp_path, capsys):
        multi = _split(tmp_path)
        spec = _expansions(tmp_path, [{"type": "fpca", "npc": 5}] * 2)
        fit = tmp_path / "fit.json"
        assert run(["mfpca", "--in", str(multi), "--expansions", str(spec), "--m", "3",
                    "--out", str(fit)]) == 0
        doc = json.loads(fit.read_text(encoding="utf-8"))
        assert len(doc["values"]) == 3

        capsys.readouterr()
        assert run(["info", "--in", str(fit)]) == 0
        info = json.loads(capsys.readouterr().out)
        assert info["kind"] == "mfpca"
        assert info["nComponents"] == 3

        out = tmp_path / "plot.csv"
        assert run(["plotdata", "--in", str(fit), "--out", str(out)]) == 0
        functions = pd.read_csv(out)
        assert list(functions.columns) == ["component", "obs", "element", "arg1", "value"]
        assert sorted(functions["element"].unique()) == [1, 2]
        assert sorted(functions["component"].unique()) == [0, 1, 2, 3]
        assert len(functions) == 4 * (51 + 41)
        stacked = from_long(functions, kind="multi")
        saved = MFPCAFit.from_dict(doc)
        mean, psi = saved.mean_function.elements, saved.functions.elements
        np.testing.assert_array_equal(stacked.elements[0].X[0], mean[0].X[0])
        np.testing.assert_array_equal(stacked.elements[1].X[1:], psi[1].X)
        scores = pd.read_csv(tmp_path / "plot_scores.csv")
        assert list(scores.columns) == ["obs", "label", "score1", "score2", "score3"]
        assert len(scores) == 40
        assert not (tmp_path / "plot_mean.csv").exists()

    def test_plotdata_on_container(self, tmp_path):
        sim = _simulate(tmp_path)
        out = tmp_path / "sim.csv"
        assert run(["plotdata", "--in", str(sim), "--out", str(out)]) == 0
        assert len(pd.read_csv(out)) == 8 * 101

    def test_bootstrap_needs_seed(self, tmp_path):
        multi = _split(tmp_path)
        spec = _expansions(tmp_path, [{"type": "fpca", "npc": 5}] * 2)
        status = run(["mfpca", "--in", str(multi), "--expansions", str(spec), "--m", "2",
                      "--bootstrap", "3", "--out", str(tmp_path / "f.json")])
        assert status == 1

    def test_bad_expansion_spec(self, tmp_path, capsys):
        multi = _split(tmp_path)
        spec = _expansions(tmp_path, [{"type": "wavelet"}] * 2)
        status = run(["mfpca", "--in", str(multi), "--expansions", str(spec), "--m", "2",
                      "--out", str(tmp_path / "f.json")])
        assert status == 2
        err = capsys.readouterr().err
        assert err.startswith("E_INPUT:")
        assert err.count("\n") == 1


# ---------------------------------------------------------------------------
# Determinism and errors
# ---------------------------------------------------------------------------


class TestDeterminism:
    def test_pipeline_bitwise_identical(self, tmp_path):
        first = _pipeline(tmp_path / "a")
        second = _pipeline(tmp_path / "b")
        for a, b in zip(first, second):
            assert a.read_bytes() == b.read_bytes()


class TestErrors:
    def test_unknown_command(self, capsys):
        assert run(["frobnicate"]) == 1
        assert capsys.readouterr().err.startswith("E_USAGE:")

    def test_missing_input_file(self, tmp_path, capsys):
        assert run(["info", "--in", str(tmp_path / "nope.json")]) == 2
        assert capsys.readouterr().err.startswith("E_INPUT:")

    @pytest.mark.parametrize(
        "text",
        ["obs,element,arg1,value\n", "obs,element,arg1,value\na,1,0.0,1.0\nb,1,1.0,2.0\n"],
    )
    def test_unreadable_long_csv(self, tmp_path, capsys, text):
        path = tmp_path / "bad.csv"
        path.write_text(text, encoding="utf-8")
        assert run(["info", "--in", str(path)]) == 2
        err = capsys.readouterr().err
        assert err.startswith("E_INPUT:")
        assert err.count("\n") == 1

    def test_bad_grid(self, tmp_path):
        status = run(["simulate", "--kind", "fourier", "--m", "3", "--grid", "0:1",
                      "--decay", "linear", "--n", "2", "--seed", "1",
                      "--out", str(tmp_path / "x.json")])
        assert status == 1

    def test_numeric_failure(self, tmp_path, capsys):
        sim = _simulate(tmp_path)
        status = run(["transform", "--in", str(sim), "--log", "--out", str(tmp_path / "l.json")])
        assert status == 3
        assert capsys.readouterr().err.startswith("E_NUMERIC:")

    def test_help_exits_cleanly(self, capsys):
        assert run(["--help"]) == 0
        assert "simulate" in capsys.readouterr().out
