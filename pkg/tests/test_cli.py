"""Command line client: exit codes, human output, report envelopes."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from heavenly.cli import (EXIT_CONDITIONAL, EXIT_NUMERIC_ABORT, EXIT_PASS,
                          EXIT_USAGE, main)


@pytest.fixture()
def runner():
    return CliRunner()


class TestCatalogCommands:
    def test_list(self, runner):
        res = runner.invoke(main, ["catalog", "list"])
        assert res.exit_code == EXIT_PASS
        assert "einstein_weyl" in res.output
        assert len([ln for ln in res.output.splitlines() if ln]) >= 12

    def test_show_unknown(self, runner):
        res = runner.invoke(main, ["catalog", "show", "nope"])
        assert res.exit_code == EXIT_USAGE

    def test_export(self, runner, tmp_path):
        out = tmp_path / "cat.json"
        res = runner.invoke(main, ["catalog", "export", "--json", str(out)])
        assert res.exit_code == EXIT_PASS
        assert len(json.loads(out.read_text())["entries"]) == 11


class TestVerifyCommands:
    def test_lax_pass(self, runner):
        res = runner.invoke(main, ["verify", "lax", "dkp"])
        assert res.exit_code == EXIT_PASS
        assert "PASS" in res.output

    def test_lax_unknown(self, runner):
        res = runner.invoke(main, ["verify", "lax", "nope"])
        assert res.exit_code == EXIT_USAGE

    def test_lax_family_k(self, runner):
        res = runner.invoke(main, ["verify", "lax", "pleb1", "--k", "2"])
        assert res.exit_code == EXIT_PASS
        assert "certificate" in res.output

    def test_casimir(self, runner):
        res = runner.invoke(main, ["verify", "casimir", "einstein_weyl",
                                   "--index", "1"])
        assert res.exit_code == EXIT_PASS

    def test_casimir_unclaimed(self, runner):
        res = runner.invoke(main, ["verify", "casimir", "mod_einstein_weyl",
                                   "--index", "0"])
        assert res.exit_code == EXIT_USAGE

    def test_exactness(self, runner):
        res = runner.invoke(main, ["verify", "exactness", "pleb1"])
        assert res.exit_code == EXIT_PASS
        assert "closed" in res.output

    def test_verify_all_json_envelope_stable(self, runner, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for p in paths:
            res = runner.invoke(main, ["verify", "all", "--json", str(p)])
            assert res.exit_code == EXIT_PASS
        docs = [json.loads(p.read_text()) for p in paths]
        for d in docs:
            assert set(d) == {"tool_version", "command", "timestamp",
                              "results"}
            d["timestamp"] = d["command"] = None
        assert json.dumps(docs[0]) == json.dumps(docs[1])


class TestNumericCommands:
    def test_simulate_writes_artifacts(self, runner, tmp_path):
        res = runner.invoke(main, [
            "simulate", "dkp", "--nx", "16", "--ny", "16", "--dt", "1e-3",
            "--tmax", "0.01", "--init", "single_mode",
            "--out", str(tmp_path)])
        assert res.exit_code == EXIT_PASS
        assert (tmp_path / "diagnostics.csv").exists()
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["mass_drift"] < 1e-10

    def test_simulate_cfl_abort(self, runner):
        res = runner.invoke(main, [
            "simulate", "dkp", "--nx", "16", "--ny", "16", "--dt", "1",
            "--tmax", "2", "--init", "sine_x"])
        assert res.exit_code == EXIT_NUMERIC_ABORT

    def test_check_numeric_zero_on_husain(self, runner):
        res = runner.invoke(main, ["check", "numeric", "husain",
                                   "--solution", "zero",
                                   "--samples", "6", "--seed", "1"])
        assert res.exit_code == EXIT_PASS
        assert "0.000e+00" in res.output

    def test_check_numeric_unknown_solution(self, runner):
        res = runner.invoke(main, ["check", "numeric", "dkp",
                                   "--solution", "bogus"])
        assert res.exit_code == EXIT_USAGE

    def test_check_numeric_deterministic(self, runner, tmp_path):
        outs = []
        for p in ("a.json", "b.json"):
            path = tmp_path / p
            res = runner.invoke(main, ["check", "numeric", "dkp",
                                       "--solution", "generic",
                                       "--samples", "8", "--seed", "7",
                                       "--json", str(path)])
            assert res.exit_code == EXIT_PASS
            doc = json.loads(path.read_text())
            doc["timestamp"] = doc["command"] = None
            outs.append(json.dumps(doc))
        assert outs[0] == outs[1]
