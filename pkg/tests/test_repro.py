"""Scenario manifest machinery and the assertion mini-language."""

import json

import pytest

from qpac import ConfigError
from qpac.repro import evaluate_assertions, load_manifest, run_repro, scenario_names
from qpac.table import ResultTable


def sample_table():
    t = ResultTable(
        config={},
        columns=("kind", "m", "eps", "base", "fid"),
    )
    t.append("point", 1, 0.5, 1.0, 0.49)
    t.append("point", 4, 0.2, 1.0, 0.80)
    t.append("point", 15, 0.0, 1.0, 1.00)
    return t


class TestAssertionEngine:
    def test_equals(self):
        table = sample_table()
        ok = evaluate_assertions(table, [
            {"check": "equals", "column": "base", "value": 1.0, "tol": 0.0},
        ])
        assert ok[0]["passed"]
        bad = evaluate_assertions(table, [
            {"check": "equals", "column": "eps", "value": 0.0, "tol": 0.0},
        ])
        assert not bad[0]["passed"]

    def test_bounds_with_where(self):
        table = sample_table()
        res = evaluate_assertions(table, [
            {"check": "bounds", "column": "eps", "where": {"m": 15}, "max": 0.05},
            {"check": "bounds", "column": "fid", "where": {"m": 15}, "min": 0.99},
            {"check": "bounds", "column": "eps", "min_exclusive": 0.0},
        ])
        assert res[0]["passed"] and res[1]["passed"]
        assert not res[2]["passed"]  # eps hits 0.0 exactly

    def test_row_le(self):
        res = evaluate_assertions(sample_table(), [
            {"check": "row_le", "lhs": "eps", "rhs": "base"},
        ])
        assert res[0]["passed"]

    def test_monotone(self):
        res = evaluate_assertions(sample_table(), [
            {"check": "monotone", "column": "eps", "by": "m", "direction": "nonincreasing"},
            {"check": "monotone", "column": "eps", "by": "m", "direction": "nondecreasing"},
        ])
        assert res[0]["passed"]
        assert not res[1]["passed"]

    def test_compare_cells(self):
        res = evaluate_assertions(sample_table(), [
            {"check": "compare_cells",
             "lhs": {"column": "fid", "where": {"m": 15}},
             "rhs": {"column": "fid", "where": {"m": 1}}, "op": "ge"},
        ])
        assert res[0]["passed"]

    def test_errors(self):
        table = sample_table()
        with pytest.raises(ConfigError):
            evaluate_assertions(table, [{"check": "nope"}])
        with pytest.raises(ConfigError):
            evaluate_assertions(table, [
                {"check": "equals", "column": "eps", "value": 0, "where": {"m": 99}},
            ])
        with pytest.raises(ConfigError):
            evaluate_assertions(table, [
                {"check": "equals", "column": "kind", "value": 0},
            ])


class TestManifest:
    def test_names(self):
        names = scenario_names()
        assert names == ["fig3", "fig4-delta", "fig4-epsilon", "fig4-gamma", "fig5"]

    def test_entries_runnable_shape(self):
        manifest = load_manifest()
        for name, entry in manifest.items():
            assert "config" in entry and "assertions" in entry
            assert isinstance(entry["config"].get("seed"), int)

    def test_unknown_scenario(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown scenario"):
            run_repro("fig99", out_dir=str(tmp_path))


class TestRunRepro:
    def test_small_scenario_end_to_end(self, tmp_path, monkeypatch):
        tiny = {
            "mini": {
                "description": "reduced flow for the harness test",
                "config": {
                    "command": "sweep-m", "n": 2, "dist": "d1",
                    "m_list": [0, 3], "repeats": 2, "gamma": 0.1,
                    "replacement": "without", "seed": 77,
                },
                "assertions": [
                    {"name": "baseline one", "check": "equals",
                     "column": "epsilon_baseline", "value": 1.0, "tol": 0.0},
                    {"name": "learned beats baseline", "check": "row_le",
                     "lhs": "epsilon_mean", "rhs": "epsilon_baseline"},
                ],
            }
        }
        monkeypatch.setattr("qpac.repro.load_manifest", lambda: tiny)
        report = run_repro("mini", out_dir=str(tmp_path))
        assert report["passed"]
        assert (tmp_path / "mini.csv").exists()
        data = json.loads((tmp_path / "mini_report.json").read_text())
        assert data["passed"] is True
        text = (tmp_path / "mini_report.txt").read_text()
        assert "PASS baseline one" in text
        assert text.strip().endswith("result: PASS")

    def test_failing_assertion_reported(self, tmp_path, monkeypatch):
        tiny = {
            "mini": {
                "description": "fails on purpose",
                "config": {
                    "command": "sweep-m", "n": 2, "dist": "d1",
                    "m_list": [3], "repeats": 1, "gamma": 0.1,
                    "replacement": "without", "seed": 78,
                },
                "assertions": [
                    {"name": "impossible", "check": "bounds",
                     "column": "epsilon_baseline", "max": 0.0},
                ],
            }
        }
        monkeypatch.setattr("qpac.repro.load_manifest", lambda: tiny)
        report = run_repro("mini", out_dir=str(tmp_path))
        assert not report["passed"]
        assert "FAIL impossible" in report["text"]
