#!/usr/bin/env python3
"""
Tests for configuration loading, schema checks and run-configuration validation.
"""

import json

import pytest

from modules.config_manager import PROJECT_ROOT, ConfigManager, builtin_algebra, load_algebra
from modules.validation import ConfigurationValidator, RunConfig, ValidationError


@pytest.fixture(autouse=True)
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def write_json(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


class TestAlgebraFiles:
    def test_bundled_names_resolve(self):
        assert load_algebra("heisenberg").dim == 3
        assert load_algebra("filiform4.alg").step == 3
        assert builtin_algebra("heisenberg") is builtin_algebra("heisenberg")

    def test_labels_and_name(self):
        algebra = builtin_algebra("heisenberg")
        assert algebra.name == "heisenberg"
        assert algebra.labels == ("X", "Y", "Z")

    def test_user_file(self, in_tmp):
        path = write_json(in_tmp / "h.alg", {
            "name": "mine", "dim": 3, "step": 2, "layers": [2, 1], "brackets": [[1, 2, 3, "2"]],
        })
        algebra = load_algebra(str(path))
        assert algebra.name == "mine"
        assert algebra.bracket(algebra.basis[0], algebra.basis[1]) == 2 * algebra.basis[2]

    def test_missing_file(self):
        with pytest.raises(FileNotFoundError):
            load_algebra("no_such_algebra.alg")

    def test_invalid_json(self, in_tmp):
        path = in_tmp / "broken.alg"
        path.write_text("{ dim: 3", encoding="utf-8")
        with pytest.raises(ValidationError, match="Invalid JSON"):
            load_algebra(str(path))

    @pytest.mark.parametrize("raw", [
        {"dim": 3, "step": 2},
        {"dim": 3, "step": 2, "layers": [2, 1], "extra": 1},
        {"dim": 3, "step": 2, "layers": [2, 1], "brackets": [[1, 2, 3]]},
        {"dim": 3, "step": 2, "layers": [2, 1], "brackets": [[1, 2, 3, "x"]]},
    ])
    def test_schema_violations(self, in_tmp, raw):
        path = write_json(in_tmp / "bad.alg", raw)
        with pytest.raises(ValidationError, match="Schema error"):
            load_algebra(str(path))

    def test_bracket_index_out_of_range(self, in_tmp):
        path = write_json(in_tmp / "bad.alg", {
            "dim": 3, "step": 2, "layers": [2, 1], "brackets": [[1, 2, 4, "1"]],
        })
        with pytest.raises(ValidationError, match="out of range"):
            load_algebra(str(path))

    def test_path_traversal_rejected(self):
        with pytest.raises(ValidationError):
            ConfigManager().load_algebra("../heisenberg.alg")


class TestRunConfig:
    def test_overrides_win(self, in_tmp):
        path = write_json(in_tmp / "run.json", {
            "subcommand": "solve", "algebra_path": "heisenberg", "alpha": 2.0, "out_dir": "out",
        })
        manager = ConfigManager(str(path))
        config = manager.load_run_config({"alpha": 1.25, "beta": None})
        assert config.alpha == 1.25
        assert config.beta == -1.0
        assert manager.raw_config["alpha"] == 2.0
        assert (in_tmp / "out").is_dir()

    def test_unknown_config_key(self, in_tmp):
        path = write_json(in_tmp / "run.json", {"subcommand": "analyze", "workers": 4})
        with pytest.raises(ValidationError):
            ConfigManager(str(path)).load_run_config()

    def test_missing_config_file(self):
        with pytest.raises(FileNotFoundError):
            ConfigManager("absent.json").load_run_config()

    def test_sample_config_is_valid(self):
        config = ConfigManager(str(PROJECT_ROOT / "config.sample.json")).load_run_config(
            {"out_dir": "sample_out"}
        )
        assert config.subcommand == "solve"
        assert config.f_recipe == "dgaussian"

    @pytest.mark.parametrize("changes", [
        {"subcommand": "bogus"},
        {"mode": "spectral"},
        {"part": 3},
        {"grid_n": 15},
        {"tau": -0.5},
        {"m_max": 0},
        {"t_values": []},
        {"dt": 0.0},
        {"precision": 0},
    ])
    def test_invalid_values(self, changes):
        data = {"subcommand": "solve", "out_dir": "out"}
        data.update(changes)
        with pytest.raises(ValidationError):
            ConfigurationValidator().validate_run_config(data)

    def test_unknown_keyword_reported(self):
        with pytest.raises(ValidationError, match="Unknown run configuration keys"):
            RunConfig.from_dict({"subcommand": "analyze", "out_dir": "out", "speed": 1})
