"""Tests for application settings and per-case configuration."""

import os
from pathlib import Path
from unittest.mock import patch

import pytest

from tslg.configs import AppConfig, CaseConfig, CaseId, get_app_config, load_case_config
from tslg.configs.config import CASES_DIR
from tslg.core.exceptions import ConfigurationError


class TestAppConfig:
    def test_env_vars_override_yaml(self):
        env_vars = {
            "TSLG_OUTPUT__DIR": "/tmp/tslg-runs",
            "TSLG_LOGGING__LEVEL": "DEBUG",
            "TSLG_RUNTIME__WORKERS": "4",
        }
        with patch.dict(os.environ, env_vars, clear=False):
            config = AppConfig()

        assert config.output.dir == Path("/tmp/tslg-runs")
        assert config.logging.level == "DEBUG"
        assert config.runtime.workers == 4

    def test_get_app_config_rereads(self):
        config1 = get_app_config()
        config2 = get_app_config()

        assert isinstance(config1, AppConfig)
        assert config1 == config2
        assert config1.runtime.batch_size >= 1
        assert config1.cases_dir == CASES_DIR


class TestCaseDefaults:
    def test_cutin_grid_constants(self):
        config = CaseConfig.for_case("cutin")

        assert config.case is CaseId.CUTIN
        assert [d.name for d in config.space] == ["range", "range_rate"]
        assert config.space[0].lower_open
        assert config.sampling.epsilon == pytest.approx(0.05)
        assert config.sampling.beta == pytest.approx(0.3)
        assert config.fixed_params["ego_speed"] == 30.0

    def test_car_following_needs_actions(self):
        with pytest.raises(ConfigurationError, match="action dimension"):
            CaseConfig.for_case("car_following", actions=None)

    def test_unknown_case(self):
        with pytest.raises(ConfigurationError, match="unknown case id"):
            CaseConfig.for_case("roundabout")

    def test_replace_is_validated(self):
        config = CaseConfig.for_case("cutin")

        assert config.replace(seed=7).seed == 7
        with pytest.raises(ConfigurationError):
            config.replace(sampling={"epsilon": 1.5, "beta": 0.3})


class TestCaseYaml:
    @pytest.mark.parametrize("case", list(CaseId))
    def test_shipped_documents_match_defaults(self, case):
        from_yaml = load_case_config(case, CASES_DIR / f"{case.value}.yaml")

        assert from_yaml == CaseConfig.for_case(case)

    def test_overlay_changes_only_named_fields(self, tmp_path):
        path = tmp_path / "cutin.yaml"
        path.write_text("sampling:\n  beta: 0.1\nsearch:\n  starts: 5\n")

        config = load_case_config("cutin", path)

        assert config.sampling.beta == pytest.approx(0.1)
        assert config.sampling.epsilon == pytest.approx(0.05)
        assert config.search.starts == 5

    def test_wrong_case_rejected(self, tmp_path):
        path = tmp_path / "other.yaml"
        path.write_text("case: highway_exit\n")

        with pytest.raises(ConfigurationError, match="is for"):
            load_case_config("cutin", path)

    def test_invalid_value_rejected(self, tmp_path):
        path = tmp_path / "cutin.yaml"
        path.write_text("sampling:\n  epsilon: 0.0\n")

        with pytest.raises(ConfigurationError):
            load_case_config("cutin", path)

    def test_non_mapping_rejected(self, tmp_path):
        path = tmp_path / "cutin.yaml"
        path.write_text("- 1\n- 2\n")

        with pytest.raises(ConfigurationError, match="mapping"):
            load_case_config("cutin", path)
