"""Tests for Settings validation."""

from pathlib import Path

import pytest
from pydantic import ValidationError


class TestSettingsDefaults:
    def test_settings_created_with_defaults(self, settings):
        assert settings.n_permutations == 1000
        assert settings.n_jobs == 1

    def test_learner_defaults(self, settings):
        assert settings.logistic_max_iterations == 100
        assert settings.logistic_tolerance == 1e-8
        assert settings.logistic_ridge == 1e-6
        assert settings.forest_n_trees == 200
        assert settings.forest_max_depth == 8
        assert settings.forest_min_leaf == 5
        assert settings.forest_features_per_split is None

    def test_adjustment_and_power_defaults(self, settings):
        assert settings.propensity_clip == 1e-3
        assert settings.max_categorical_levels == 10
        assert settings.alpha_max == 0.15
        assert settings.alpha_step == 0.005

    def test_env_prefix(self, monkeypatch, tmp_path):
        from config.settings import Settings
        monkeypatch.setenv("CONFOUNDLAB_N_PERMUTATIONS", "250")
        s = Settings(_env_file=None, log_dir=tmp_path / "logs")
        assert s.n_permutations == 250


class TestSettingsValidation:
    def _make(self, tmp_path, **kwargs):
        from config.settings import Settings
        return Settings(_env_file=None, log_dir=tmp_path / "logs", **kwargs)

    def test_zero_permutations_raises(self, tmp_path):
        with pytest.raises(ValidationError, match="count"):
            self._make(tmp_path, n_permutations=0)

    def test_negative_depth_raises(self, tmp_path):
        with pytest.raises(ValidationError, match="forest_max_depth"):
            self._make(tmp_path, forest_max_depth=-1)

    def test_zero_tolerance_raises(self, tmp_path):
        with pytest.raises(ValidationError, match="logistic_tolerance"):
            self._make(tmp_path, logistic_tolerance=0.0)

    def test_negative_ridge_raises(self, tmp_path):
        with pytest.raises(ValidationError, match="logistic_ridge"):
            self._make(tmp_path, logistic_ridge=-1.0)

    @pytest.mark.parametrize("clip", [0.0, 0.5, 0.7])
    def test_clip_out_of_range_raises(self, tmp_path, clip):
        with pytest.raises(ValidationError, match="propensity_clip"):
            self._make(tmp_path, propensity_clip=clip)

    def test_alpha_step_above_max_raises(self, tmp_path):
        with pytest.raises(ValidationError, match="alpha grid"):
            self._make(tmp_path, alpha_step=0.2, alpha_max=0.1)

    def test_log_dir_parent_created(self, tmp_path):
        s = self._make(tmp_path)
        assert Path(s.log_dir).parent.exists()


class TestGetSettings:
    def test_cached(self, monkeypatch):
        import config.settings as module
        monkeypatch.setattr(module, "_settings_instance", None)
        first = module.get_settings()
        assert module.get_settings() is first
