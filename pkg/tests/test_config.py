"""Tests for grid and limit configuration.

These tests cover defaults, validation and loading from FUZZY_LIMIT_* variables.
"""

import warnings

import numpy as np
import pytest

from fuzzylimit.config import AlphaGridConfig, LimitConfig
from fuzzylimit.exceptions import ConfigurationError

ENV_VARS = (
    "FUZZY_LIMIT_LEVELS",
    "FUZZY_LIMIT_H0",
    "FUZZY_LIMIT_RATIO",
    "FUZZY_LIMIT_MAX_STEPS",
    "FUZZY_LIMIT_TOL",
    "FUZZY_LIMIT_BLOWUP",
)


@pytest.fixture
def clean_env(monkeypatch):
    """Remove every FUZZY_LIMIT_* variable for the duration of a test."""
    for name in ENV_VARS:
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


class TestAlphaGridConfig:
    """Test cases for the α-grid."""

    def test_default_grid_levels(self):
        """Default grid stores 0.01, 0.02, ..., 1.0."""
        grid = AlphaGridConfig()
        alphas = grid.alphas()

        assert grid.size == 100
        assert alphas[0] == pytest.approx(0.01)
        assert alphas[-1] == 1.0
        assert 0.5 in alphas

    def test_small_grid(self):
        """Three partition points store α = 0.5 and α = 1."""
        np.testing.assert_array_equal(AlphaGridConfig(levels=3).alphas(), [0.5, 1.0])

    def test_alphas_strictly_increasing(self):
        alphas = AlphaGridConfig(levels=11).alphas()
        assert np.all(np.diff(alphas) > 0)

    def test_too_few_levels(self):
        """Fewer than three partition points is rejected."""
        with pytest.raises(ConfigurationError, match="at least 3"):
            AlphaGridConfig(levels=2).validate()

    def test_from_env(self, clean_env):
        clean_env.setenv("FUZZY_LIMIT_LEVELS", "11")
        assert AlphaGridConfig.from_env().levels == 11

    def test_from_env_not_an_integer(self, clean_env):
        clean_env.setenv("FUZZY_LIMIT_LEVELS", "many")
        with pytest.raises(ConfigurationError, match="integer"):
            AlphaGridConfig.from_env()


class TestLimitConfig:
    """Test cases for the limit schedule configuration."""

    # ====================================================================
    # Tests: defaults
    # ====================================================================

    def test_defaults(self):
        """Defaults are h0=0.1, ratio=0.5, 60 steps, tol=1e-6, blowup=1e12."""
        config = LimitConfig()

        assert config.h0 == 0.1
        assert config.ratio == 0.5
        assert config.max_steps == 60
        assert config.tol == 1e-6
        assert config.blowup == 1e12
        assert config.grid.levels == 101
        config.validate()

    def test_suite_tolerance_is_twice_tol(self):
        assert LimitConfig(tol=1e-5).suite_tolerance == pytest.approx(2e-5)

    def test_with_schedule_and_grid(self):
        """Copies change only the requested fields."""
        config = LimitConfig().with_schedule(0.05, 0.7).with_grid(11)

        assert (config.h0, config.ratio) == (0.05, 0.7)
        assert config.grid.levels == 11
        assert config.tol == 1e-6

    # ====================================================================
    # Tests: validate
    # ====================================================================

    @pytest.mark.parametrize(
        "kwargs, message",
        [
            ({"h0": 0.0}, "h0"),
            ({"ratio": 1.5}, "ratio"),
            ({"ratio": 0.0}, "ratio"),
            ({"max_steps": 3}, "max_steps"),
            ({"tol": -1.0}, "tol"),
            ({"blowup": 0.0}, "blowup"),
            ({"certify_probes": 1}, "certify_probes"),
        ],
    )
    def test_validate_rejects(self, kwargs, message):
        with pytest.raises(ConfigurationError, match=message):
            LimitConfig(**kwargs).validate()

    def test_short_schedule_warns(self):
        """A schedule that never gets below tol warns instead of failing."""
        with pytest.warns(RuntimeWarning, match="never resolves"):
            LimitConfig(max_steps=5).validate()

    def test_tol_below_machine_epsilon_warns(self):
        with pytest.warns(RuntimeWarning, match="machine epsilon"):
            LimitConfig(tol=1e-17).validate()

    def test_defaults_do_not_warn(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            LimitConfig().validate()
            LimitConfig(tol=1e-12).validate()

    # ====================================================================
    # Tests: from_env
    # ====================================================================

    def test_from_env_defaults(self, clean_env):
        assert LimitConfig.from_env() == LimitConfig()

    def test_from_env_reads_variables(self, clean_env):
        """Every FUZZY_LIMIT_* variable is honoured."""
        clean_env.setenv("FUZZY_LIMIT_H0", "0.2")
        clean_env.setenv("FUZZY_LIMIT_RATIO", "0.25")
        clean_env.setenv("FUZZY_LIMIT_MAX_STEPS", "40")
        clean_env.setenv("FUZZY_LIMIT_TOL", "1e-8")
        clean_env.setenv("FUZZY_LIMIT_BLOWUP", "1e10")
        clean_env.setenv("FUZZY_LIMIT_LEVELS", "21")

        config = LimitConfig.from_env()

        assert config.h0 == 0.2
        assert config.ratio == 0.25
        assert config.max_steps == 40
        assert config.tol == 1e-8
        assert config.blowup == 1e10
        assert config.grid.levels == 21

    def test_from_env_invalid_number(self, clean_env):
        clean_env.setenv("FUZZY_LIMIT_TOL", "tiny")
        with pytest.raises(ConfigurationError, match="FUZZY_LIMIT_"):
            LimitConfig.from_env()

    def test_from_env_invalid_value(self, clean_env):
        """Parsable but invalid values fail validation."""
        clean_env.setenv("FUZZY_LIMIT_RATIO", "2")
        with pytest.raises(ConfigurationError, match="ratio"):
            LimitConfig.from_env()
