"""
Configuration module for the fuzzy limit toolkit.

Provides the α-grid and limit-schedule configuration classes and factory
methods for creating them from the environment.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from fuzzylimit.exceptions import ConfigurationError

# Try to load .env file if python-dotenv is available
try:
    from dotenv import load_dotenv

    env_path = Path(".env")
    if not env_path.exists():
        env_path = Path(__file__).parent.parent / ".env"
    if env_path.exists():
        load_dotenv(env_path)
except ImportError:
    # python-dotenv not installed, skip
    pass


DEFAULT_LEVELS = 101
# Magnitude of the values a limit is typically computed at; tol must stay above
# the float spacing there.
TYPICAL_SCALE = 1.0


@dataclass(frozen=True)
class AlphaGridConfig:
    """Uniform α-grid used to store fuzzy numbers.

    ``levels`` counts the points of the uniform partition of [0, 1]; α = 0 is
    never stored, so the default of 101 yields the levels 0.01, 0.02, ..., 1.0.

    Attributes:
        levels: Number of partition points of [0, 1] (at least 3)
    """

    levels: int = DEFAULT_LEVELS

    def alphas(self) -> np.ndarray:
        """Return the stored α-levels in increasing order, ending at 1.0."""
        n = self.levels - 1
        return np.arange(1, n + 1, dtype=float) / n

    @property
    def size(self) -> int:
        """Number of stored α-levels."""
        return self.levels - 1

    @classmethod
    def from_env(cls) -> "AlphaGridConfig":
        """Create a grid from FUZZY_LIMIT_LEVELS (default: 101)."""
        raw = os.getenv("FUZZY_LIMIT_LEVELS")
        if not raw:
            return cls()
        try:
            levels = int(raw)
        except ValueError:
            raise ConfigurationError(f"FUZZY_LIMIT_LEVELS must be an integer, got {raw!r}")
        grid = cls(levels=levels)
        grid.validate()
        return grid

    def validate(self) -> None:
        """Validate configuration.

        Raises:
            ConfigurationError: If fewer than two levels would be stored
        """
        if self.levels < 3:
            raise ConfigurationError(
                f"grid needs at least 3 partition points (2 stored levels), got {self.levels}"
            )


@dataclass(frozen=True)
class LimitConfig:
    """Schedule and tolerances of the numerical limit engine.

    Attributes:
        h0: Initial offset from a finite target (its inverse seeds the infinity schedule)
        ratio: Geometric shrink factor of the offset schedule
        max_steps: Number of schedule steps before giving up
        tol: Convergence tolerance on the endpoint residual norm
        blowup: Threshold beyond which bounds count as diverging
        grid: α-grid the limit is assembled on
        certify_probes: Number of log-spaced probes per certificate witness
    """

    h0: float = 0.1
    ratio: float = 0.5
    max_steps: int = 60
    tol: float = 1e-6
    blowup: float = 1e12
    grid: AlphaGridConfig = field(default_factory=AlphaGridConfig)
    certify_probes: int = 32

    @property
    def suite_tolerance(self) -> float:
        """Tolerance for identities whose both sides carry truncation error."""
        return 2.0 * self.tol

    def with_schedule(self, h0: float, ratio: float) -> "LimitConfig":
        """Return a copy of this config using another offset schedule."""
        return replace(self, h0=h0, ratio=ratio)

    def with_grid(self, levels: int) -> "LimitConfig":
        """Return a copy of this config on another α-grid."""
        return replace(self, grid=AlphaGridConfig(levels=levels))

    @classmethod
    def from_env(cls) -> "LimitConfig":
        """Create configuration from environment variables.

        Environment Variables:
            FUZZY_LIMIT_LEVELS: α-grid partition size (default: 101)
            FUZZY_LIMIT_H0: Initial offset (default: 0.1)
            FUZZY_LIMIT_RATIO: Schedule ratio (default: 0.5)
            FUZZY_LIMIT_MAX_STEPS: Schedule length (default: 60)
            FUZZY_LIMIT_TOL: Convergence tolerance (default: 1e-6)
            FUZZY_LIMIT_BLOWUP: Divergence threshold (default: 1e12)

        Returns:
            LimitConfig instance with values from environment

        Raises:
            ConfigurationError: If a variable does not parse or the result is invalid
        """
        try:
            config = cls(
                h0=float(os.getenv("FUZZY_LIMIT_H0", "0.1")),
                ratio=float(os.getenv("FUZZY_LIMIT_RATIO", "0.5")),
                max_steps=int(os.getenv("FUZZY_LIMIT_MAX_STEPS", "60")),
                tol=float(os.getenv("FUZZY_LIMIT_TOL", "1e-6")),
                blowup=float(os.getenv("FUZZY_LIMIT_BLOWUP", "1e12")),
                grid=AlphaGridConfig.from_env(),
            )
        except ValueError as e:
            raise ConfigurationError(f"Invalid FUZZY_LIMIT_* environment value: {e}")
        config.validate()
        return config

    def validate(self) -> None:
        """Validate configuration.

        Raises:
            ConfigurationError: If configuration is invalid
        """
        self.grid.validate()
        if not self.h0 > 0:
            raise ConfigurationError(f"h0 must be positive, got {self.h0}")
        if not 0 < self.ratio < 1:
            raise ConfigurationError(f"ratio must lie in (0, 1), got {self.ratio}")
        if self.max_steps < 4:
            raise ConfigurationError(f"max_steps must be at least 4, got {self.max_steps}")
        if not self.tol > 0:
            raise ConfigurationError(f"tol must be positive, got {self.tol}")
        if not self.blowup > 0:
            raise ConfigurationError(f"blowup must be positive, got {self.blowup}")
        if self.certify_probes < 2:
            raise ConfigurationError("certify_probes must be at least 2")
        resolution = float(np.finfo(float).eps) * TYPICAL_SCALE
        if self.tol <= resolution:
            warnings.warn(
                f"tol={self.tol:g} does not exceed machine epsilon at scale {TYPICAL_SCALE:g} "
                f"({resolution:.3g}); residuals that small are rounding noise",
                RuntimeWarning,
            )
        final = self.h0 * self.ratio**self.max_steps
        if final >= self.tol:
            warnings.warn(
                f"schedule ends at offset {final:.3g}, "
                f"which never resolves tol={self.tol:g}",
                RuntimeWarning,
            )
