"""Configuration settings loaded from .env file."""

from pathlib import Path
from typing import Optional

from pydantic import field_validator, model_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application defaults, loaded from .env file (prefix CONFOUNDLAB_).

    Run-specific values (paths, seed, metric) come from the run config;
    everything here is a default that a run config or CLI flag may override.
    """

    # Permutation engine
    n_permutations: int = 1000
    n_jobs: int = 1

    # Logistic regression (IRLS)
    logistic_max_iterations: int = 100
    logistic_tolerance: float = 1e-8
    logistic_ridge: float = 1e-6

    # Random forest
    forest_n_trees: int = 200
    forest_max_depth: int = 8
    forest_min_leaf: int = 5
    forest_features_per_split: Optional[int] = None  # None -> ceil(sqrt(p))
    forest_seed: int = 0

    # Adjustment
    propensity_clip: float = 1e-3

    # Data ingestion
    max_categorical_levels: int = 10

    # Power experiments
    alpha_max: float = 0.15
    alpha_step: float = 0.005
    replicates: int = 200

    # Logging
    log_dir: Path = Path("./data/logs")

    model_config = {
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "env_prefix": "CONFOUNDLAB_",
        "extra": "ignore",
    }

    @field_validator(
        "n_permutations", "logistic_max_iterations", "forest_n_trees",
        "forest_min_leaf", "replicates", "max_categorical_levels",
    )
    @classmethod
    def validate_positive_count(cls, v: int) -> int:
        if v < 1:
            raise ValueError("count must be >= 1")
        return v

    @field_validator("forest_max_depth")
    @classmethod
    def validate_depth(cls, v: int) -> int:
        if v < 0:
            raise ValueError("forest_max_depth must be >= 0")
        return v

    @field_validator("logistic_tolerance")
    @classmethod
    def validate_tolerance(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("logistic_tolerance must be > 0")
        return v

    @field_validator("logistic_ridge")
    @classmethod
    def validate_ridge(cls, v: float) -> float:
        if v < 0:
            raise ValueError("logistic_ridge must be >= 0")
        return v

    @field_validator("propensity_clip")
    @classmethod
    def validate_clip(cls, v: float) -> float:
        if not 0 < v < 0.5:
            raise ValueError("propensity_clip must lie in (0, 0.5)")
        return v

    @field_validator("log_dir")
    @classmethod
    def ensure_parent_dirs(cls, v: Path) -> Path:
        v.parent.mkdir(parents=True, exist_ok=True)
        return v

    @model_validator(mode="after")
    def validate_alpha_grid(self) -> "Settings":
        if not 0 < self.alpha_step <= self.alpha_max <= 1:
            raise ValueError(
                f"alpha grid requires 0 < alpha_step ({self.alpha_step}) <= "
                f"alpha_max ({self.alpha_max}) <= 1"
            )
        return self


_settings_instance: Settings | None = None


def get_settings() -> Settings:
    """Get cached settings instance."""
    global _settings_instance
    if _settings_instance is None:
        _settings_instance = Settings()
    return _settings_instance
