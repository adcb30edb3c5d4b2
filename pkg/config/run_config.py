"""Per-run configuration: ``key = value`` file plus CLI overrides.

Recognized keys::

    input, train, test, output_dir
    label, features (comma list or *), confounders (comma list), weight
    discretize.<column> = 18..44, 45..65, 66..99
    test_fraction, seed, b, metric, learner, reference
    adjust, propensity_confounders, resample_size
    target_joint, baseline_train_size, n_jobs
    experiment, replicates, alpha_max, alpha_step
    scenario.<name>.<field>   (joint, n_samples, n_features, beta_y, beta_c,
                               test_fraction, b, seed)
    sweep_column, sweep_levels, sweep_extra
"""

import logging
from pathlib import Path
from typing import Any, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, Field, ValidationError as PydanticValidationError, field_validator

from config.exceptions import InvalidConfigError
from config.settings import Settings, get_settings
from models.dataset import ColumnSchema, DiscretizationSpec
from models.enums import AdjustMethod, ExperimentKind, LearnerKind, MetricKind, ReferenceMode
from models.learner import LearnerSpec

logger = logging.getLogger(__name__)

SCENARIO_FIELDS = {"joint", "n_samples", "n_features", "beta_y", "beta_c", "test_fraction", "b", "seed"}

# Inputs each command needs; a tuple lists alternatives.
_REQUIRED_INPUTS = {
    "split": (("input",),),
    "adjust": (("input",), ("train", "test")),
    "analyze": (("train", "test"), ("input",)),
    "sweep": (("train", "test"), ("input",)),
}


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class RunConfig(BaseModel):
    """Validated settings for one CLI command."""

    command: str = ""

    input: Optional[Path] = None
    train: Optional[Path] = None
    test: Optional[Path] = None
    output_dir: Path = Path("./out")

    label: str = "label"
    features: Optional[list[str]] = None
    confounders: list[str] = Field(default_factory=list)
    weight: Optional[str] = None
    discretize: dict[str, str] = Field(default_factory=dict)

    test_fraction: float = 0.3
    seed: Optional[int] = None
    b: int = 1000
    metric: MetricKind = MetricKind.AUC
    learner: LearnerKind = LearnerKind.LOGISTIC
    reference: ReferenceMode = ReferenceMode.BOTH

    adjust: Optional[AdjustMethod] = None
    propensity_confounders: Optional[list[str]] = None
    resample_size: Optional[int] = None

    target_joint: Optional[Path] = None
    baseline_train_size: Optional[int] = None
    n_jobs: int = 1

    experiment: ExperimentKind = ExperimentKind.POWER
    replicates: int = 200
    alpha_max: float = 0.15
    alpha_step: float = 0.005
    scenario: dict[str, dict[str, str]] = Field(default_factory=dict)

    sweep_column: Optional[str] = None
    sweep_levels: list[int] = Field(default_factory=lambda: [2, 3, 4, 5])
    sweep_extra: Optional[str] = None

    @field_validator("confounders", "propensity_confounders", "sweep_levels", mode="before")
    @classmethod
    def split_lists(cls, v: Any) -> Any:
        return _split_list(v)

    @field_validator("features", mode="before")
    @classmethod
    def parse_features(cls, v: Any) -> Any:
        if isinstance(v, str) and v.strip() == "*":
            return None
        return _split_list(v)

    @field_validator("seed")
    @classmethod
    def validate_seed(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 0:
            raise ValueError("seed must be >= 0")
        return v

    @field_validator("b", "replicates", "n_jobs")
    @classmethod
    def validate_count(cls, v: int) -> int:
        if v == 0 or v < -1:
            raise ValueError("must be >= 1 (n_jobs may be -1 for all cores)")
        return v

    @field_validator("test_fraction")
    @classmethod
    def validate_fraction(cls, v: float) -> float:
        if not 0 < v < 1:
            raise ValueError("test_fraction must lie in (0, 1)")
        return v

    # ---- Derived objects ----

    def to_schema(self) -> ColumnSchema:
        if not self.confounders:
            raise InvalidConfigError("No confounder columns configured (key: confounders)")
        specs = {col: DiscretizationSpec.from_string(text) for col, text in self.discretize.items()}
        return ColumnSchema(
            label=self.label,
            confounders=tuple(self.confounders),
            features=None if self.features is None else tuple(self.features),
            weight=self.weight,
            discretize=specs,
        )

    def learner_spec(self, settings: Optional[Settings] = None) -> LearnerSpec:
        return LearnerSpec.from_settings(settings or get_settings(), self.learner)

    def scenarios(self) -> list:
        """Scenarios from ``scenario.*`` keys, else the defaults for ``experiment``."""
        from workflow.simulation import default_power_scenarios, default_type1_scenarios
        from models.scenario import SimScenario

        if not self.scenario:
            if self.experiment is ExperimentKind.TYPE1:
                return default_type1_scenarios()
            return default_power_scenarios()

        out = []
        for name, fields in self.scenario.items():
            unknown = set(fields) - SCENARIO_FIELDS
            if unknown:
                raise InvalidConfigError("Unknown scenario field", {"scenario": name, "fields": sorted(unknown)})
            if "joint" not in fields:
                raise InvalidConfigError("Scenario needs a joint table", {"scenario": name})
            try:
                cells = [float(x) for x in _split_list(fields["joint"])]
                kwargs: dict[str, Any] = {"joint": [cells[0:2], cells[2:4]]}
                for key in ("n_samples", "n_features", "b", "seed"):
                    if key in fields:
                        kwargs[key] = int(fields[key])
                for key in ("beta_y", "beta_c", "test_fraction"):
                    if key in fields:
                        kwargs[key] = float(fields[key])
            except (ValueError, IndexError) as e:
                raise InvalidConfigError(f"Bad scenario value: {e}", {"scenario": name}) from e
            out.append(SimScenario(name=name, **kwargs))
        return out

    def require(self, command: str) -> None:
        """Check the seed and that every input path the command needs exists."""
        if self.seed is None:
            raise InvalidConfigError("A seed is required", {"command": command})
        alternatives = _REQUIRED_INPUTS.get(command)
        if alternatives:
            for keys in alternatives:
                if all(getattr(self, k) is not None for k in keys):
                    break
            else:
                options = " or ".join("+".join(keys) for keys in alternatives)
                raise InvalidConfigError(f"{command} needs {options}", {"command": command})
        for key in ("input", "train", "test", "target_joint"):
            path = getattr(self, key)
            if path is not None and not Path(path).exists():
                raise InvalidConfigError("Path does not exist", {"key": key, "path": str(path)})


def _nest(raw: dict[str, Optional[str]]) -> dict[str, Any]:
    data: dict[str, Any] = {}
    for key, value in raw.items():
        if value is None:
            continue
        if key.startswith("discretize."):
            data.setdefault("discretize", {})[key.split(".", 1)[1]] = value
        elif key.startswith("scenario."):
            parts = key.split(".")
            if len(parts) != 3:
                raise InvalidConfigError("Scenario keys look like scenario.<name>.<field>", {"key": key})
            data.setdefault("scenario", {}).setdefault(parts[1], {})[parts[2]] = value
        else:
            data[key] = value
    return data


def load_run_config(
    path: Optional[str | Path] = None,
    overrides: Optional[dict[str, Any]] = None,
    settings: Optional[Settings] = None,
) -> RunConfig:
    """Merge settings defaults, the config file, then non-None overrides."""
    settings = settings or get_settings()
    data: dict[str, Any] = {
        "b": settings.n_permutations,
        "n_jobs": settings.n_jobs,
        "replicates": settings.replicates,
        "alpha_max": settings.alpha_max,
        "alpha_step": settings.alpha_step,
    }
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise InvalidConfigError("Config file not found", {"path": str(path)})
        data.update(_nest(dotenv_values(path)))
        logger.debug("Loaded run config %s", path)
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return RunConfig(**data)
    except PydanticValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(p) for p in first.get("loc", ()))
        raise InvalidConfigError(f"Invalid config value: {first.get('msg')}", {"key": field}) from e
