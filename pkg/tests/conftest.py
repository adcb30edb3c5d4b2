"""Shared pytest fixtures for the confoundlab test suite."""

import numpy as np
import pytest

from models.dataset import Dataset, LevelVector, SplitIndices
from models.enums import LearnerKind
from models.learner import ForestConfig, LearnerSpec


# ---------------------------------------------------------------------------
# Environment
# ---------------------------------------------------------------------------

@pytest.fixture(autouse=True)
def isolated_log_dir(tmp_path, monkeypatch):
    """Keep log files written by the CLI inside the test's tmp dir."""
    monkeypatch.setenv("CONFOUNDLAB_LOG_DIR", str(tmp_path / "logs"))
    return tmp_path / "logs"


# ---------------------------------------------------------------------------
# Settings fixture
# ---------------------------------------------------------------------------

@pytest.fixture
def settings(tmp_path):
    """Return a Settings instance with code defaults and logs under tmp_path."""
    from config.settings import Settings
    return Settings(_env_file=None, log_dir=tmp_path / "logs")


# ---------------------------------------------------------------------------
# Learners
# ---------------------------------------------------------------------------

@pytest.fixture
def logistic():
    return LearnerSpec(kind=LearnerKind.LOGISTIC)


@pytest.fixture
def small_forest():
    return LearnerSpec(
        kind=LearnerKind.FOREST,
        forest=ForestConfig(n_trees=5, max_depth=3, min_leaf=2, seed=3),
    )


# ---------------------------------------------------------------------------
# Sample data fixtures
# ---------------------------------------------------------------------------

def make_confounded(n: int = 400, beta_c: float = 1.0, beta_y: float = 0.0, seed: int = 0) -> Dataset:
    """Two-level confounder strongly associated with the label.

    Features carry the confounder effect ``beta_c`` and the label effect
    ``beta_y`` plus standard normal noise.
    """
    rng = np.random.default_rng(seed)
    c = (rng.random(n) < 0.5).astype(np.int64)
    y = (rng.random(n) < np.where(c == 1, 0.8, 0.2)).astype(np.int64)
    X = (beta_c * c + beta_y * y)[:, None] + rng.standard_normal((n, 3))
    return Dataset(
        features=X,
        labels=y,
        confounder=LevelVector(c, ("a", "b")),
        confounder_name="c",
    )


@pytest.fixture
def confounded():
    return make_confounded()


@pytest.fixture
def confounded_split(confounded):
    from tools.preprocessing import stratified_split
    return stratified_split(confounded, 0.5, seed=11)


@pytest.fixture
def tiny_dataset():
    """Eight rows, two levels, two features; every cell has two rows."""
    return Dataset(
        features=np.array([
            [0.1, 1.0], [0.4, 0.2], [0.35, 0.8], [0.8, 0.1],
            [0.2, 0.5], [0.9, 0.3], [0.6, 0.7], [0.05, 0.9],
        ]),
        labels=np.array([0, 0, 1, 1, 0, 0, 1, 1]),
        confounder=LevelVector(np.array([0, 0, 0, 0, 1, 1, 1, 1]), ("F", "M")),
        feature_names=("f1", "f2"),
        confounder_name="gender",
    )


@pytest.fixture
def tiny_split():
    return SplitIndices(train=np.array([0, 2, 4, 6]), test=np.array([1, 3, 5, 7]))


@pytest.fixture
def write_text(tmp_path):
    """Write ``text`` to ``tmp_path / name`` and return the path."""
    def _write(name: str, text: str):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return _write


@pytest.fixture
def confounded_factory():
    return make_confounded
