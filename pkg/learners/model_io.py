"""Plain-text model export and import.

Format (one ``key = value`` per line, floats in round-trip repr)::

    # confoundlab model v1
    kind = logistic
    n_features = 2
    intercept = 0.25
    coefficients = 1.5 -0.75

Forests list each tree as a header line followed by its nodes::

    kind = forest
    n_features = 2
    n_trees = 1
    tree = 3
    0 0.5 1 2 0.4
    -1 0.0 -1 -1 0.0
    -1 0.0 -1 -1 1.0

Node columns: feature, threshold, left, right, value (feature -1 = leaf).
"""

from pathlib import Path

import numpy as np

from config.exceptions import ValidationError
from learners.base_learner import LearnerModel
from learners.forest import DecisionTree, ForestModel
from learners.logistic import LogisticModel
from models.enums import LearnerKind

HEADER = "# confoundlab model v1"


def _floats(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def format_model(model: LearnerModel) -> str:
    lines = [HEADER, f"kind = {model.kind.value}", f"n_features = {model.n_features}"]
    if isinstance(model, LogisticModel):
        lines.append(f"intercept = {model.intercept!r}")
        lines.append(f"coefficients = {_floats(model.coefficients)}")
    elif isinstance(model, ForestModel):
        lines.append(f"n_trees = {len(model.trees)}")
        for tree in model.trees:
            lines.append(f"tree = {tree.n_nodes}")
            for i in range(tree.n_nodes):
                lines.append(
                    f"{int(tree.feature[i])} {float(tree.threshold[i])!r} "
                    f"{int(tree.left[i])} {int(tree.right[i])} {float(tree.value[i])!r}"
                )
    else:
        raise ValidationError("Unknown model type", {"type": type(model).__name__})
    return "\n".join(lines) + "\n"


def _key_value(line: str, expected: str) -> str:
    key, sep, value = line.partition("=")
    if not sep or key.strip() != expected:
        raise ValidationError("Malformed model file", {"expected": expected, "line": line})
    return value.strip()


def parse_model(text: str) -> LearnerModel:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln and not ln.startswith("#")]
    if len(lines) < 2:
        raise ValidationError("Model file is truncated")
    kind = LearnerKind(_key_value(lines[0], "kind"))
    n_features = int(_key_value(lines[1], "n_features"))

    if kind is LearnerKind.LOGISTIC:
        intercept = float(_key_value(lines[2], "intercept"))
        coefficients = np.array(_key_value(lines[3], "coefficients").split(), dtype=np.float64)
        if coefficients.size != n_features:
            raise ValidationError("Coefficient count does not match n_features")
        return LogisticModel(intercept=intercept, coefficients=coefficients)

    n_trees = int(_key_value(lines[2], "n_trees"))
    pos = 3
    trees = []
    for _ in range(n_trees):
        n_nodes = int(_key_value(lines[pos], "tree"))
        rows = [ln.split() for ln in lines[pos + 1: pos + 1 + n_nodes]]
        if len(rows) != n_nodes or any(len(r) != 5 for r in rows):
            raise ValidationError("Malformed tree block", {"tree": len(trees)})
        cols = list(zip(*rows))
        trees.append(DecisionTree(
            feature=np.array(cols[0], dtype=np.int64),
            threshold=np.array(cols[1], dtype=np.float64),
            left=np.array(cols[2], dtype=np.int64),
            right=np.array(cols[3], dtype=np.int64),
            value=np.array(cols[4], dtype=np.float64),
        ))
        pos += 1 + n_nodes
    return ForestModel(trees=tuple(trees), n_features=n_features)


def save_model(model: LearnerModel, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_model(model), encoding="utf-8")
    return path


def load_model(path: str | Path) -> LearnerModel:
    return parse_model(Path(path).read_text(encoding="utf-8"))
