"""Built-in classifiers behind one fit/score interface."""

import numpy as np

from config.exceptions import ConfoundLabError, LearnerFitError
from learners.base_learner import LearnerModel
from learners.forest import DecisionTree, ForestModel, fit_forest
from learners.logistic import LogisticModel, fit_logistic
from learners.model_io import format_model, load_model, parse_model, save_model
from models.enums import LearnerKind
from models.learner import LearnerSpec


def fit_learner(spec: LearnerSpec, X, y, w=None) -> LearnerModel:
    """Fit the learner named by ``spec`` with its frozen hyperparameters."""
    try:
        if spec.kind is LearnerKind.LOGISTIC:
            return fit_logistic(X, y, w, spec.logistic)
        return fit_forest(X, y, w, spec.forest)
    except ConfoundLabError:
        raise
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as e:
        raise LearnerFitError(f"{spec.kind.value} fit failed: {e}") from e


def predict_proba(model: LearnerModel, X) -> np.ndarray:
    return model.predict_proba(X)


__all__ = [
    "DecisionTree",
    "ForestModel",
    "LearnerModel",
    "LogisticModel",
    "fit_forest",
    "fit_learner",
    "fit_logistic",
    "format_model",
    "load_model",
    "parse_model",
    "predict_proba",
    "save_model",
]
