"""Shared learner infrastructure: feature standardization, hyperparameter
resolution and validation, and the fitted-model wrapper behind the public
fit/predict functions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

LEARNER_KINDS = (
    "knn",
    "naive_bayes",
    "logistic_regression",
    "decision_tree",
    "random_forest",
    "mlp",
    "svm",
)


@dataclass(frozen=True)
class Standardizer:
    """Per-feature z-scoring fitted on training data.

    Columns with zero training variance are mapped to constant 0 for any
    input (they carry no information and would otherwise blow up the scale).
    """

    mean: np.ndarray
    std: np.ndarray
    zero_variance: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray) -> "Standardizer":
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        zero = std == 0
        return cls(mean, np.where(zero, 1.0, std), zero)

    def transform(self, x: np.ndarray) -> np.ndarray:
        z = (x - self.mean) / self.std
        z[:, self.zero_variance] = 0.0
        return z


_TREE_PARAM_DEFAULTS: dict[str, Any] = {
    "criterion": "gini",
    "max_features": None,
    "max_leaf_nodes": None,
    "min_samples_split": 2,
    "min_samples_leaf": 1,
}

PARAM_DEFAULTS: dict[str, dict[str, Any]] = {
    "knn": {"k": 5},
    "naive_bayes": {"var_smoothing": 1e-9},
    "logistic_regression": {"penalty": "l2", "C": 1.0, "max_iter": 2000},
    "decision_tree": dict(_TREE_PARAM_DEFAULTS),
    "random_forest": {"n_estimators": 100, **_TREE_PARAM_DEFAULTS},
    "mlp": {"hidden_units": 32, "learning_rate": 0.01, "epochs": 500},
    "svm": {"kernel": "rbf", "C": 1.0, "gamma": "scale", "degree": 3},
}


def _require(ok: bool, message: str) -> None:
    if not ok:
        raise ValueError(message)


def _check_param(kind: str, name: str, value: Any) -> None:
    if name == "k":
        _require(isinstance(value, int) and value >= 1, f"{kind}.k must be an int >= 1")
    elif name == "var_smoothing":
        _require(float(value) > 0, "naive_bayes.var_smoothing must be > 0")
    elif name == "penalty":
        _require(value in ("l2", "none"), "logistic_regression.penalty must be 'l2' or 'none'")
    elif name == "C":
        _require(float(value) > 0, f"{kind}.C must be > 0")
    elif name == "max_iter":
        _require(isinstance(value, int) and value >= 1, f"{kind}.max_iter must be an int >= 1")
    elif name == "criterion":
        _require(value in ("gini", "gain_ratio"), f"{kind}.criterion must be 'gini' or 'gain_ratio'")
    elif name == "max_features":
        _require(
            value is None or (isinstance(value, int) and value >= 1),
            f"{kind}.max_features must be None or an int >= 1",
        )
    elif name == "max_leaf_nodes":
        _require(
            value is None or (isinstance(value, int) and value >= 2),
            f"{kind}.max_leaf_nodes must be None or an int >= 2",
        )
    elif name == "min_samples_split":
        _require(isinstance(value, int) and value >= 2, f"{kind}.min_samples_split must be an int >= 2")
    elif name == "min_samples_leaf":
        _require(isinstance(value, int) and value >= 1, f"{kind}.min_samples_leaf must be an int >= 1")
    elif name == "n_estimators":
        _require(isinstance(value, int) and value >= 1, "random_forest.n_estimators must be an int >= 1")
    elif name == "hidden_units":
        _require(isinstance(value, int) and value >= 1, "mlp.hidden_units must be an int >= 1")
    elif name == "learning_rate":
        _require(float(value) > 0, "mlp.learning_rate must be > 0")
    elif name == "epochs":
        _require(isinstance(value, int) and value >= 1, "mlp.epochs must be an int >= 1")
    elif name == "kernel":
        _require(value in ("linear", "rbf", "poly"), "svm.kernel must be 'linear', 'rbf' or 'poly'")
    elif name == "gamma":
        _require(
            value == "scale" or float(value) > 0,
            "svm.gamma must be 'scale' or a positive number",
        )
    elif name == "degree":
        _require(isinstance(value, int) and value >= 1, "svm.degree must be an int >= 1")


def resolve_params(kind: str, params: dict | None) -> dict:
    """Fill defaults and validate; unknown kinds or parameter names raise."""
    if kind not in PARAM_DEFAULTS:
        raise ValueError(f"unknown learner kind {kind!r}; expected one of {LEARNER_KINDS}")
    resolved = dict(PARAM_DEFAULTS[kind])
    for name, value in (params or {}).items():
        if name not in resolved:
            raise ValueError(f"illegal parameter {name!r} for learner kind {kind!r}")
        resolved[name] = value
    for name, value in resolved.items():
        _check_param(kind, name, value)
    return resolved


@dataclass
class FittedModel:
    """A trained classifier: kind, resolved hyperparameters, the training
    standardizer, and the kind-specific trained state."""

    kind: str
    params: dict
    standardizer: Standardizer
    inner: Any
    n_features: int

    @property
    def decision_threshold(self) -> float:
        return self.inner.decision_threshold


def _build(kind: str, params: dict):
    # Local imports keep module import light and avoid cycles.
    if kind == "knn":
        from ._knn import KnnClassifier

        return KnnClassifier(k=params["k"])
    if kind == "naive_bayes":
        from ._naive_bayes import GaussianNaiveBayes

        return GaussianNaiveBayes(var_smoothing=float(params["var_smoothing"]))
    if kind == "logistic_regression":
        from ._linear import LogisticRegressionGD

        return LogisticRegressionGD(
            penalty=params["penalty"], C=float(params["C"]), max_iter=params["max_iter"]
        )
    if kind == "decision_tree":
        from ._tree import DecisionTree

        return DecisionTree(
            criterion=params["criterion"],
            max_features=params["max_features"],
            max_leaf_nodes=params["max_leaf_nodes"],
            min_samples_split=params["min_samples_split"],
            min_samples_leaf=params["min_samples_leaf"],
        )
    if kind == "random_forest":
        from ._forest import RandomForest

        return RandomForest(
            n_estimators=params["n_estimators"],
            criterion=params["criterion"],
            max_leaf_nodes=params["max_leaf_nodes"],
            min_samples_split=params["min_samples_split"],
            min_samples_leaf=params["min_samples_leaf"],
        )
    if kind == "mlp":
        from ._mlp import Mlp

        return Mlp(
            hidden_units=params["hidden_units"],
            learning_rate=float(params["learning_rate"]),
            epochs=params["epochs"],
        )
    if kind == "svm":
        from ._svm import SvmSmo

        return SvmSmo(
            kernel=params["kernel"],
            C=float(params["C"]),
            gamma=params["gamma"],
            degree=params["degree"],
        )
    raise ValueError(f"unknown learner kind {kind!r}")


def fit(kind: str, params: dict | None, x, y, seed: int) -> FittedModel:
    """Train one classifier. Features are z-scored with statistics fitted
    here and reapplied by every later prediction; all randomness flows from
    `seed`."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=int).ravel()
    if x.ndim != 2 or x.shape[0] == 0 or x.shape[1] == 0:
        raise ValueError("training matrix must be 2-D and non-empty")
    if y.shape[0] != x.shape[0]:
        raise ValueError("labels length must match the training row count")
    if not (np.any(y == 0) and np.any(y == 1)):
        raise ValueError("training labels must contain both classes")
    resolved = resolve_params(kind, params)
    standardizer = Standardizer.fit(x)
    z = standardizer.transform(x)
    rng = np.random.default_rng(seed)
    inner = _build(kind, resolved).fit(z, y, rng)
    return FittedModel(kind, resolved, standardizer, inner, x.shape[1])


def _check_matrix(model: FittedModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError("prediction input must be a 2-D matrix")
    if x.shape[1] != model.n_features:
        raise ValueError(
            f"column count mismatch: model was trained on {model.n_features} "
            f"features, got {x.shape[1]}"
        )
    return x


def predict_score(model: FittedModel, x) -> np.ndarray:
    """Positive-class score per row; higher means more confidently smelly."""
    z = model.standardizer.transform(_check_matrix(model, x))
    return np.asarray(model.inner.score(z), dtype=float)


def predict_label(model: FittedModel, x) -> np.ndarray:
    """Binary labels: scores at or above the kind's threshold become 1."""
    return (predict_score(model, x) >= model.decision_threshold).astype(int)
