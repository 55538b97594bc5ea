"""Plain-text (JSON) model files.

Layout::

    {"format": "elt-model", "version": 1, "kind": "elt" | "ridge" | "elm" | "cart",
     "params": {...}, "classes": [...], "n_features": d,
     "standardization": {"mean": [...], "scale": [...]} | null,
     "parts": {...}, "metadata": {...}}

Floats are written with their shortest round-trip repr, so a loaded model
predicts exactly like the one that was saved. Trees are stored in their
one-node-per-line text form.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from sklearn.preprocessing import StandardScaler

from .feature_map import RandomFeatureMap
from .linalg import RidgeSolution
from .models import (
    CARTClassifier,
    ELMClassifier,
    ExtremeLearningTreeClassifier,
    RidgeRegressionClassifier,
)
from .tree import RandomTree

FORMAT = "elt-model"
VERSION = 1

_KINDS = {
    ExtremeLearningTreeClassifier: "elt",
    RidgeRegressionClassifier: "ridge",
    ELMClassifier: "elm",
    CARTClassifier: "cart",
}
_CLASSES = {v: k for k, v in _KINDS.items()}


def _fmap_dict(fmap: RandomFeatureMap) -> dict:
    return {
        "weights": fmap.weights.tolist(),
        "biases": fmap.biases.tolist(),
        "activation": fmap.activation,
        "seed": fmap.seed,
    }


def _fmap_from(d: dict) -> RandomFeatureMap:
    return RandomFeatureMap(
        np.array(d["weights"]), np.array(d["biases"]), d["activation"], d["seed"]
    )


def _ridge_dict(sol: RidgeSolution) -> dict:
    return {"beta": sol.beta.tolist(), "lambda": sol.lam}


def _ridge_from(d: dict) -> RidgeSolution:
    beta = np.array(d["beta"], dtype=np.float64)
    beta.setflags(write=False)
    return RidgeSolution(beta, float(d["lambda"]))


def _jsonable(v):
    if isinstance(v, tuple):
        return list(v)
    if isinstance(v, np.generic):
        return v.item()
    return v


def model_to_dict(model, metadata: dict | None = None) -> dict:
    kind = _KINDS.get(type(model))
    if kind is None:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    if not hasattr(model, "classes_"):
        raise ValueError("model is not fitted")
    scaler = getattr(model, "scaler_", None)
    if kind == "elt":
        parts = {
            "feature_map": _fmap_dict(model.feature_map_),
            "tree": model.tree_.to_text(),
            "observer": _ridge_dict(model.observer_),
        }
    elif kind == "ridge":
        parts = {"coef": _ridge_dict(model.coef_)}
    elif kind == "elm":
        parts = {
            "feature_map": _fmap_dict(model.feature_map_),
            "coef": _ridge_dict(model.coef_),
            "alpha": model.alpha_,
        }
    else:
        parts = {"tree": model.tree_.to_text(), "leaf_class": model.leaf_class_.tolist()}
    return {
        "format": FORMAT,
        "version": VERSION,
        "kind": kind,
        "params": {k: _jsonable(v) for k, v in model.get_params().items()},
        "classes": model.classes_.tolist(),
        "n_features": int(model.n_features_in_),
        "standardization": None if scaler is None else {
            "mean": scaler.mean_.tolist(),
            "scale": scaler.scale_.tolist(),
        },
        "parts": parts,
        "metadata": metadata or {},
    }


def model_from_dict(doc: dict):
    if doc.get("format") != FORMAT or doc.get("version") != VERSION:
        raise ValueError("not an elt-model version 1 document")
    kind = doc["kind"]
    if kind not in _CLASSES:
        raise ValueError(f"unknown model kind {kind!r}")
    params = dict(doc["params"])
    if "alpha_grid" in params:
        params["alpha_grid"] = tuple(params["alpha_grid"])
    model = _CLASSES[kind](**params)
    model.classes_ = np.array(doc["classes"])
    model.n_features_in_ = int(doc["n_features"])
    std = doc["standardization"]
    if std is not None:
        scaler = StandardScaler()
        scaler.mean_ = np.array(std["mean"], dtype=np.float64)
        scaler.scale_ = np.array(std["scale"], dtype=np.float64)
        scaler.var_ = scaler.scale_**2
        scaler.n_features_in_ = model.n_features_in_
        scaler.n_samples_seen_ = 0
        model.scaler_ = scaler
    parts = doc["parts"]
    if kind == "elt":
        model.feature_map_ = _fmap_from(parts["feature_map"])
        model.tree_ = RandomTree.from_text(
            parts["tree"], model.feature_map_.hidden_dim
        )
        model.observer_ = _ridge_from(parts["observer"])
    elif kind == "ridge":
        model.coef_ = _ridge_from(parts["coef"])
    elif kind == "elm":
        model.feature_map_ = _fmap_from(parts["feature_map"])
        model.coef_ = _ridge_from(parts["coef"])
        model.alpha_ = float(parts["alpha"])
    else:
        model.tree_ = RandomTree.from_text(parts["tree"], model.n_features_in_)
        model.leaf_class_ = np.array(parts["leaf_class"], dtype=np.intp)
    return model


def save_model(model, path, metadata: dict | None = None) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model, metadata), indent=1) + "\n")


def load_model(path):
    """Return ``(model, metadata)``."""
    doc = json.loads(Path(path).read_text())
    return model_from_dict(doc), doc.get("metadata", {})
