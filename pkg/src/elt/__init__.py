"""Extreme Learning Tree classifier and comparison baselines."""

from .feature_map import RandomFeatureMap, new_feature_map
from .linalg import RidgeSolution, ShapeError, SingularMatrixError, matmul, ridge_solve
from .models import (
    CARTClassifier,
    ELMClassifier,
    ExtremeLearningTreeClassifier,
    RidgeRegressionClassifier,
)
from .persistence import load_model, save_model
from .tree import RandomTree, TreeConfig, build_tree

__all__ = [
    "CARTClassifier",
    "ELMClassifier",
    "ExtremeLearningTreeClassifier",
    "RandomFeatureMap",
    "RandomTree",
    "RidgeRegressionClassifier",
    "RidgeSolution",
    "ShapeError",
    "SingularMatrixError",
    "TreeConfig",
    "build_tree",
    "load_model",
    "matmul",
    "new_feature_map",
    "ridge_solve",
    "save_model",
]

__version__ = "0.1.0"
