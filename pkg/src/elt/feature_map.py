"""Frozen random nonlinear feature expansion ``H = g(X W + b)``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ._random import make_rng
from .linalg import ShapeError, as_matrix

ACTIVATIONS = {
    "tanh": np.tanh,
    "sigmoid": expit,
    "identity": lambda z: z,
}


@dataclass(frozen=True)
class RandomFeatureMap:
    """Random hidden layer: ``weights`` is (input_dim, hidden_dim)."""

    weights: np.ndarray
    biases: np.ndarray
    activation: str = "tanh"
    seed: int | None = None

    def __post_init__(self):
        w = as_matrix(self.weights, "weights")
        b = np.array(self.biases, dtype=np.float64).reshape(-1)
        if b.shape[0] != w.shape[1]:
            raise ShapeError(
                f"{b.shape[0]} biases for {w.shape[1]} hidden units"
            )
        if self.activation not in ACTIVATIONS:
            raise ValueError(
                f"unknown activation {self.activation!r}; "
                f"expected one of {sorted(ACTIVATIONS)}"
            )
        w = w.copy()
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "biases", b)

    @property
    def input_dim(self) -> int:
        return self.weights.shape[0]

    @property
    def hidden_dim(self) -> int:
        return self.weights.shape[1]

    def transform(self, X) -> np.ndarray:
        X = as_matrix(X, "X")
        if X.shape[1] != self.input_dim:
            raise ShapeError(
                f"X has {X.shape[1]} columns, map expects {self.input_dim}"
            )
        return ACTIVATIONS[self.activation](X @ self.weights + self.biases)


def new_feature_map(
    input_dim: int, hidden_dim: int, activation: str = "tanh", seed: int | None = None
) -> RandomFeatureMap:
    """Draw weights i.i.d. N(0, 1) and biases i.i.d. U[-1, 1] from ``seed``.

    Weights are drawn first (row-major), then biases, from one PCG64 stream.
    """
    if input_dim < 1 or hidden_dim < 1:
        raise ValueError(
            f"dimensions must be >= 1, got input_dim={input_dim}, "
            f"hidden_dim={hidden_dim}"
        )
    rng = make_rng(seed)
    weights = rng.standard_normal((input_dim, hidden_dim))
    biases = rng.uniform(-1.0, 1.0, hidden_dim)
    return RandomFeatureMap(weights, biases, activation, seed)


def transform(fmap: RandomFeatureMap, X) -> np.ndarray:
    return fmap.transform(X)
