"""Linear observer on one-hot leaf codes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import RidgeSolution, ShapeError, as_matrix, ridge_solve


def one_hot(indices, width: int) -> np.ndarray:
    """Encode integer ``indices`` as rows of an (n, width) 0/1 matrix."""
    idx = np.asarray(indices)
    if idx.ndim != 1:
        raise ShapeError(f"indices must be 1-D, got shape {idx.shape}")
    if idx.size and not np.issubdtype(idx.dtype, np.integer):
        raise TypeError(f"indices must be integers, got {idx.dtype}")
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    if idx.size and (idx.min() < 0 or idx.max() >= width):
        raise ValueError(f"indices must lie in [0, {width}), got range "
                         f"[{idx.min()}, {idx.max()}]")
    out = np.zeros((idx.shape[0], width))
    out[np.arange(idx.shape[0]), idx] = 1.0
    return out


@dataclass(frozen=True)
class ClassTargets:
    """Integer labels ``0..class_count-1`` together with their one-hot form."""

    labels: np.ndarray
    class_count: int

    @classmethod
    def from_labels(cls, labels, class_count: int | None = None) -> ClassTargets:
        labels = np.asarray(labels, dtype=np.intp).reshape(-1)
        if class_count is None:
            class_count = int(labels.max()) + 1 if labels.size else 1
        return cls(labels, class_count)

    @property
    def one_hot(self) -> np.ndarray:
        return one_hot(self.labels, self.class_count)


def fit_observer(leaf_encoding, targets: ClassTargets, lam: float) -> RidgeSolution:
    """Ridge map from one-hot leaf codes to one-hot class targets.

    The encoded columns are orthogonal, so row ``k`` of the solution is
    ``n_k / (n_k + lam)`` times the mean target of leaf ``k``.
    """
    enc = as_matrix(leaf_encoding, "leaf_encoding")
    if enc.shape[0] != targets.labels.shape[0]:
        raise ShapeError(
            f"{enc.shape[0]} encoded rows but {targets.labels.shape[0]} targets"
        )
    return ridge_solve(enc, targets.one_hot, lam)


def predict_classes(solution: RidgeSolution, encoding) -> np.ndarray:
    """Argmax of the observer scores; ties go to the lowest class index."""
    enc = as_matrix(encoding, "encoding")
    if enc.shape[1] != solution.n_inputs:
        raise ShapeError(
            f"encoding width {enc.shape[1]} != observer input width {solution.n_inputs}"
        )
    return np.argmax(solution.apply(enc), axis=1)
