"""Extremely randomized binary tree over hidden features.

Each node draws a split feature uniformly at random and a threshold uniformly
from the open interval spanned by that feature on the node's samples. A split
is accepted only if both children keep at least ``min_node_size`` samples;
otherwise the draw is repeated, and after ``max_split_attempts`` failures the
node becomes a leaf. Nodes at ``max_depth`` or holding fewer than
``2 * min_node_size`` samples are leaves outright.

Nodes are stored in flat arrays in depth-first preorder (left before right),
and leaves are numbered in that same order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._random import make_rng
from .linalg import ShapeError, as_matrix

_LEAF = -1


@dataclass(frozen=True)
class TreeConfig:
    min_node_size: int = 3
    max_depth: int = 15
    max_split_attempts: int = 30
    seed: int | None = None

    def __post_init__(self):
        if self.min_node_size < 1:
            raise ValueError(f"min_node_size must be >= 1, got {self.min_node_size}")
        if self.max_depth < 0:
            raise ValueError(f"max_depth must be >= 0, got {self.max_depth}")
        if self.max_split_attempts < 1:
            raise ValueError(
                f"max_split_attempts must be >= 1, got {self.max_split_attempts}"
            )


@dataclass(frozen=True, eq=False)
class RandomTree:
    """Flat preorder node arrays.

    For node ``i``: ``feature[i] == -1`` marks a leaf whose number is
    ``leaf_index[i]``; otherwise samples with ``x[feature[i]] <= threshold[i]``
    go to ``left[i]`` and the rest to ``right[i]``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_index: np.ndarray
    feature_dim: int
    # leaf of each training row, filled in by build_tree only
    training_leaves: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("feature", "threshold", "left", "right", "leaf_index"):
            getattr(self, name).setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, RandomTree):
            return NotImplemented
        return self.feature_dim == other.feature_dim and self.to_text() == other.to_text()

    __hash__ = None

    @property
    def node_count(self) -> int:
        return self.feature.shape[0]

    @property
    def leaf_count(self) -> int:
        return int(np.count_nonzero(self.feature == _LEAF))

    def is_leaf(self, node: int) -> bool:
        return self.feature[node] == _LEAF

    def depth(self) -> int:
        """Longest root-to-leaf path, in edges."""
        deepest = 0
        stack = [(0, 0)]
        while stack:
            node, d = stack.pop()
            if self.feature[node] == _LEAF:
                deepest = max(deepest, d)
            else:
                stack.append((int(self.left[node]), d + 1))
                stack.append((int(self.right[node]), d + 1))
        return deepest

    def apply(self, X) -> np.ndarray:
        """Leaf index of every row of ``X``."""
        X = as_matrix(X, "features")
        if X.shape[1] != self.feature_dim:
            raise ShapeError(
                f"samples have {X.shape[1]} features, tree expects {self.feature_dim}"
            )
        node = np.zeros(X.shape[0], dtype=np.intp)
        rows = np.arange(X.shape[0])
        active = self.feature[node] != _LEAF
        while np.any(active):
            idx = rows[active]
            cur = node[idx]
            go_left = X[idx, self.feature[cur]] <= self.threshold[cur]
            node[idx] = np.where(go_left, self.left[cur], self.right[cur])
            active[idx] = self.feature[node[idx]] != _LEAF
        return self.leaf_index[node].astype(np.intp)

    def to_text(self) -> str:
        """One node per line in preorder: ``I <feature> <threshold>`` or ``L <index>``."""
        lines = []
        for i in range(self.node_count):
            if self.feature[i] == _LEAF:
                lines.append(f"L {int(self.leaf_index[i])}")
            else:
                lines.append(f"I {int(self.feature[i])} {float(self.threshold[i])!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, feature_dim: int) -> RandomTree:
        tokens = [line.split() for line in text.splitlines() if line.strip()]
        if not tokens:
            raise ValueError("empty tree text")
        b = _Builder()
        # each stack entry: (parent node, is_left_child)
        pending = [(None, False)]
        for lineno, tok in enumerate(tokens, 1):
            if not pending:
                raise ValueError(f"line {lineno}: trailing node after complete tree")
            parent, is_left = pending.pop()
            if tok[0] == "L" and len(tok) == 2:
                node = b.add_leaf(int(tok[1]))
            elif tok[0] == "I" and len(tok) == 3:
                node = b.add_internal(int(tok[1]), float(tok[2]))
                pending.append((node, False))
                pending.append((node, True))
            else:
                raise ValueError(f"line {lineno}: cannot parse {' '.join(tok)!r}")
            b.link(parent, is_left, node)
        if pending:
            raise ValueError("tree text ends before all children are given")
        tree = b.finish(feature_dim)
        if sorted(tree.leaf_index[tree.feature == _LEAF]) != list(range(tree.leaf_count)):
            raise ValueError("leaf indices must be exactly 0..leaf_count-1")
        if np.any(tree.feature >= feature_dim):
            raise ValueError("split feature index out of range")
        return tree


class _Builder:
    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.leaf_index: list[int] = []

    def _add(self, feature, threshold, leaf):
        self.feature.append(feature)
        self.threshold.append(threshold)
        self.left.append(-1)
        self.right.append(-1)
        self.leaf_index.append(leaf)
        return len(self.feature) - 1

    def add_leaf(self, leaf: int) -> int:
        return self._add(_LEAF, np.nan, leaf)

    def add_internal(self, feature: int, threshold: float) -> int:
        return self._add(feature, threshold, -1)

    def link(self, parent, is_left, child):
        if parent is not None:
            (self.left if is_left else self.right)[parent] = child

    def finish(self, feature_dim, training_leaves=None) -> RandomTree:
        return RandomTree(
            feature=np.array(self.feature, dtype=np.intp),
            threshold=np.array(self.threshold, dtype=np.float64),
            left=np.array(self.left, dtype=np.intp),
            right=np.array(self.right, dtype=np.intp),
            leaf_index=np.array(self.leaf_index, dtype=np.intp),
            feature_dim=feature_dim,
            training_leaves=training_leaves,
        )


def _try_split(H, samples, config, rng):
    """Return ``(feature, threshold, left_rows, right_rows)`` or None."""
    m = H.shape[1]
    s_min = config.min_node_size
    for _ in range(config.max_split_attempts):
        j = int(rng.integers(m))
        col = H[samples, j]
        lo, hi = col.min(), col.max()
        t = rng.uniform(lo, hi)
        # constant feature or a draw landing on an endpoint: no open interval
        if not lo < t < hi:
            continue
        mask = col <= t
        n_left = int(np.count_nonzero(mask))
        if n_left >= s_min and samples.shape[0] - n_left >= s_min:
            return j, float(t), samples[mask], samples[~mask]
    return None


def build_tree(features, config: TreeConfig = TreeConfig()) -> RandomTree:
    """Grow a random tree on ``features`` (n samples x m hidden features)."""
    H = as_matrix(features, "features")
    n, m = H.shape
    if n < 1 or m < 1:
        raise ValueError(f"cannot build a tree on a {n}x{m} feature matrix")
    rng = make_rng(config.seed)
    b = _Builder()
    training_leaves = np.empty(n, dtype=np.intp)
    n_leaves = 0
    # entries (rows, depth, parent, is_left); right pushed first so left pops first
    stack = [(np.arange(n), 0, None, False)]
    while stack:
        samples, depth, parent, is_left = stack.pop()
        split = None
        if depth < config.max_depth and samples.shape[0] >= 2 * config.min_node_size:
            split = _try_split(H, samples, config, rng)
        if split is None:
            node = b.add_leaf(n_leaves)
            training_leaves[samples] = n_leaves
            n_leaves += 1
        else:
            j, t, left_rows, right_rows = split
            node = b.add_internal(j, t)
            stack.append((right_rows, depth + 1, node, False))
            stack.append((left_rows, depth + 1, node, True))
        b.link(parent, is_left, node)
    training_leaves.setflags(write=False)
    return b.finish(m, training_leaves)


def assign_leaf(tree: RandomTree, sample) -> int:
    sample = np.asarray(sample, dtype=np.float64)
    if sample.ndim != 1:
        raise ShapeError(f"sample must be a vector, got shape {sample.shape}")
    return int(tree.apply(sample.reshape(1, -1))[0])


def leaf_populations(tree: RandomTree, features) -> np.ndarray:
    """Number of rows of ``features`` landing in each leaf."""
    return np.bincount(tree.apply(features), minlength=tree.leaf_count)
