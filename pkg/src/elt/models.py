"""Classifiers with a scikit-learn compatible interface.

``ExtremeLearningTreeClassifier`` is the main model: standardize, expand with
a random feature map, route through a random tree, and read the class off the
leaf with a ridge observer. The other three are the comparison baselines.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.model_selection import StratifiedKFold
from sklearn.preprocessing import StandardScaler
from sklearn.utils.multiclass import check_classification_targets
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._random import SEED_MAX, derive_seed
from .feature_map import RandomFeatureMap, new_feature_map
from .linalg import ShapeError, ridge_solve
from .observer import ClassTargets, fit_observer, one_hot, predict_classes
from .tree import TreeConfig, _Builder, build_tree

ELM_ALPHA_GRID = (1e-4, 1e-3, 1e-2, 1e-1, 1.0)


def _with_intercept(Z: np.ndarray) -> np.ndarray:
    return np.hstack([Z, np.ones((Z.shape[0], 1))])


def _resolve_seed(random_state) -> int:
    if random_state is None:
        return int(np.random.SeedSequence().entropy % (SEED_MAX + 1))
    seed = int(random_state)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"random_state must be an unsigned 64-bit integer, got {seed}")
    return seed


class _BaseClassifier(ClassifierMixin, BaseEstimator):
    """Shared fit/predict plumbing.

    Subclasses implement ``_fit_encoded(Z, y)`` and ``_predict_encoded(Z)``
    on standardized inputs ``Z`` and label indices ``y`` in ``0..C-1``.
    """

    _standardize = True

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        check_classification_targets(y)
        self.classes_, y_idx = np.unique(y, return_inverse=True)
        self.n_features_in_ = X.shape[1]
        if self._standardize:
            self.scaler_ = StandardScaler().fit(X)
            X = self.scaler_.transform(X)
        self._fit_encoded(X, y_idx)
        return self

    def _encode_input(self, X) -> np.ndarray:
        check_is_fitted(self, "classes_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ShapeError(
                f"X has {X.shape[1]} features, but {type(self).__name__} "
                f"is expecting {self.n_features_in_} features as input."
            )
        if self._standardize:
            X = self.scaler_.transform(X)
        return X

    def predict(self, X):
        Z = self._encode_input(X)
        return self.classes_[self._predict_encoded(Z)]

    @property
    def n_classes_(self) -> int:
        return len(self.classes_)


class ExtremeLearningTreeClassifier(_BaseClassifier):
    """Extreme Learning Tree.

    Parameters
    ----------
    hidden_dim : int, default=10
        Width of the random feature map the tree splits on.
    activation : {"tanh", "sigmoid", "identity"}, default="tanh"
    min_node_size : int, default=3
        No split may leave fewer training samples than this in a child.
    max_depth : int, default=15
    max_split_attempts : int, default=30
        Random (feature, threshold) draws tried per node before giving up.
    alpha : float, default=1e-3
        L2 penalty of the leaf observer.
    random_state : int or None
        Seeds both the feature map and the tree.

    Attributes
    ----------
    feature_map_ : RandomFeatureMap
    tree_ : RandomTree
    observer_ : RidgeSolution
        Leaf-by-class score matrix.
    """

    def __init__(
        self,
        hidden_dim=10,
        activation="tanh",
        min_node_size=3,
        max_depth=15,
        max_split_attempts=30,
        alpha=1e-3,
        random_state=None,
    ):
        self.hidden_dim = hidden_dim
        self.activation = activation
        self.min_node_size = min_node_size
        self.max_depth = max_depth
        self.max_split_attempts = max_split_attempts
        self.alpha = alpha
        self.random_state = random_state

    def _fit_encoded(self, Z, y):
        seed = _resolve_seed(self.random_state)
        self.feature_map_ = new_feature_map(
            Z.shape[1], self.hidden_dim, self.activation, derive_seed(seed, 0)
        )
        config = TreeConfig(
            min_node_size=self.min_node_size,
            max_depth=self.max_depth,
            max_split_attempts=self.max_split_attempts,
            seed=derive_seed(seed, 1),
        )
        self.tree_ = build_tree(self.feature_map_.transform(Z), config)
        leaves = one_hot(self.tree_.training_leaves, self.tree_.leaf_count)
        self.observer_ = fit_observer(
            leaves, ClassTargets(y, len(self.classes_)), self.alpha
        )

    def _leaves(self, Z):
        return self.tree_.apply(self.feature_map_.transform(Z))

    def _predict_encoded(self, Z):
        return predict_classes(
            self.observer_, one_hot(self._leaves(Z), self.tree_.leaf_count)
        )

    def apply(self, X):
        """Leaf index of each sample."""
        return self._leaves(self._encode_input(X))


class RidgeRegressionClassifier(_BaseClassifier):
    """Least squares on one-hot targets with an intercept column, argmax decoded.

    The intercept is penalized together with the weights.
    """

    def __init__(self, alpha=1e-2):
        self.alpha = alpha

    def _fit_encoded(self, Z, y):
        targets = one_hot(y, len(self.classes_))
        self.coef_ = ridge_solve(_with_intercept(Z), targets, self.alpha)

    def _predict_encoded(self, Z):
        return predict_classes(self.coef_, _with_intercept(Z))


class ELMClassifier(_BaseClassifier):
    """L2-regularized Extreme Learning Machine.

    With ``alpha=None`` the penalty is picked from ``alpha_grid`` by stratified
    k-fold accuracy on the training data, ties going to the larger penalty.
    The chosen value is stored in ``alpha_``.
    """

    def __init__(
        self,
        hidden_dim=10,
        activation="tanh",
        alpha=None,
        alpha_grid=ELM_ALPHA_GRID,
        cv_folds=5,
        random_state=None,
    ):
        self.hidden_dim = hidden_dim
        self.activation = activation
        self.alpha = alpha
        self.alpha_grid = alpha_grid
        self.cv_folds = cv_folds
        self.random_state = random_state

    def _make_feature_map(self, n_features: int, seed: int) -> RandomFeatureMap:
        return new_feature_map(n_features, self.hidden_dim, self.activation, seed)

    def _select_alpha(self, H, y, seed):
        folds = min(self.cv_folds, int(np.bincount(y).min()))
        grid = sorted(float(a) for a in self.alpha_grid)
        if folds < 2 or len(grid) == 1:
            return grid[-1]
        cv = StratifiedKFold(folds, shuffle=True, random_state=seed % 2**32)
        correct = np.zeros(len(grid))
        targets = one_hot(y, len(self.classes_))
        for train, test in cv.split(H, y):
            for k, a in enumerate(grid):
                sol = ridge_solve(H[train], targets[train], a)
                correct[k] += np.sum(predict_classes(sol, H[test]) == y[test])
        best = np.flatnonzero(correct == correct.max())
        return grid[best[-1]]

    def _fit_encoded(self, Z, y):
        seed = _resolve_seed(self.random_state)
        self.feature_map_ = self._make_feature_map(Z.shape[1], derive_seed(seed, 0))
        H = _with_intercept(self.feature_map_.transform(Z))
        if self.alpha is None:
            self.alpha_ = self._select_alpha(H, y, derive_seed(seed, 2))
        else:
            self.alpha_ = float(self.alpha)
        self.coef_ = ridge_solve(H, one_hot(y, len(self.classes_)), self.alpha_)

    def _predict_encoded(self, Z):
        return predict_classes(self.coef_, _with_intercept(self.feature_map_.transform(Z)))


def _best_gini_split(X, y, n_classes, min_leaf):
    """Best (feature, threshold, left_mask) by weighted Gini, or None.

    Candidate thresholds are midpoints between consecutive distinct values.
    Ties keep the lowest feature index, then the lowest threshold.
    """
    n = X.shape[0]
    best_score = np.inf
    best = None
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        v = X[order, j]
        counts = np.cumsum(one_hot(y[order], n_classes), axis=0)[:-1]
        n_left = np.arange(1, n)
        n_right = n - n_left
        valid = (v[:-1] < v[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
        if not np.any(valid):
            continue
        right = counts[-1] + one_hot(y[order[-1:]], n_classes)[0] - counts
        # n * weighted gini = n_L - sum(c_L^2)/n_L + n_R - sum(c_R^2)/n_R
        score = n - (counts**2).sum(1) / n_left - (right**2).sum(1) / n_right
        score = np.where(valid, score, np.inf)
        i = int(np.argmin(score))
        if score[i] < best_score:
            best_score = score[i]
            t = 0.5 * (v[i] + v[i + 1])
            if t >= v[i + 1]:
                t = v[i]
            best = (j, float(t))
    if best is None:
        return None
    j, t = best
    return j, t, X[:, j] <= t


class CARTClassifier(_BaseClassifier):
    """Greedy Gini decision tree, grown until pure, no pruning.

    Attributes
    ----------
    tree_ : RandomTree
        Split structure; reuses the random tree's node layout.
    leaf_class_ : ndarray
        Class index predicted at each leaf.
    """

    _standardize = False

    def __init__(self, min_leaf=1):
        self.min_leaf = min_leaf

    def _fit_encoded(self, X, y):
        if self.min_leaf < 1:
            raise ValueError(f"min_leaf must be >= 1, got {self.min_leaf}")
        n_classes = len(self.classes_)
        b = _Builder()
        leaf_class = []
        stack = [(np.arange(X.shape[0]), None, False)]
        while stack:
            rows, parent, is_left = stack.pop()
            counts = np.bincount(y[rows], minlength=n_classes)
            split = None
            if np.count_nonzero(counts) > 1 and rows.shape[0] >= 2 * self.min_leaf:
                split = _best_gini_split(X[rows], y[rows], n_classes, self.min_leaf)
            if split is None:
                node = b.add_leaf(len(leaf_class))
                leaf_class.append(int(np.argmax(counts)))
            else:
                j, t, mask = split
                node = b.add_internal(j, t)
                stack.append((rows[~mask], node, False))
                stack.append((rows[mask], node, True))
            b.link(parent, is_left, node)
        self.tree_ = b.finish(X.shape[1])
        self.leaf_class_ = np.array(leaf_class, dtype=np.intp)

    def _predict_encoded(self, X):
        return self.leaf_class_[self.tree_.apply(X)]

    def apply(self, X):
        return self.tree_.apply(self._encode_input(X))


ESTIMATORS = {
    "elt": ExtremeLearningTreeClassifier,
    "ridge": RidgeRegressionClassifier,
    "elm": ELMClassifier,
    "cart": CARTClassifier,
}
