"""Datasets, the repeated-split benchmark, and grid exports for plotting."""

from __future__ import annotations

import configparser
import csv
import io
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from ._random import derive_seed, make_rng
from .models import (
    CARTClassifier,
    ELMClassifier,
    ExtremeLearningTreeClassifier,
    RidgeRegressionClassifier,
)


class CsvFormatError(ValueError):
    """Malformed CSV input; the message carries the offending line number."""


class BenchmarkError(RuntimeError):
    """A method failed to fit or predict during a benchmark run."""


def iris_path() -> Path:
    """Path of the bundled Iris CSV."""
    return Path(str(resources.files("elt") / "data" / "iris.csv"))


@dataclass
class Dataset:
    name: str
    x: np.ndarray
    labels: np.ndarray
    class_names: list[str]
    feature_names: list[str]

    def __post_init__(self):
        if self.labels.shape[0] != self.x.shape[0]:
            raise ValueError(
                f"{self.labels.shape[0]} labels for {self.x.shape[0]} samples"
            )
        if self.labels.size and self.labels.max() >= len(self.class_names):
            raise ValueError("label index outside class_names")

    def __len__(self):
        return self.x.shape[0]

    def subset(self, rows) -> Dataset:
        return Dataset(
            self.name, self.x[rows], self.labels[rows],
            list(self.class_names), list(self.feature_names),
        )


def _read_rows(path, header: bool):
    text = Path(path).read_text()
    rows = [
        (lineno, row)
        for lineno, row in enumerate(csv.reader(io.StringIO(text)), 1)
        if row and any(cell.strip() for cell in row)
    ]
    if not rows:
        raise CsvFormatError(f"{path}: file is empty")
    names = None
    if header:
        names = [cell.strip() for cell in rows[0][1]]
        rows = rows[1:]
        if not rows:
            raise CsvFormatError(f"{path}: header but no data rows")
    width = len(names) if names is not None else len(rows[0][1])
    for lineno, row in rows:
        if len(row) != width:
            raise CsvFormatError(
                f"{path}, line {lineno}: expected {width} fields, got {len(row)}"
            )
    return names or [f"x{i}" for i in range(width)], rows


def _resolve_column(names: list[str], column) -> int:
    if isinstance(column, str) and column in names:
        return names.index(column)
    try:
        idx = int(column)
    except (TypeError, ValueError):
        raise CsvFormatError(f"unknown label column {column!r}") from None
    if not -len(names) <= idx < len(names):
        raise CsvFormatError(f"label column index {idx} out of range")
    return idx % len(names)


def _parse_features(path, rows, columns):
    x = np.empty((len(rows), len(columns)))
    for r, (lineno, row) in enumerate(rows):
        for c, col in enumerate(columns):
            try:
                v = float(row[col])
            except ValueError:
                raise CsvFormatError(
                    f"{path}, line {lineno}: non-numeric feature {row[col]!r}"
                ) from None
            if not math.isfinite(v):
                raise CsvFormatError(f"{path}, line {lineno}: non-finite feature {v}")
            x[r, c] = v
    return x


def load_csv(path, label_column="-1", header: bool = True) -> Dataset:
    """Read a CSV with one label column and numeric features.

    ``label_column`` is a header name or a (possibly negative) column index.
    Labels become ``0..c-1`` in order of first appearance.
    """
    names, rows = _read_rows(path, header)
    label_idx = _resolve_column(names, label_column)
    feature_cols = [i for i in range(len(names)) if i != label_idx]
    if not feature_cols:
        raise CsvFormatError(f"{path}: no feature columns besides the label")
    x = _parse_features(path, rows, feature_cols)
    class_names: list[str] = []
    lookup: dict[str, int] = {}
    labels = np.empty(len(rows), dtype=np.intp)
    for r, (_, row) in enumerate(rows):
        raw = row[label_idx].strip()
        if raw not in lookup:
            lookup[raw] = len(class_names)
            class_names.append(raw)
        labels[r] = lookup[raw]
    return Dataset(
        Path(path).stem, x, labels, class_names, [names[i] for i in feature_cols]
    )


def load_features(path, feature_names: Sequence[str] | None = None,
                  header: bool = True) -> np.ndarray:
    """Read a feature matrix, selecting ``feature_names`` by header if given.

    Any other column (e.g. a label column) is ignored.
    """
    names, rows = _read_rows(path, header)
    if feature_names is None or not header:
        columns = list(range(len(names)))
    else:
        missing = [f for f in feature_names if f not in names]
        if missing:
            raise CsvFormatError(f"{path}: missing feature columns {missing}")
        columns = [names.index(f) for f in feature_names]
    return _parse_features(path, rows, columns)


def split_indices(labels, train_fraction: float, seed: int,
                  stratify: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Train and test row indices.

    Stratified: each class contributes ``round(fraction * n_class)`` rows to
    train (clamped to leave at least one on each side), the rest to test.
    Both index arrays come back in seeded random order.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    labels = np.asarray(labels)
    rng = make_rng(seed)
    if stratify:
        train, test = [], []
        for c in np.unique(labels):
            rows = np.flatnonzero(labels == c)
            if rows.shape[0] < 2:
                raise ValueError(f"class {c} has fewer than 2 samples; cannot stratify")
            rows = rng.permutation(rows)
            k = int(math.floor(train_fraction * rows.shape[0] + 0.5))
            k = min(max(k, 1), rows.shape[0] - 1)
            train.append(rows[:k])
            test.append(rows[k:])
        train_idx, test_idx = np.concatenate(train), np.concatenate(test)
    else:
        n = labels.shape[0]
        if n < 2:
            raise ValueError("need at least 2 samples to split")
        rows = rng.permutation(n)
        k = min(max(int(math.floor(train_fraction * n + 0.5)), 1), n - 1)
        train_idx, test_idx = rows[:k], rows[k:]
    return rng.permutation(train_idx), rng.permutation(test_idx)


def stratified_split(dataset: Dataset, train_fraction: float = 0.7, seed: int = 0,
                     stratify: bool = True) -> tuple[Dataset, Dataset]:
    train, test = split_indices(dataset.labels, train_fraction, seed, stratify)
    return dataset.subset(train), dataset.subset(test)


# ---------------------------------------------------------------- config

DEFAULT_CONFIG = {
    "elt.hidden_dim": 10,
    "elt.activation": "tanh",
    "elt.min_node_size": 3,
    "elt.max_depth": 15,
    "elt.max_split_attempts": 30,
    "elt.lambda": 1e-3,
    "elm.hidden_dim": 10,
    "elm.activation": "tanh",
    "elm.lambda": "cv",
    "elm.lambda_grid": "1e-4,1e-3,1e-2,1e-1,1",
    "elm.cv_folds": 5,
    "ridge.lambda": 1e-2,
    "cart.min_leaf": 1,
    "split.train_fraction": 0.7,
}


def load_config(path=None) -> dict:
    """Defaults overlaid with a flat ``key = value`` file."""
    config = dict(DEFAULT_CONFIG)
    if path is None:
        return config
    parser = configparser.ConfigParser(
        delimiters=("=",), comment_prefixes=("#", ";"), inline_comment_prefixes=("#",)
    )
    parser.optionxform = str
    parser.read_string("[config]\n" + Path(path).read_text())
    for key, raw in parser["config"].items():
        if key not in DEFAULT_CONFIG:
            raise ValueError(f"unknown config key {key!r}")
        default = DEFAULT_CONFIG[key]
        try:
            config[key] = type(default)(raw) if not isinstance(default, str) else raw
        except ValueError:
            raise ValueError(f"config key {key!r}: cannot parse {raw!r}") from None
    return config


def make_estimator(method: str, seed: int, config: dict | None = None):
    """Build a fresh estimator for ``method`` from config values."""
    c = dict(DEFAULT_CONFIG) if config is None else config
    if method == "elt":
        return ExtremeLearningTreeClassifier(
            hidden_dim=c["elt.hidden_dim"],
            activation=c["elt.activation"],
            min_node_size=c["elt.min_node_size"],
            max_depth=c["elt.max_depth"],
            max_split_attempts=c["elt.max_split_attempts"],
            alpha=c["elt.lambda"],
            random_state=seed,
        )
    if method == "ridge":
        return RidgeRegressionClassifier(alpha=c["ridge.lambda"])
    if method == "elm":
        lam = str(c["elm.lambda"]).strip()
        return ELMClassifier(
            hidden_dim=c["elm.hidden_dim"],
            activation=c["elm.activation"],
            alpha=None if lam == "cv" else float(lam),
            alpha_grid=tuple(float(v) for v in str(c["elm.lambda_grid"]).split(",")),
            cv_folds=c["elm.cv_folds"],
            random_state=seed,
        )
    if method == "cart":
        return CARTClassifier(min_leaf=c["cart.min_leaf"])
    raise ValueError(f"unknown method {method!r}; expected elt, ridge, elm or cart")


# ---------------------------------------------------------------- benchmark

@dataclass
class ExperimentReport:
    """Per-method test accuracies (percent), one entry per run."""

    accuracies: dict[str, np.ndarray]
    master_seed: int
    repetitions: int
    config: dict = field(default_factory=dict)

    def mean(self, method: str) -> float:
        return float(np.mean(self.accuracies[method]))

    def std(self, method: str) -> float:
        """Population standard deviation (ddof=0)."""
        return float(np.std(self.accuracies[method]))

    def to_csv(self) -> str:
        lines = [
            "# accuracy in percent; std_acc is the population standard deviation over runs",
            "method,mean_acc,std_acc,reps,master_seed",
        ]
        for name in self.accuracies:
            lines.append(
                f"{name},{self.mean(name):.10f},{self.std(name):.10f},"
                f"{self.repetitions},{self.master_seed}"
            )
        return "\n".join(lines) + "\n"

    def runs_to_csv(self) -> str:
        names = list(self.accuracies)
        lines = ["run," + ",".join(names)]
        for r in range(self.repetitions):
            lines.append(
                f"{r}," + ",".join(repr(float(self.accuracies[m][r])) for m in names)
            )
        return "\n".join(lines) + "\n"


def run_benchmark(
    dataset: Dataset,
    methods: Sequence = ("elt", "ridge", "elm", "cart"),
    repetitions: int = 100,
    master_seed: int = 0,
    train_fraction: float | None = None,
    stratify: bool = True,
    config: dict | None = None,
) -> ExperimentReport:
    """Fit and score every method on ``repetitions`` seeded random splits.

    ``methods`` entries are method names or ``(name, factory)`` pairs where
    ``factory(seed)`` returns an unfitted estimator. Within run ``r`` every
    method sees the same split; the split and the model randomness come from
    seeds derived from ``(master_seed, r)``.
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    config = dict(DEFAULT_CONFIG) if config is None else config
    if train_fraction is None:
        train_fraction = config["split.train_fraction"]
    factories = []
    for m in methods:
        if isinstance(m, str):
            factories.append((m, lambda seed, m=m: make_estimator(m, seed, config)))
        else:
            factories.append(tuple(m))
    acc = {name: np.empty(repetitions) for name, _ in factories}
    for r in range(repetitions):
        run_seed = derive_seed(master_seed, r)
        train, test = split_indices(
            dataset.labels, train_fraction, derive_seed(run_seed, 0), stratify
        )
        model_seed = derive_seed(run_seed, 1)
        for name, factory in factories:
            try:
                model = factory(model_seed).fit(dataset.x[train], dataset.labels[train])
                pred = model.predict(dataset.x[test])
            except Exception as exc:
                raise BenchmarkError(f"run {r}, method {name}: {exc}") from exc
            acc[name][r] = 100.0 * np.mean(pred == dataset.labels[test])
    return ExperimentReport(acc, master_seed, repetitions, dict(config))


# ---------------------------------------------------------------- grids

def surface_grid(x, feature_pair: tuple[int, int], resolution: int) -> np.ndarray:
    """Grid over two features, margins of 0.5, other features at their means.

    Rows vary the second feature fastest.
    """
    x = np.asarray(x, dtype=np.float64)
    i, j = (int(v) for v in feature_pair)
    d = x.shape[1]
    if i == j:
        raise ValueError("feature pair must name two distinct features")
    if not (0 <= i < d and 0 <= j < d):
        raise ValueError(f"feature indices must lie in [0, {d})")
    if resolution < 1:
        raise ValueError(f"grid resolution must be >= 1, got {resolution}")
    gi = np.linspace(x[:, i].min() - 0.5, x[:, i].max() + 0.5, resolution)
    gj = np.linspace(x[:, j].min() - 0.5, x[:, j].max() + 0.5, resolution)
    grid = np.tile(x.mean(axis=0), (resolution * resolution, 1))
    grid[:, i] = np.repeat(gi, resolution)
    grid[:, j] = np.tile(gj, resolution)
    return grid


def _write_grid(path, grid, pair, values, column):
    i, j = pair
    with open(path, "w", newline="") as f:
        f.write(f"f1,f2,{column}\n")
        for a, b, v in zip(grid[:, i], grid[:, j], values):
            f.write(f"{float(a)!r},{float(b)!r},{v}\n")


def export_decision_surface(model, x, feature_pair, grid_resolution: int, path) -> np.ndarray:
    """Write ``f1,f2,predicted_class`` rows; returns the predictions."""
    grid = surface_grid(x, feature_pair, grid_resolution)
    pred = model.predict(grid)
    _write_grid(path, grid, feature_pair, pred, "predicted_class")
    return pred


def export_leaf_structure(model, x, feature_pair, grid_resolution: int, path) -> np.ndarray:
    """Write ``f1,f2,leaf_index`` rows for an Extreme Learning Tree."""
    if not isinstance(model, ExtremeLearningTreeClassifier):
        raise TypeError(
            f"leaf structure needs an ExtremeLearningTreeClassifier, got {type(model).__name__}"
        )
    grid = surface_grid(x, feature_pair, grid_resolution)
    leaves = model.apply(grid)
    _write_grid(path, grid, feature_pair, leaves, "leaf_index")
    return leaves
