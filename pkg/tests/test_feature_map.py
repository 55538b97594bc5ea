import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from elt.feature_map import RandomFeatureMap, new_feature_map, transform
from elt.linalg import ShapeError


def test_same_seed_same_map():
    a = new_feature_map(4, 7, "tanh", 11)
    b = new_feature_map(4, 7, "tanh", 11)
    np.testing.assert_array_equal(a.weights, b.weights)
    np.testing.assert_array_equal(a.biases, b.biases)


def test_different_seed_different_map():
    assert not np.array_equal(new_feature_map(4, 7, seed=1).weights,
                              new_feature_map(4, 7, seed=2).weights)


def test_shape():
    fmap = new_feature_map(4, 100, "tanh", 1)
    assert fmap.weights.shape == (4, 100)
    assert fmap.biases.shape == (100,)
    assert (fmap.input_dim, fmap.hidden_dim) == (4, 100)


def test_weight_and_bias_distribution():
    fmap = new_feature_map(100, 100, "tanh", 5)
    w = fmap.weights.ravel()
    assert abs(w.mean()) < 0.05
    assert abs(w.var() - 1.0) < 0.1
    big = new_feature_map(1, 10_000, "tanh", 6).biases
    assert big.min() >= -1.0 and big.max() <= 1.0
    assert abs(big.mean()) < 0.05
    # U[-1, 1] has variance 1/3
    assert abs(big.var() - 1 / 3) < 0.02


@pytest.mark.parametrize("d,m", [(0, 3), (3, 0)])
def test_zero_dims_rejected(d, m):
    with pytest.raises(ValueError):
        new_feature_map(d, m, "tanh", 0)


def test_unknown_activation():
    with pytest.raises(ValueError):
        new_feature_map(2, 2, "relu", 0)


def test_maps_are_immutable():
    fmap = new_feature_map(2, 3, seed=0)
    with pytest.raises(ValueError):
        fmap.weights[0, 0] = 1.0


def test_identity_configuration():
    x = np.random.default_rng(0).normal(size=(5, 3))
    fmap = RandomFeatureMap(np.eye(3), np.zeros(3), "identity")
    np.testing.assert_array_equal(transform(fmap, x), x)


def test_tanh_hand_value():
    fmap = RandomFeatureMap([[1.0], [0.0]], [0.0], "tanh")
    out = fmap.transform([[1.0, 2.0]])
    assert out.shape == (1, 1)
    assert out[0, 0] == pytest.approx(0.76159, abs=1e-5)


@pytest.mark.parametrize("activation", ["tanh", "sigmoid", "identity"])
def test_matches_scalar_loop(activation):
    g = {"tanh": math.tanh, "sigmoid": lambda z: 1 / (1 + math.exp(-z)),
         "identity": lambda z: z}[activation]
    fmap = new_feature_map(4, 6, activation, 9)
    x = np.random.default_rng(1).normal(size=(20, 4))
    expected = np.array([
        [g(sum(x[i, k] * fmap.weights[k, j] for k in range(4)) + fmap.biases[j])
         for j in range(6)]
        for i in range(20)
    ])
    np.testing.assert_allclose(fmap.transform(x), expected, atol=1e-12)


def test_shape_mismatch():
    with pytest.raises(ShapeError):
        new_feature_map(3, 2, seed=0).transform(np.ones((4, 2)))


big_inputs = arrays(np.float64, (8, 3), elements=st.floats(-1e3, 1e3))


@settings(max_examples=50, deadline=None)
@given(x=big_inputs, seed=st.integers(0, 2**64 - 1))
def test_bounded_activations(x, seed):
    # tanh/expit saturate to exactly +-1 or 0/1 in float64 for large inputs,
    # so the bound is checked on moderate pre-activations too
    h = new_feature_map(3, 5, "tanh", seed).transform(x)
    assert np.all(np.abs(h) <= 1.0)
    s = new_feature_map(3, 5, "sigmoid", seed).transform(x)
    assert np.all((s >= 0.0) & (s <= 1.0))
    small = x / 1e3
    assert np.all(np.abs(new_feature_map(3, 5, "tanh", seed).transform(small)) < 1.0)
    s = new_feature_map(3, 5, "sigmoid", seed).transform(small)
    assert np.all((s > 0.0) & (s < 1.0))


@settings(max_examples=30, deadline=None)
@given(a=arrays(np.float64, (4, 3), elements=st.floats(-10, 10)),
       b=arrays(np.float64, (6, 3), elements=st.floats(-10, 10)))
def test_row_independence(a, b):
    fmap = new_feature_map(3, 8, "tanh", 3)
    joint = fmap.transform(np.vstack([a, b]))
    np.testing.assert_allclose(
        joint, np.vstack([fmap.transform(a), fmap.transform(b)]), rtol=0, atol=1e-14
    )


def test_transform_deterministic():
    fmap = new_feature_map(3, 8, "sigmoid", 3)
    x = np.random.default_rng(2).normal(size=(10, 3))
    np.testing.assert_array_equal(fmap.transform(x), fmap.transform(x))
