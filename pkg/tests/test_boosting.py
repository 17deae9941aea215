import math

import numpy as np
import pytest

from frugalboost.boosting import (Ensemble, TrainConfig, loss_value, plain_stagewise, residuals_multiclass,
                                  residuals_squared, softmax, train)
from frugalboost.cost import model_cost
from frugalboost.dataset import CostSchedule, Dataset
from frugalboost.errors import ConfigError, DataError
from frugalboost.synthetic import multiclass_blobs, random_regression


def test_residuals_squared():
    assert residuals_squared(np.zeros(2), np.array([1.0, -1.0])).tolist() == [1.0, -1.0]
    y = np.array([0.3, 2.0])
    assert residuals_squared(y, y).tolist() == [0.0, 0.0]
    assert residuals_squared(np.array([0.5]), np.array([1.0])).tolist() == [0.5]
    with pytest.raises(DataError):
        residuals_squared(np.zeros(2), np.zeros(3))


def test_residuals_multiclass_uniform():
    R = residuals_multiclass(np.zeros((1, 3)), [0])
    assert R[0].tolist() == pytest.approx([2 / 3, -1 / 3, -1 / 3])
    with pytest.raises(DataError):
        residuals_multiclass(np.zeros((1, 3)), [3])


def test_residual_rows_sum_to_zero():
    rng = np.random.default_rng(0)
    R = residuals_multiclass(rng.normal(size=(20, 5)) * 30, rng.integers(0, 5, 20))
    assert np.allclose(R.sum(axis=1), 0.0)
    assert np.isfinite(softmax(np.array([[1000.0, -1000.0]]))).all()


def test_loss_values():
    y = np.array([1.0, 2.0])
    assert loss_value(y, y) == 0.0
    assert loss_value(np.zeros(1), np.array([2.0])) == 2.0
    assert loss_value(np.zeros((3, 2)), [0, 1, 0], "multiclass-logistic") == pytest.approx(math.log(2))


def test_config_validation():
    for bad in ({"eta": 0}, {"lam": -1}, {"iterations": 0}, {"depth": 0}, {"loss": "hinge"},
                {"iterations": 6000}, {"metric": "auc"}):
        with pytest.raises(ConfigError):
            TrainConfig(**bad)


def test_constant_target_one_iteration():
    X = np.random.default_rng(1).normal(size=(10, 2))
    ds = Dataset(X, np.full(10, 3.0))
    ens, trace = train(ds, CostSchedule([1.0, 1.0], 1.0), TrainConfig(iterations=1))
    assert ens.n_iterations == 1 and ens.trees[0].n_nodes == 1
    assert ens.decision_function(X).tolist() == pytest.approx([0.3] * 10)
    assert trace.cumulative_cost == [1.0]


def test_huge_lambda_uses_only_free_feature():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(200, 2))
    y = X[:, 0] + 0.3 * X[:, 1]
    ens, _ = train(Dataset(X, y), CostSchedule([1e9, 0.0], 1.0), TrainConfig(lam=1e6, iterations=30))
    assert ens.usage().used() == {1}


def test_train_loss_decreases_and_cost_trace():
    ds, sched = random_regression(300, 8, seed=3)
    ens, trace = train(ds, sched, TrainConfig(lam=1.0, iterations=60, depth=3))
    assert all(b <= a + 1e-12 for a, b in zip(trace.train_loss, trace.train_loss[1:]))
    assert trace.cumulative_cost[-1] == model_cost(ens.usage(), sched)
    seen = set()
    for new in trace.new_features:
        assert not new & seen
        seen |= new
    assert seen == ens.usage().used()
    assert set(np.flatnonzero(trace.phi == 0).tolist()) == seen


def test_lambda_zero_matches_plain():
    ds, sched = random_regression(200, 6, seed=4)
    cfg = TrainConfig(iterations=25)
    a, _ = train(ds, sched, cfg)
    b, _ = plain_stagewise(ds, sched, cfg)
    assert all(x[0].equals(y[0]) for x, y in zip(a.iterations, b.iterations))


def test_multiclass_training():
    full, sched = multiclass_blobs(450, 3, 4, seed=5)
    ds, val = full.subset(np.arange(300)), full.subset(np.arange(300, 450))
    ens, trace = train(ds, sched, TrainConfig(loss="multiclass-logistic", num_classes=3, iterations=20), val)
    assert ens.trees_per_iteration == 3 and len(ens.trees) == 60
    assert trace.metric == "accuracy" and trace.validation_metric[-1] > 0.8
    H = ens.decision_function(val.features)
    assert H.shape == (150, 3)
    assert trace.cumulative_cost[-1] == model_cost(ens.usage(), sched)


def test_multiclass_missing_class():
    X = np.zeros((4, 1))
    with pytest.raises(DataError):
        train(Dataset(X, np.array([0.0, 0, 1, 1])), CostSchedule([1.0], 1.0),
              TrainConfig(loss="multiclass-logistic", num_classes=3, iterations=1))


def test_staged_matches_truncation():
    ds, sched = random_regression(150, 5, seed=7)
    ens, _ = train(ds, sched, TrainConfig(iterations=12, lam=0.5))
    for j, H in enumerate(ens.staged_decision_function(ds.features), start=1):
        assert H.tobytes() == ens.truncate(j).decision_function(ds.features).tobytes()


def test_empty_ensemble_scores_zero():
    ens = Ensemble([], 0.1, "squared", 1, 3, CostSchedule([1, 1, 1], 1.0), {})
    assert ens.decision_function(np.ones((2, 3))).tolist() == [0.0, 0.0]
