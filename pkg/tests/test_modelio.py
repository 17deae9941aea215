import json

import numpy as np
import pytest

from frugalboost.boosting import TrainConfig, train
from frugalboost.errors import DataError
from frugalboost.modelio import dumps_model, load_model, loads_model, save_model
from frugalboost.synthetic import multiclass_blobs, random_regression


@pytest.mark.parametrize("kind", ["squared", "multiclass"])
def test_roundtrip_exact(kind, tmp_path):
    if kind == "squared":
        ds, sched = random_regression(200, 6, seed=1)
        cfg = TrainConfig(iterations=15, lam=0.3)
    else:
        ds, sched = multiclass_blobs(200, 3, 6, seed=1)
        cfg = TrainConfig(iterations=8, loss="multiclass-logistic", num_classes=3)
    ens, _ = train(ds, sched, cfg)
    save_model(ens, tmp_path / "m.json")
    back = load_model(tmp_path / "m.json")
    X = np.random.default_rng(2).normal(size=(1000, 6)) * 3
    assert back.decision_function(X).tobytes() == ens.decision_function(X).tobytes()
    assert dumps_model(back) == dumps_model(ens)
    obj = json.loads(dumps_model(ens))
    assert obj["meta"]["lambda"] == cfg.lam and obj["meta"]["seed"] == 0
    assert len(obj["iterations"]) == cfg.iterations


def test_version_mismatch():
    ds, sched = random_regression(50, 2, seed=0)
    ens, _ = train(ds, sched, TrainConfig(iterations=2))
    obj = json.loads(dumps_model(ens))
    obj["version"] = 99
    with pytest.raises(DataError, match="version"):
        loads_model(json.dumps(obj))


def test_corrupt_files(tmp_path):
    with pytest.raises(DataError):
        loads_model("{not json")
    with pytest.raises(DataError):
        loads_model('{"format": "other"}')
    with pytest.raises(DataError, match="not found"):
        load_model(tmp_path / "missing.json")
