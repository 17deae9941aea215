import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from frugalboost.boosting import TrainConfig, plain_stagewise
from frugalboost.errors import ConfigError, DataError
from frugalboost.evalx import (SWEEP_HEADER, SweepConfig, accuracy, feature_subset_mask, ndcg_at_k,
                               select_best_iteration, sweep, write_sweep_csv)
from frugalboost.dataset import CostSchedule
from frugalboost.inference import predict
from frugalboost.metrics import ndcg_by_query
from frugalboost.synthetic import ranking_queries


def test_ndcg_cases():
    assert ndcg_at_k([[3, 2, 1]], [[2, 1, 0]]) == 1.0
    assert ndcg_at_k([[5, 4, 3, 2, 1, 0]], [[0, 1, 0, 0, 0, 0]]) == pytest.approx(0.6309, abs=1e-4)
    assert ndcg_at_k([[1, 2]], [[0, 0]]) == 1.0
    with pytest.raises(DataError):
        ndcg_at_k([], [])


def test_ndcg_ties_by_index():
    # equal scores: document order decides, so the relevant doc at index 1 sits at rank 2
    assert ndcg_at_k([[0, 0]], [[0, 1]]) == 1 / math.log2(3)


@given(st.lists(st.tuples(st.floats(-5, 5, allow_nan=False), st.integers(0, 4)), min_size=1, max_size=15),
       st.integers(1, 10), st.randoms())
def test_ndcg_bounds_and_idcg_permutation(docs, k, rnd):
    s = [a for a, _ in docs]
    lab = [b for _, b in docs]
    v = ndcg_at_k([s], [lab], k)
    assert 0.0 <= v <= 1.0 + 1e-12
    # ranking by the labels themselves is ideal whatever the document order
    idx = list(range(len(docs)))
    rnd.shuffle(idx)
    assert ndcg_at_k([[lab[i] for i in idx]], [[lab[i] for i in idx]], k) == pytest.approx(1.0)


def test_accuracy_cases():
    assert accuracy(np.eye(4), [0, 1, 2, 3]) == 1.0
    assert accuracy(np.zeros((3, 2)), [0, 0, 0]) == 1.0
    S = np.array([[1, 0], [1, 0], [1, 0], [0, 1]])
    assert accuracy(S, [1, 1, 1, 0]) == 0.0
    assert accuracy(S, [0, 1, 1, 0]) == 0.25
    with pytest.raises(DataError):
        accuracy(np.zeros((2, 2)), [0])


def test_select_best_iteration():
    assert select_best_iteration([0.1, 0.3, 0.3, 0.2]) == 2
    assert select_best_iteration([0.1, 0.2, 0.3]) == 3
    assert select_best_iteration([0.5]) == 1
    with pytest.raises(DataError):
        select_best_iteration([])


def test_sweep_config_validation():
    with pytest.raises(ConfigError):
        SweepConfig((), TrainConfig())
    with pytest.raises(ConfigError):
        SweepConfig((1.0, 0.0), TrainConfig())
    with pytest.raises(ConfigError):
        SweepConfig((0.0,), TrainConfig(), "auc")


@pytest.fixture(scope="module")
def rank_sets():
    return ranking_queries(30, 10, 6, 1), ranking_queries(15, 10, 6, 2)[0], ranking_queries(15, 10, 6, 3)[0]


def test_sweep_zero_matches_plain(rank_sets):
    (tr, sched), va, te = rank_sets
    base = TrainConfig(iterations=40, depth=3, metric="ndcg5")
    (pt,) = sweep(tr, va, te, sched, SweepConfig((0.0,), base))
    ens, trace = plain_stagewise(tr, sched, base, va)
    best = int(np.argmax(trace.validation_metric)) + 1
    model = ens.truncate(best)
    assert pt.best_iteration == best
    assert pt.test_metric == ndcg_by_query(predict(model, te).scores, te.labels, te.query_groups(), 5)
    assert pt.model_cost == trace.cumulative_cost[best - 1]


def test_sweep_duplicates_and_order(rank_sets, tmp_path):
    (tr, sched), va, te = rank_sets
    base = TrainConfig(iterations=30, depth=3)
    pts = sweep(tr, va, te, sched, SweepConfig((0.5, 0.5, 50.0), base))
    assert pts[0] == pts[1]
    assert [p.lam for p in pts] == [0.5, 0.5, 50.0]
    write_sweep_csv(pts, tmp_path / "s.csv")
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == ",".join(SWEEP_HEADER) and len(lines) == 4
    for line in lines[1:]:
        [float(v) for v in line.split(",")]


def test_feature_subset_mask():
    assert feature_subset_mask(CostSchedule([1, 5, 20, 1], 1.0), 5) == {0, 1, 3}
