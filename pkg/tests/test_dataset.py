import numpy as np
import pytest

from frugalboost.dataset import (CostSchedule, Dataset, load_costs, load_dataset, parse_data_lines,
                                 replicate_by_label, save_costs, save_dataset, split_train_validation)
from frugalboost.errors import ConfigError, DataError


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_parse_two_lines():
    ds = parse_data_lines(["2 qid:1 1:0.5 3:1.0", "0 qid:1 2:0.3"])
    assert (ds.n, ds.d) == (2, 3)
    assert ds.query_ids.tolist() == [1, 1]
    assert ds.features.tolist() == [[0.5, 0.0, 1.0], [0.0, 0.3, 0.0]]
    assert ds.labels.tolist() == [2.0, 0.0]


def test_empty_file(tmp_path):
    with pytest.raises(DataError, match="no examples"):
        load_dataset(write(tmp_path, "e.txt", "# nothing\n\n"))


def test_malformed_line_number(tmp_path):
    p = write(tmp_path, "bad.txt", "1 1:0.5\n1 2:abc\n")
    with pytest.raises(DataError, match="2"):
        load_dataset(p)


def test_costs_echo_discrete_values(tmp_path):
    vals = [1, 5, 10, 20, 50, 100, 150]
    data = write(tmp_path, "d.txt", "1 " + " ".join(f"{i + 1}:1" for i in range(7)) + "\n")
    costs = write(tmp_path, "c.txt", "tree_eval_cost,1\n" + "".join(f"{i + 1},{v}\n" for i, v in enumerate(vals)))
    _, sched = load_dataset(data, costs)
    assert sched.costs.tolist() == [float(v) for v in vals]
    assert sched.tree_eval_cost == 1.0


def test_missing_cost_entry(tmp_path):
    data = write(tmp_path, "d.txt", "1 1:1 2:1\n")
    costs = write(tmp_path, "c.txt", "tree_eval_cost,1\n1,5\n")
    with pytest.raises(DataError):
        load_dataset(data, costs)


def test_negative_cost(tmp_path):
    data = write(tmp_path, "d.txt", "1 1:1\n")
    costs = write(tmp_path, "c.txt", "1,-5\n")
    with pytest.raises(DataError):
        load_dataset(data, costs)


def test_class_labels_out_of_range(tmp_path):
    data = write(tmp_path, "d.txt", "0 1:1\n3 1:2\n")
    with pytest.raises(DataError):
        load_dataset(data, task="classification", num_classes=2)


def test_non_finite_rejected():
    with pytest.raises(DataError):
        Dataset(np.array([[np.nan]]), np.array([1.0]))


def test_dataset_read_only():
    ds = Dataset(np.zeros((2, 2)), np.zeros(2))
    with pytest.raises(ValueError):
        ds.features[0, 0] = 1.0


def test_save_load_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    ds = Dataset(rng.normal(size=(6, 3)), rng.integers(0, 3, 6).astype(float), np.repeat([4, 9], 3))
    save_dataset(ds, tmp_path / "x.txt")
    back, _ = load_dataset(tmp_path / "x.txt")
    assert back.equals(ds)


def test_save_costs_roundtrip(tmp_path):
    sched = CostSchedule([1.5, 0.0, 20.0], 0.25)
    save_costs(sched, tmp_path / "c.txt")
    back = load_costs(tmp_path / "c.txt", 3, False)
    assert back.costs.tolist() == sched.costs.tolist() and back.tree_eval_cost == 0.25


def test_replicate_by_label():
    ds = Dataset(np.arange(3.0)[:, None], np.array([0.0, 2.0, 0.0]))
    out = replicate_by_label(ds, 0.0, 2)
    assert out.labels.tolist() == [0, 0, 2, 0, 0]
    assert replicate_by_label(ds, 0.0, 1).equals(ds)
    one_zero = Dataset(np.arange(3.0)[:, None], np.array([0.0, 1.0, 2.0]))
    assert replicate_by_label(one_zero, 0.0, 10).n == 12


def test_split_queries_deterministic():
    ds = Dataset(np.arange(30.0)[:, None], np.zeros(30), np.repeat(np.arange(10), 3))
    a_tr, a_va = split_train_validation(ds, 0.8, 7)
    b_tr, b_va = split_train_validation(ds, 0.8, 7)
    assert len(np.unique(a_tr.query_ids)) == 8 and len(np.unique(a_va.query_ids)) == 2
    assert a_tr.equals(b_tr) and a_va.equals(b_va)
    assert not set(a_tr.query_ids.tolist()) & set(a_va.query_ids.tolist())


def test_split_empty_part():
    ds = Dataset(np.arange(4.0)[:, None], np.zeros(4), np.array([0, 0, 1, 1]))
    with pytest.raises(DataError, match="empty"):
        split_train_validation(ds, 0.999, 0)


def test_split_plain_examples():
    ds = Dataset(np.arange(4.0)[:, None], np.zeros(4))
    tr, va = split_train_validation(ds, 0.5, 1)
    assert (tr.n, va.n) == (2, 2)


def test_cost_schedule_validation():
    with pytest.raises((ConfigError, DataError)):
        CostSchedule([1.0, -1.0], 1.0)
    with pytest.raises((ConfigError, DataError)):
        CostSchedule([1.0], 1.0).check(2)
