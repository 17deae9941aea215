"""Dataset and feature-cost containers plus the SVMLight-style readers/writers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError

__all__ = [
    "Dataset",
    "CostSchedule",
    "parse_data_lines",
    "load_dataset",
    "load_costs",
    "save_dataset",
    "save_costs",
    "replicate_by_label",
    "split_train_validation",
]


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Dense feature matrix with labels and optional query grouping.

    Arrays are copied and made read-only on construction.
    """

    features: np.ndarray
    labels: np.ndarray
    query_ids: np.ndarray | None = None
    zero_based: bool = False

    def __post_init__(self):
        X = _frozen(self.features, np.float64)
        if X.ndim != 2:
            raise DataError(f"features must be a 2-d matrix, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain missing or non-finite values")
        y = _frozen(self.labels, np.float64)
        if y.shape != (X.shape[0],):
            raise DataError(f"labels length {y.shape[0]} does not match n={X.shape[0]}")
        if not np.all(np.isfinite(y)):
            raise DataError("labels contain non-finite values")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        if self.query_ids is not None:
            q = _frozen(self.query_ids, np.int64)
            if q.shape != (X.shape[0],):
                raise DataError(f"query_ids length {q.shape[0]} does not match n={X.shape[0]}")
            object.__setattr__(self, "query_ids", q)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.intp)
        q = None if self.query_ids is None else self.query_ids[rows]
        return Dataset(self.features[rows], self.labels[rows], q, self.zero_based)

    def class_labels(self, num_classes: int | None = None, require_all: bool = True) -> np.ndarray:
        """Labels as integer class ids, validated against ``0..K-1``."""
        y = self.labels
        if not np.all(y == np.round(y)):
            raise DataError("classification labels must be integers")
        yi = y.astype(np.int64)
        if yi.size and yi.min() < 0:
            raise DataError(f"class label {yi.min()} outside contiguous range 0..K-1")
        k = int(yi.max()) + 1 if num_classes is None else int(num_classes)
        if yi.size and yi.max() >= k:
            raise DataError(f"class label {yi.max()} outside contiguous range 0..{k - 1}")
        if require_all:
            missing = sorted(set(range(k)) - set(yi.tolist()))
            if missing:
                raise DataError(f"classes {missing} never appear; labels must cover 0..{k - 1}")
        return yi

    def query_groups(self) -> list[np.ndarray]:
        """Row indices per query, groups in order of first appearance."""
        if self.query_ids is None:
            raise DataError("dataset has no query ids")
        _, first, inverse = np.unique(self.query_ids, return_index=True, return_inverse=True)
        rank = np.argsort(np.argsort(first, kind="stable"), kind="stable")
        gid = rank[inverse]
        order = np.argsort(gid, kind="stable")
        bounds = np.flatnonzero(np.diff(gid[order])) + 1
        return np.split(order, bounds)

    def equals(self, other: "Dataset") -> bool:
        if (self.query_ids is None) != (other.query_ids is None):
            return False
        return (
            self.features.shape == other.features.shape
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
            and (self.query_ids is None or np.array_equal(self.query_ids, other.query_ids))
        )


@dataclass(frozen=True, eq=False)
class CostSchedule:
    """Per-feature acquisition costs and the cost of evaluating one tree."""

    costs: np.ndarray
    tree_eval_cost: float = 1.0

    def __post_init__(self):
        c = _frozen(self.costs, np.float64)
        if c.ndim != 1:
            raise DataError("costs must be a 1-d vector")
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise DataError("feature costs must be finite and non-negative")
        e = float(self.tree_eval_cost)
        if not math.isfinite(e) or e < 0:
            raise DataError(f"tree_eval_cost must be non-negative, got {e}")
        object.__setattr__(self, "costs", c)
        object.__setattr__(self, "tree_eval_cost", e)

    @property
    def d(self) -> int:
        return self.costs.shape[0]

    @classmethod
    def uniform(cls, d: int) -> "CostSchedule":
        return cls(np.ones(d), 1.0)

    def check(self, d: int) -> None:
        if self.d != d:
            raise DataError(f"cost schedule has {self.d} features, data has {d}")


def _parse_float(tok, lineno, what):
    try:
        v = float(tok)
    except ValueError:
        raise DataError(f"line {lineno}: malformed {what} {tok!r}") from None
    if not math.isfinite(v):
        raise DataError(f"line {lineno}: non-finite {what} {tok!r}")
    return v


def parse_data_lines(lines, n_features=None, zero_based=None):
    """Parse SVMLight-style lines into a :class:`Dataset`.

    Index base is auto-detected (any ``0`` index means 0-based) unless
    ``zero_based`` is given. ``n_features`` pads the matrix to a known width.
    """
    labels, qids, rows = [], [], []
    seen_qid = None
    min_idx, max_idx = None, -1
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        labels.append(_parse_float(toks[0], lineno, "label"))
        pos = 1
        has_q = len(toks) > 1 and toks[1].startswith("qid:")
        if seen_qid is None:
            seen_qid = has_q
        elif seen_qid != has_q:
            raise DataError(f"line {lineno}: qid present on some lines but not others")
        if has_q:
            try:
                qids.append(int(toks[1][4:]))
            except ValueError:
                raise DataError(f"line {lineno}: malformed qid {toks[1]!r}") from None
            pos = 2
        row = {}
        for tok in toks[pos:]:
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                raise DataError(f"line {lineno}: malformed feature token {tok!r}")
            try:
                idx = int(idx_s)
            except ValueError:
                raise DataError(f"line {lineno}: malformed feature index {idx_s!r}") from None
            if idx < 0:
                raise DataError(f"line {lineno}: negative feature index {idx}")
            if idx in row:
                raise DataError(f"line {lineno}: duplicate feature index {idx}")
            row[idx] = _parse_float(val_s, lineno, "feature value")
            min_idx = idx if min_idx is None else min(min_idx, idx)
            max_idx = max(max_idx, idx)
        rows.append(row)
    if not rows:
        raise DataError("no examples")

    if zero_based is None:
        zero_based = min_idx == 0
    if not zero_based and min_idx == 0:
        raise DataError("feature index 0 in 1-based data")
    offset = 0 if zero_based else 1
    d = max_idx + 1 - offset if max_idx >= 0 else 0
    if n_features is not None:
        if d > n_features:
            raise DataError(f"feature index {max_idx} exceeds expected feature count {n_features}")
        d = n_features
    X = np.zeros((len(rows), d))
    for i, row in enumerate(rows):
        for idx, v in row.items():
            X[i, idx - offset] = v
    return Dataset(X, labels, qids if seen_qid else None, zero_based)


def load_costs(path, d: int, zero_based: bool, referenced=None) -> CostSchedule:
    """Read a ``<index>,<cost>`` file; ``tree_eval_cost,<e>`` may appear as a header.

    ``referenced`` lists 0-based feature indices that must have a cost;
    other features without an entry cost 0.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"costs file not found: {path}")
    offset = 0 if zero_based else 1
    entries: dict[int, float] = {}
    e = 1.0
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise DataError(f"{path}:{lineno}: expected '<feature_index>,<cost>'")
        if parts[0] == "tree_eval_cost":
            e = _parse_float(parts[1], lineno, "tree_eval_cost")
            if e < 0:
                raise DataError(f"{path}:{lineno}: negative tree_eval_cost {e}")
            continue
        try:
            idx = int(parts[0]) - offset
        except ValueError:
            raise DataError(f"{path}:{lineno}: malformed feature index {parts[0]!r}") from None
        if idx < 0:
            raise DataError(f"{path}:{lineno}: feature index {parts[0]} out of range")
        c = _parse_float(parts[1], lineno, "cost")
        if c < 0:
            raise DataError(f"{path}:{lineno}: negative cost {c} for feature {parts[0]}")
        entries[idx] = c
    d = max([d] + [i + 1 for i in entries])
    costs = np.zeros(d)
    for i, c in entries.items():
        costs[i] = c
    if referenced is not None:
        missing = sorted(set(int(i) for i in referenced) - set(entries))
        if missing:
            raise DataError(f"feature index {missing[0] + offset} has no cost entry")
    return CostSchedule(costs, e)


def load_dataset(data_path, costs_path=None, task="regression", num_classes=None,
                 n_features=None, zero_based=None):
    """Load a data file and its cost schedule.

    Without ``costs_path`` every feature costs 1 and evaluating a tree costs 1.
    For ``task="classification"`` labels must be integer ids covering 0..K-1.
    """
    data_path = Path(data_path)
    if not data_path.is_file():
        raise DataError(f"data file not found: {data_path}")
    with data_path.open() as fh:
        ds = parse_data_lines(fh, n_features=n_features, zero_based=zero_based)
    if task == "classification":
        ds.class_labels(num_classes)
    elif task != "regression":
        raise DataError(f"unknown task {task!r}")
    if costs_path is None:
        return ds, CostSchedule.uniform(ds.d)
    used = np.flatnonzero(np.any(ds.features != 0, axis=0))
    schedule = load_costs(costs_path, ds.d, ds.zero_based, referenced=used)
    if schedule.d > ds.d:
        if n_features is not None:
            raise DataError(f"costs file indexes {schedule.d} features, expected {n_features}")
        X = np.zeros((ds.n, schedule.d))
        X[:, : ds.d] = ds.features
        ds = Dataset(X, ds.labels, ds.query_ids, ds.zero_based)
    return ds, schedule


def format_number(v: float) -> str:
    """Shortest round-trip text for a float; integral values without a trailing ``.0``."""
    v = float(v)
    if v.is_integer() and abs(v) < 2**53:
        return str(int(v))
    return repr(v)


def save_dataset(ds: Dataset, path) -> None:
    """Write every feature explicitly so a re-parse reproduces ``ds`` exactly."""
    offset = 0 if ds.zero_based else 1
    with open(path, "w") as fh:
        for i in range(ds.n):
            toks = [format_number(ds.labels[i])]
            if ds.query_ids is not None:
                toks.append(f"qid:{int(ds.query_ids[i])}")
            toks.extend(f"{j + offset}:{format_number(v)}" for j, v in enumerate(ds.features[i]))
            fh.write(" ".join(toks) + "\n")


def save_costs(schedule: CostSchedule, path, zero_based: bool = False) -> None:
    offset = 0 if zero_based else 1
    with open(path, "w") as fh:
        fh.write(f"tree_eval_cost,{format_number(schedule.tree_eval_cost)}\n")
        for j, c in enumerate(schedule.costs):
            fh.write(f"{j + offset},{format_number(c)}\n")


def replicate_by_label(ds: Dataset, label_value: float, factor: int) -> Dataset:
    """Repeat every example labelled ``label_value`` ``factor`` times, copies adjacent."""
    if int(factor) != factor or factor < 1:
        raise ValueError(f"factor must be an integer >= 1, got {factor}")
    reps = np.where(ds.labels == label_value, int(factor), 1)
    rows = np.repeat(np.arange(ds.n), reps)
    return ds.subset(rows)


def split_train_validation(ds: Dataset, fraction: float, seed: int):
    """Random split keeping whole query groups together when query ids exist.

    Returns ``(first, second)`` where ``first`` holds ``round(fraction * units)``
    units; example order inside each part follows the original order.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    if ds.query_ids is not None:
        units = ds.query_groups()
    else:
        units = [np.array([i]) for i in range(ds.n)]
    k = int(round(fraction * len(units)))
    if k == 0 or k == len(units):
        raise DataError(f"split fraction {fraction} on {len(units)} units leaves an empty part")
    perm = np.random.default_rng(seed).permutation(len(units))
    first = np.sort(np.concatenate([units[u] for u in perm[:k]]))
    second = np.sort(np.concatenate([units[u] for u in perm[k:]]))
    return ds.subset(first), ds.subset(second)
