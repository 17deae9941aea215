"""Human-readable JSON model files.

One tree per line so model diffs stay readable. Floats are written with
``repr`` (shortest text that parses back to the same double).
"""

from __future__ import annotations

import json

from .boosting import LOSSES, Ensemble
from .cart import Tree
from .dataset import CostSchedule
from .errors import DataError

FORMAT = "frugalboost-model"
VERSION = 1

_TREE_KEYS = ("feature", "threshold", "left", "right", "value")


def _tree_obj(t: Tree) -> dict:
    return {
        "kind": ["leaf" if f < 0 else "split" for f in t.feature.tolist()],
        "feature": [int(v) for v in t.feature],
        "threshold": [float(v) for v in t.threshold],
        "left": [int(v) for v in t.left],
        "right": [int(v) for v in t.right],
        "value": [float(v) for v in t.value],
    }


def dumps_model(ens: Ensemble) -> str:
    if ens.schedule is None:
        raise DataError("model has no cost schedule to store")
    header = {
        "format": FORMAT,
        "version": VERSION,
        "loss": ens.loss,
        "num_classes": ens.num_classes,
        "eta": ens.eta,
        "d": ens.d,
        "feature_costs": [float(c) for c in ens.schedule.costs],
        "tree_eval_cost": ens.schedule.tree_eval_cost,
        "meta": ens.meta,
    }
    head = json.dumps(header, sort_keys=True, indent=1)
    lines = [json.dumps([_tree_obj(t) for t in it], sort_keys=True) for it in ens.iterations]
    body = ",\n".join("  " + ln for ln in lines)
    trees = '"iterations": [\n' + body + "\n ]" if lines else '"iterations": []'
    return head[:-2] + ",\n " + trees + "\n}\n"


def save_model(ens: Ensemble, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_model(ens))


def loads_model(text: str) -> Ensemble:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"model file is not valid JSON: {exc}") from None
    if not isinstance(obj, dict) or obj.get("format") != FORMAT:
        raise DataError("not a frugalboost model file")
    if obj.get("version") != VERSION:
        raise DataError(f"unsupported model version {obj.get('version')!r}; expected {VERSION}")
    try:
        loss = obj["loss"]
        if loss not in LOSSES:
            raise DataError(f"unknown loss {loss!r} in model file")
        K = int(obj["num_classes"])
        d = int(obj["d"])
        schedule = CostSchedule(obj["feature_costs"], obj["tree_eval_cost"])
        per_iter = K if loss == "multiclass-logistic" else 1
        iterations = []
        for it in obj["iterations"]:
            if len(it) != per_iter:
                raise DataError(f"expected {per_iter} trees per iteration, found {len(it)}")
            trees = tuple(Tree(*(t[k] for k in _TREE_KEYS)) for t in it)
            for raw, t in zip(it, trees):
                kinds = ["leaf" if f < 0 else "split" for f in t.feature.tolist()]
                if raw.get("kind", kinds) != kinds:
                    raise DataError("node kinds disagree with node features")
                if t.feature.max() >= d:
                    raise DataError(f"tree splits on feature {t.feature.max()} but d={d}")
            iterations.append(trees)
        return Ensemble(iterations, float(obj["eta"]), loss, K, d, schedule, dict(obj.get("meta", {})))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DataError):
            raise
        raise DataError(f"malformed model file: {exc}") from None


def load_model(path) -> Ensemble:
    try:
        with open(path) as fh:
            text = fh.read()
    except FileNotFoundError:
        raise DataError(f"model file not found: {path}") from None
    return loads_model(text)
