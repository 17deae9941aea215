"""Command-line interface: ``frugalboost {train,predict,evaluate,sweep,cost-report}``.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .boosting import TrainConfig, metric_value, train
from .cost import model_cost
from .dataset import format_number, load_dataset, replicate_by_label, split_train_validation
from .errors import ConfigError, DataError, InvariantError, BoostError
from .evalx import SweepConfig, feature_subset_mask, sweep, write_sweep_csv
from .inference import EarlyExitPolicy, feature_usage_report, predict, predict_early_exit
from .modelio import load_model, save_model

log = logging.getLogger("frugalboost")

TRACE_HEADER = ["iteration", "train_loss", "validation_metric", "cumulative_cost", "new_features"]


def _floats(text):
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


def _ints(text):
    return tuple(int(v) for v in text.replace(";", ",").split(",") if v.strip())


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# key -> parser; absent keys take the defaults below
SCHEMA = {
    "train": str,
    "validation": str,
    "test": str,
    "costs": str,
    "model": str,
    "trace": str,
    "sweep_out": str,
    "eta": float,
    "lambda": float,
    "iterations": int,
    "max_iterations": int,
    "depth": int,
    "min_leaf": int,
    "loss": str,
    "num_classes": int,
    "feature_mask": _ints,
    "feature_max_cost": float,
    "seed": int,
    "metric": str,
    "validation_fraction": float,
    "replicate_label": float,
    "replicate_factor": int,
    "lambda_grid": _floats,
    "early_exit_mode": str,
    "exit_interval": int,
    "total_trees": int,
    "s": float,
    "threads": int,
    "zero_based": _bool,
}

DEFAULTS = {
    "eta": 0.1,
    "lambda": 0.0,
    "iterations": 3000,
    "max_iterations": 5000,
    "depth": 4,
    "min_leaf": 1,
    "loss": "squared",
    "seed": 0,
    "exit_interval": 10,
}


@dataclass
class RunConfig:
    values: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    def get(self, key, default=None):
        if key in self.values:
            return self.values[key]
        return DEFAULTS.get(key, default)

    def path(self, key, required=False):
        v = self.values.get(key)
        if v is None:
            if required:
                raise ConfigError(f"config key {key!r} is required")
            return None
        p = Path(v)
        return p if p.is_absolute() else self.base_dir / p

    def set(self, key, raw):
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            self.values[key] = SCHEMA[key](raw) if isinstance(raw, str) else raw
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from None

    def train_config(self, zero_based=False, schedule=None) -> TrainConfig:
        mask = self.get("feature_mask")
        if mask is not None:
            off = 0 if zero_based else 1
            mask = frozenset(i - off for i in mask)
        max_cost = self.get("feature_max_cost")
        if max_cost is not None:
            subset = feature_subset_mask(schedule, max_cost)
            mask = subset if mask is None else mask & subset
            if not mask:
                raise ConfigError(f"no feature costs at most {max_cost}")
        return TrainConfig(
            eta=self.get("eta"),
            lam=self.get("lambda"),
            iterations=self.get("iterations"),
            depth=self.get("depth"),
            min_leaf=self.get("min_leaf"),
            loss=self.get("loss"),
            num_classes=self.get("num_classes"),
            feature_mask=mask,
            seed=self.get("seed"),
            metric=self.get("metric"),
            max_iterations=self.get("max_iterations"),
            n_threads=self.get("threads"),
        )


def read_config(path) -> RunConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment. Unknown keys are errors."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cfg = RunConfig(base_dir=path.parent)
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key = key.strip()
        if key in cfg.values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        cfg.set(key, value.strip())
    return cfg


def _load_config(args) -> RunConfig:
    cfg = read_config(args.config) if args.config else RunConfig()
    for item in args.set or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        cfg.set(key.strip(), value.strip())
    for key, attr in (("seed", "seed"), ("eta", "eta"), ("lambda", "lam"),
                      ("iterations", "iterations"), ("depth", "depth"), ("threads", "threads")):
        v = getattr(args, attr, None)
        if v is not None:
            cfg.values[key] = v
    return cfg


def _task(cfg):
    return "classification" if cfg.get("loss") == "multiclass-logistic" else "regression"


def _replicate(cfg, ds):
    if cfg.get("replicate_factor") is None:
        return ds
    return replicate_by_label(ds, cfg.get("replicate_label", 0.0), cfg.get("replicate_factor"))


def _load_sets(cfg, need_test=False):
    zb = cfg.get("zero_based")
    train_ds, schedule = load_dataset(cfg.path("train", True), cfg.path("costs"), _task(cfg),
                                      cfg.get("num_classes"), zero_based=zb)
    zb = train_ds.zero_based

    def load_other(key):
        ds, _ = load_dataset(cfg.path(key, True), None, "regression", n_features=train_ds.d,
                             zero_based=zb)
        return ds

    validation = load_other("validation") if cfg.get("validation") else None
    if validation is None and cfg.get("validation_fraction") is not None:
        train_ds, validation = split_train_validation(train_ds, cfg.get("validation_fraction"),
                                                      cfg.get("seed"))
    test = load_other("test") if need_test else None
    train_ds = _replicate(cfg, train_ds)
    validation = _replicate(cfg, validation) if validation is not None else None
    test = _replicate(cfg, test) if test is not None else None
    return train_ds, validation, test, schedule


def write_trace(trace, path, zero_based=False) -> None:
    off = 0 if zero_based else 1
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for t in range(len(trace.train_loss)):
            vm = "" if trace.validation_metric is None else repr(float(trace.validation_metric[t]))
            feats = ";".join(str(a + off) for a in sorted(trace.new_features[t]))
            w.writerow([t + 1, repr(float(trace.train_loss[t])), vm,
                        format_number(trace.cumulative_cost[t]), feats])


def cmd_train(args) -> int:
    cfg = _load_config(args)
    train_ds, validation, _, schedule = _load_sets(cfg)
    tcfg = cfg.train_config(train_ds.zero_based, schedule)
    ens, trace = train(train_ds, schedule, tcfg, validation)
    ens.meta["zero_based"] = train_ds.zero_based
    if trace.cumulative_cost[-1] != model_cost(ens.usage(), schedule):
        raise InvariantError("trace cost disagrees with the model cost")
    model_path = cfg.path("model") or Path("model.json")
    trace_path = cfg.path("trace") or Path(str(model_path) + ".trace.csv")
    save_model(ens, model_path)
    write_trace(trace, trace_path, train_ds.zero_based)
    log.info("wrote %s (%d iterations) and %s", model_path, ens.n_iterations, trace_path)
    return 0


def _load_for_model(ens, path, task="regression"):
    zb = bool(ens.meta.get("zero_based", False))
    ds, _ = load_dataset(path, None, "regression", n_features=ens.d, zero_based=zb)
    return ds


def _policy(args):
    if args.early_exit_mode is None:
        return None
    if args.s is None:
        raise ConfigError("--s is required with --early-exit-mode")
    return EarlyExitPolicy(args.early_exit_mode, args.s, args.exit_interval, args.total_trees)


def cmd_predict(args) -> int:
    ens = load_model(args.model)
    ds = _load_for_model(ens, args.data)
    policy = _policy(args)
    run = predict(ens, ds) if policy is None else predict_early_exit(ens, ds, policy)
    if args.output:
        run.write(args.output)
    else:
        for line in run.lines():
            sys.stdout.write(line + "\n")
    return 0


def cmd_evaluate(args) -> int:
    ens = load_model(args.model)
    ds = _load_for_model(ens, args.data)
    policy = _policy(args)
    run = predict(ens, ds) if policy is None else predict_early_exit(ens, ds, policy)
    value = metric_value(args.metric, run.scores, ds, ens.loss)
    cost = model_cost(ens.usage(), ens.schedule)
    print(f"{args.metric}={value!r} model_cost={format_number(cost)} "
          f"mean_example_cost={format_number(run.mean_cost)}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    train_ds, validation, test, schedule = _load_sets(cfg, need_test=True)
    if validation is None:
        raise ConfigError("sweep needs 'validation' or 'validation_fraction'")
    grid = cfg.get("lambda_grid") or (cfg.get("lambda"),)
    base = cfg.train_config(train_ds.zero_based, schedule)
    metric = cfg.get("metric") or ("accuracy" if base.loss == "multiclass-logistic" else "ndcg5")
    points = sweep(train_ds, validation, test, schedule, SweepConfig(grid, base, metric))
    out = cfg.path("sweep_out")
    if out is None:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["lambda", "best_iteration", "validation_metric", "test_metric",
                    "model_cost", "mean_example_cost"])
        for p in points:
            w.writerow(p.row())
    else:
        write_sweep_csv(points, out)
    return 0


def cmd_cost_report(args) -> int:
    ens = load_model(args.model)
    off = 0 if ens.meta.get("zero_based", False) else 1
    fh = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cost", "n_features", "n_extracted", "fraction", "first_iterations"])
        for g in feature_usage_report(ens):
            first = ";".join(f"{a + off}:{it}" for a, it in sorted(g.first_iteration.items()))
            w.writerow([format_number(g.cost), g.n_features, g.n_extracted, repr(g.fraction), first])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="frugalboost", description="Cost-aware gradient boosting.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def config_args(sp):
        sp.add_argument("--config", help="key = value run configuration file")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--eta", type=float)
        sp.add_argument("--lambda", dest="lam", type=float)
        sp.add_argument("--iterations", type=int)
        sp.add_argument("--depth", type=int)
        sp.add_argument("--threads", type=int)

    def exit_args(sp):
        sp.add_argument("--early-exit-mode", choices=["ranking", "confidence"])
        sp.add_argument("--s", type=float)
        sp.add_argument("--exit-interval", type=int, default=10)
        sp.add_argument("--total-trees", type=int)

    sp = sub.add_parser("train", help="train a model and write it plus a trace CSV")
    config_args(sp)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("predict", help="score a data file")
    sp.add_argument("model")
    sp.add_argument("data")
    sp.add_argument("-o", "--output")
    exit_args(sp)
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("evaluate", help="print a metric and the test-time cost")
    sp.add_argument("model")
    sp.add_argument("data")
    sp.add_argument("--metric", choices=["ndcg5", "accuracy", "neg-loss"], default="ndcg5")
    exit_args(sp)
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("sweep", help="train over a lambda grid and write a trade-off CSV")
    config_args(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("cost-report", help="feature extraction by cost group")
    sp.add_argument("model")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_cost_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except BoostError as exc:
        print(f"frugalboost: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"frugalboost: error: {exc}", file=sys.stderr)
        return DataError.exit_code
    except Exception as exc:  # noqa: BLE001
        print(f"frugalboost: internal error: {exc!r}", file=sys.stderr)
        return InvariantError.exit_code


if __name__ == "__main__":
    sys.exit(main())
