"""Cost-aware gradient boosting: trees pay for the features they extract."""

__version__ = "0.1.0"

from ._kernels import BACKEND_NAME, available_backends
from .boosting import Ensemble, TrainConfig, TrainTrace, plain_stagewise, train
from .cart import Tree, build_tree
from .cost import ExtractionState, FeatureUsage, model_cost, q_relax, relaxed_feature_cost, total_cost
from .dataset import CostSchedule, Dataset, load_dataset
from .errors import ConfigError, DataError, InvariantError, BoostError
from .evalx import MetricPoint, SweepConfig, accuracy, ndcg_at_k, select_best_iteration, sweep
from .inference import EarlyExitPolicy, PredictionRun, feature_usage_report, predict, predict_early_exit
from .modelio import load_model, save_model

__all__ = [
    "__version__", "BACKEND_NAME", "available_backends",
    "Ensemble", "TrainConfig", "TrainTrace", "plain_stagewise", "train",
    "Tree", "build_tree",
    "ExtractionState", "FeatureUsage", "model_cost", "q_relax", "relaxed_feature_cost", "total_cost",
    "CostSchedule", "Dataset", "load_dataset",
    "ConfigError", "DataError", "InvariantError", "BoostError",
    "MetricPoint", "SweepConfig", "accuracy", "ndcg_at_k", "select_best_iteration", "sweep",
    "EarlyExitPolicy", "PredictionRun", "feature_usage_report", "predict", "predict_early_exit",
    "load_model", "save_model",
]
