"""Feed-forward neural network churn classifier with an end-to-end pipeline.

A from-scratch sigmoid multilayer perceptron trained by online
back-propagation with momentum, wrapped in a churn-prediction workflow:
CSV ingestion, one-hot and min-max encoding, topology search with early
stopping, confusion-matrix evaluation, and permutation field importance.
"""

from .errors import (
    ChurnNetError,
    ConfigError,
    EvaluationError,
    SchemaError,
    ShapeError,
    TrainingError,
)
from .network import (
    Activations,
    Deltas,
    LearningParams,
    Network,
    backward,
    forward,
    forward_batch,
    init_network,
    numeric_gradient,
    sigmoid,
    squared_error,
    train_example,
)
from .model import (
    EvalReport,
    ImportanceReport,
    Prediction,
    TrainedModel,
    TrainingConfig,
    TrainingSummary,
    evaluate,
    importance,
    load_model,
    predict,
    predict_batch,
    save_model,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "ChurnNetError",
    "ConfigError",
    "EvaluationError",
    "SchemaError",
    "ShapeError",
    "TrainingError",
    "Activations",
    "Deltas",
    "LearningParams",
    "Network",
    "backward",
    "forward",
    "forward_batch",
    "init_network",
    "numeric_gradient",
    "sigmoid",
    "squared_error",
    "train_example",
    "EvalReport",
    "ImportanceReport",
    "Prediction",
    "TrainedModel",
    "TrainingConfig",
    "TrainingSummary",
    "evaluate",
    "importance",
    "load_model",
    "predict",
    "predict_batch",
    "save_model",
    "train",
    "__version__",
]
