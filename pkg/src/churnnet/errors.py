"""Exception types shared across the package."""


class ChurnNetError(Exception):
    """Base class for all churnnet errors."""


class ConfigError(ChurnNetError):
    """Invalid configuration value (bad layer sizes, rates, fractions...)."""


class ShapeError(ChurnNetError):
    """Vector or matrix dimensions do not match the network topology."""


class SchemaError(ChurnNetError):
    """CSV header or row content does not conform to the expected schema."""


class TrainingError(ChurnNetError):
    """Training cannot proceed (single-class data, non-finite parameters)."""


class EvaluationError(ChurnNetError):
    """Evaluation cannot proceed (empty or unlabeled input)."""
