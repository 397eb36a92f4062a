"""Training orchestration, scoring, evaluation, field importance, persistence.

Training searches single-hidden-layer topologies over a configurable width
range. Every candidate trains on the same train/holdout partition with its
own deterministically derived init stream, monitors holdout accuracy after
each epoch, and keeps the best-scoring snapshot (patience-based early stop).
The winner is the candidate with the highest holdout accuracy, smaller
hidden layer on ties.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, asdict

import numpy as np

from . import data
from .errors import ConfigError, EvaluationError, TrainingError
from .network import (
    LearningParams,
    Network,
    forward_batch,
    init_network,
    train_example,
)

log = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 1


@dataclass
class TrainingConfig:
    eta: float = 0.3
    alpha: float = 0.9
    max_epochs: int = 200
    patience: int = 20
    holdout_fraction: float = 0.25
    hidden_range: tuple[int, int] = (3, 7)
    seed: int = 0

    def __post_init__(self):
        LearningParams(self.eta, self.alpha)  # range check
        if self.max_epochs < 1:
            raise ConfigError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.patience < 1:
            raise ConfigError(f"patience must be >= 1, got {self.patience}")
        if not 0.0 < self.holdout_fraction < 1.0:
            raise ConfigError(
                f"holdout_fraction must be in (0, 1), got {self.holdout_fraction}"
            )
        lo, hi = self.hidden_range
        if lo > hi or lo < 1 or hi > 64:
            raise ConfigError(
                f"hidden_range must be a non-empty interval within [1, 64], got {self.hidden_range}"
            )

    @property
    def params(self) -> LearningParams:
        return LearningParams(self.eta, self.alpha)


@dataclass
class CandidateResult:
    """Outcome of one hidden-layer width in the topology search."""

    hidden: int
    epochs_run: int
    best_epoch: int
    holdout_accuracy: float


@dataclass
class TrainingSummary:
    epochs_run: int
    best_epoch: int
    holdout_accuracy: float
    seed: int
    n_train: int
    n_holdout: int
    candidates: list[CandidateResult]


@dataclass
class TrainedModel:
    network: Network
    schema: data.EncodingSchema
    topology: list[int]
    config: TrainingConfig
    summary: TrainingSummary


@dataclass
class Prediction:
    predicted_churn: bool
    confidence: float


@dataclass
class EvalReport:
    """2x2 actual-vs-predicted matrix; rows actual (false, true), columns predicted."""

    confusion: tuple[tuple[int, int], tuple[int, int]]
    row_percentages: tuple[tuple[float, float], tuple[float, float]]
    total: int
    overall_accuracy: float
    loyal_recall: float
    churner_recall: float


@dataclass
class ImportanceReport:
    """Per-field scores in [0,1], sorted descending (ties lexicographic)."""

    entries: list[tuple[str, float]]
    baseline_accuracy: float


def _candidate_seeds(seed: int, hidden: int) -> tuple[int, int]:
    # Well-mixed, collision-free derivation of (init, shuffle) seeds per
    # candidate so all widths are comparable under one top-level seed.
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(hidden,))
    init_seed, shuffle_seed = (int(s) for s in ss.generate_state(2))
    return init_seed, shuffle_seed


def predicted_classes(net: Network, features: np.ndarray) -> np.ndarray:
    """Boolean churn predictions for a feature matrix; ties resolve to loyal."""
    out = forward_batch(net, features)
    return out[:, 1] > out[:, 0]


def _accuracy(net: Network, features: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean(predicted_classes(net, features) == labels))


def _train_candidate(hidden, x_train, t_train, x_hold, y_hold, config):
    feature_width = x_train.shape[1]
    init_seed, shuffle_seed = _candidate_seeds(config.seed, hidden)
    net = init_network([feature_width, hidden, 2], init_seed)
    shuffle_rng = np.random.default_rng(shuffle_seed)
    params = config.params

    best_net = net.copy()
    best_acc = _accuracy(net, x_hold, y_hold)
    best_epoch = 0
    stale = 0
    epoch = 0
    for epoch in range(1, config.max_epochs + 1):
        for i in shuffle_rng.permutation(len(x_train)):
            train_example(net, x_train[i], t_train[i], params)
        if not net.all_finite():
            raise TrainingError(
                f"non-finite parameter after epoch {epoch} (hidden={hidden}); "
                "lower eta or alpha"
            )
        acc = _accuracy(net, x_hold, y_hold)
        if acc > best_acc:
            best_acc, best_epoch, best_net = acc, epoch, net.copy()
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                break
    result = CandidateResult(hidden, epoch, best_epoch, best_acc)
    return result, best_net


def train(records, config: TrainingConfig) -> TrainedModel:
    """Fit the full pipeline: split, encode, search topologies, keep the best.

    Requires at least 50 records with both classes present. Non-convergence
    is not an error; each candidate contributes its best holdout snapshot.
    """
    if len(records) < 50:
        raise TrainingError(f"need at least 50 records to train, got {len(records)}")
    labels_all = [r.churn for r in records]
    if any(l is None for l in labels_all):
        raise TrainingError("training data must be fully labeled")
    if len(set(labels_all)) < 2:
        raise TrainingError("training data contains a single class only")

    train_recs, hold_recs = data.split(records, config.holdout_fraction, config.seed)
    schema = data.fit_schema(train_recs)
    x_train, _ = data.encode_features(train_recs, schema)
    t_train = np.array([data.one_hot_target(r.churn) for r in train_recs])
    x_hold, _ = data.encode_features(hold_recs, schema)
    y_hold = np.array([r.churn for r in hold_recs], dtype=bool)

    lo, hi = config.hidden_range
    candidates: list[CandidateResult] = []
    winner = None
    winner_net = None
    for hidden in range(lo, hi + 1):
        result, net = _train_candidate(hidden, x_train, t_train, x_hold, y_hold, config)
        candidates.append(result)
        log.info(
            "candidate hidden=%d: holdout accuracy %.4f (best epoch %d, ran %d)",
            hidden, result.holdout_accuracy, result.best_epoch, result.epochs_run,
        )
        if winner is None or result.holdout_accuracy > winner.holdout_accuracy:
            winner, winner_net = result, net

    summary = TrainingSummary(
        epochs_run=winner.epochs_run,
        best_epoch=winner.best_epoch,
        holdout_accuracy=winner.holdout_accuracy,
        seed=config.seed,
        n_train=len(train_recs),
        n_holdout=len(hold_recs),
        candidates=candidates,
    )
    topology = [schema.feature_width, winner.hidden, 2]
    return TrainedModel(winner_net, schema, topology, config, summary)


def classify_outputs(outputs) -> tuple[bool, float]:
    """Decision rule on the two output activations.

    Predicted class is the larger activation (tie goes to loyal); confidence
    is the winning activation over the sum of both, so scaling both outputs
    by any positive constant changes nothing.
    """
    loyal, churner = float(outputs[0]), float(outputs[1])
    predicted = churner > loyal
    winning = churner if predicted else loyal
    total = loyal + churner
    confidence = winning / total if total > 0 else 0.5
    return predicted, confidence


def predict(model: TrainedModel, record) -> Prediction:
    """Score one customer record."""
    example = data.encode(record, model.schema)
    out = forward_batch(model.network, example.features[np.newaxis, :])[0]
    predicted, confidence = classify_outputs(out)
    return Prediction(predicted, confidence)


def predict_batch(model: TrainedModel, records) -> list[Prediction]:
    """Score many records with one forward pass."""
    if not records:
        return []
    feats, _ = data.encode_features(records, model.schema)
    outs = forward_batch(model.network, feats)
    return [Prediction(*classify_outputs(o)) for o in outs]


def evaluate(model: TrainedModel, records) -> EvalReport:
    """Confusion matrix of actual (rows) vs predicted (columns) churn."""
    if not records:
        raise EvaluationError("no records to evaluate")
    if any(r.churn is None for r in records):
        raise EvaluationError("evaluation records must carry a churn label")
    actual = np.array([r.churn for r in records], dtype=bool)
    feats, _ = data.encode_features(records, model.schema)
    predicted = predicted_classes(model.network, feats)

    tn = int(np.sum(~actual & ~predicted))
    fp = int(np.sum(~actual & predicted))
    fn = int(np.sum(actual & ~predicted))
    tp = int(np.sum(actual & predicted))

    def row_pct(a: int, b: int) -> tuple[float, float]:
        total = a + b
        if total == 0:
            return 0.0, 0.0
        return 100.0 * a / total, 100.0 * b / total

    return EvalReport(
        confusion=((tn, fp), (fn, tp)),
        row_percentages=(row_pct(tn, fp), row_pct(fn, tp)),
        total=len(records),
        overall_accuracy=(tn + tp) / len(records),
        loyal_recall=tn / (tn + fp) if tn + fp else 0.0,
        churner_recall=tp / (fn + tp) if fn + tp else 0.0,
    )


def importance(model: TrainedModel, records, seed: int = 0) -> ImportanceReport:
    """Permutation-based relative importance of every retained input field.

    Each raw field's values are shuffled across records (all derived features
    move together) with a deterministic per-field permutation; the resulting
    accuracy drop, clamped at zero and scaled by the largest drop, is the
    field's score. Fields whose shuffling changes nothing score 0.0.
    """
    if not records:
        raise EvaluationError("no records to measure importance on")
    if any(r.churn is None for r in records):
        raise EvaluationError("importance records must carry a churn label")
    if len(records) < 100:
        log.warning(
            "importance measured on only %d records; scores may be noisy", len(records)
        )
    actual = np.array([r.churn for r in records], dtype=bool)
    feats, _ = data.encode_features(records, model.schema)
    baseline = float(np.mean(predicted_classes(model.network, feats) == actual))

    drops: dict[str, float] = {}
    for idx, field in enumerate(model.schema.retained_fields):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(idx,))
        )
        order = rng.permutation(len(records))
        values = [getattr(records[i], field) for i in order]
        shuffled = data.with_field_values(records, field, values)
        sh_feats, _ = data.encode_features(shuffled, model.schema)
        acc = float(np.mean(predicted_classes(model.network, sh_feats) == actual))
        drops[field] = max(0.0, baseline - acc)

    max_drop = max(drops.values())
    scores = {
        f: (d / max_drop if max_drop > 0 else 0.0) for f, d in drops.items()
    }
    entries = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return ImportanceReport(entries, baseline)


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "config": {
            "eta": model.config.eta,
            "alpha": model.config.alpha,
            "max_epochs": model.config.max_epochs,
            "patience": model.config.patience,
            "holdout_fraction": model.config.holdout_fraction,
            "hidden_range": list(model.config.hidden_range),
            "seed": model.config.seed,
        },
        "schema": {
            "dropped_fields": list(model.schema.dropped_fields),
            "categorical_levels": model.schema.categorical_levels,
            "numeric_bounds": {
                f: list(b) for f, b in model.schema.numeric_bounds.items()
            },
            "constant_fields": model.schema.constant_fields,
            "feature_names": model.schema.feature_names,
        },
        "topology": model.topology,
        "weights": [w.tolist() for w in model.network.weights],
        "thresholds": [t.tolist() for t in model.network.thresholds],
        "summary": {
            "epochs_run": model.summary.epochs_run,
            "best_epoch": model.summary.best_epoch,
            "holdout_accuracy": model.summary.holdout_accuracy,
            "seed": model.summary.seed,
            "n_train": model.summary.n_train,
            "n_holdout": model.summary.n_holdout,
            "candidates": [asdict(c) for c in model.summary.candidates],
        },
    }


def save_model(model: TrainedModel, path) -> None:
    """Persist a model as a self-describing JSON file.

    Floats serialize through repr, so reloading reproduces every weight
    bit-exactly and predictions survive a save/load round trip unchanged.
    """
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> TrainedModel:
    """Inverse of save_model; momentum buffers come back zeroed."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ConfigError(
            f"{path}: unsupported model format version {version!r}, "
            f"expected {MODEL_FORMAT_VERSION}"
        )
    cfg = doc["config"]
    config = TrainingConfig(
        eta=cfg["eta"],
        alpha=cfg["alpha"],
        max_epochs=cfg["max_epochs"],
        patience=cfg["patience"],
        holdout_fraction=cfg["holdout_fraction"],
        hidden_range=tuple(cfg["hidden_range"]),
        seed=cfg["seed"],
    )
    sch = doc["schema"]
    schema = data.EncodingSchema(
        categorical_levels={f: list(v) for f, v in sch["categorical_levels"].items()},
        numeric_bounds={f: (b[0], b[1]) for f, b in sch["numeric_bounds"].items()},
        constant_fields=list(sch["constant_fields"]),
        feature_names=list(sch["feature_names"]),
        dropped_fields=tuple(sch["dropped_fields"]),
    )
    topology = [int(s) for s in doc["topology"]]
    network = Network(
        topology,
        [np.array(w, dtype=float) for w in doc["weights"]],
        [np.array(t, dtype=float) for t in doc["thresholds"]],
    )
    summ = doc["summary"]
    summary = TrainingSummary(
        epochs_run=summ["epochs_run"],
        best_epoch=summ["best_epoch"],
        holdout_accuracy=summ["holdout_accuracy"],
        seed=summ["seed"],
        n_train=summ["n_train"],
        n_holdout=summ["n_holdout"],
        candidates=[CandidateResult(**c) for c in summ["candidates"]],
    )
    return TrainedModel(network, schema, topology, config, summary)
