"""Churn CSV ingestion, validation, numeric encoding and train/holdout splits.

The expected file is a UTF-8 CSV with a header row naming the twenty customer
fields plus the churn label. Header matching is case-insensitive and tolerant
of spaces vs underscores, and a few spellings common in circulating copies of
the data ("intl plan", "number vmail messages"...) are accepted as aliases.
"""

from __future__ import annotations

import csv
import logging
import math
import re
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, SchemaError

log = logging.getLogger(__name__)

# Canonical field order. state and phone_number identify rather than describe
# a customer and never reach the model.
FIELD_NAMES = (
    "state",
    "account_length",
    "area_code",
    "phone_number",
    "international_plan",
    "voice_mail_plan",
    "num_vmail_messages",
    "total_day_minutes",
    "total_day_calls",
    "total_day_charge",
    "total_eve_minutes",
    "total_eve_calls",
    "total_eve_charge",
    "total_night_minutes",
    "total_night_calls",
    "total_night_charge",
    "total_intl_minutes",
    "total_intl_calls",
    "total_intl_charge",
    "customer_service_calls",
)
LABEL_FIELD = "churn"

DROPPED_FIELDS = ("state", "phone_number")
BINARY_FIELDS = ("international_plan", "voice_mail_plan")
CATEGORICAL_FIELDS = ("area_code",)
INT_FIELDS = (
    "account_length",
    "num_vmail_messages",
    "total_day_calls",
    "total_eve_calls",
    "total_night_calls",
    "total_intl_calls",
    "customer_service_calls",
)
FLOAT_FIELDS = (
    "total_day_minutes",
    "total_day_charge",
    "total_eve_minutes",
    "total_eve_charge",
    "total_night_minutes",
    "total_night_charge",
    "total_intl_minutes",
    "total_intl_charge",
)
NUMERIC_FIELDS = tuple(f for f in FIELD_NAMES if f in INT_FIELDS or f in FLOAT_FIELDS)

# Alternate header spellings seen in public copies of the dataset, already
# normalized by _canon_header.
_HEADER_ALIASES = {
    "number_vmail_messages": "num_vmail_messages",
    "intl_plan": "international_plan",
    "int_l_plan": "international_plan",
    "vmail_plan": "voice_mail_plan",
    "vmail_message": "num_vmail_messages",
    "phone": "phone_number",
    "account_len": "account_length",
    "custserv_calls": "customer_service_calls",
    "number_customer_service_calls": "customer_service_calls",
    "churn_label": "churn",
}

# Fraction of data rows that may fail to parse before the whole file is
# rejected.
MAX_BAD_ROW_FRACTION = 0.01


@dataclass
class CustomerRecord:
    """One customer row. ``churn`` is None when the file carries no label."""

    state: str
    account_length: int
    area_code: str
    phone_number: str
    international_plan: bool
    voice_mail_plan: bool
    num_vmail_messages: int
    total_day_minutes: float
    total_day_calls: int
    total_day_charge: float
    total_eve_minutes: float
    total_eve_calls: int
    total_eve_charge: float
    total_night_minutes: float
    total_night_calls: int
    total_night_charge: float
    total_intl_minutes: float
    total_intl_calls: int
    total_intl_charge: float
    customer_service_calls: int
    churn: bool | None = None


def _canon_header(name: str) -> str:
    key = re.sub(r"[^a-z0-9]+", "_", name.strip().lower()).strip("_")
    return _HEADER_ALIASES.get(key, key)


def _parse_yes_no(token: str, field: str) -> bool:
    v = token.strip().lower()
    if v == "yes":
        return True
    if v == "no":
        return False
    raise ValueError(f"{field} must be yes or no, got {token!r}")


def _parse_label(token: str) -> bool:
    # Both "True."/"False." and "yes"/"no" spellings occur in the wild.
    v = token.strip().rstrip(".").lower()
    if v in ("true", "yes"):
        return True
    if v in ("false", "no"):
        return False
    raise ValueError(f"churn label must be true/false or yes/no, got {token!r}")


def _parse_int(token: str, field: str) -> int:
    try:
        v = float(token)
    except ValueError:
        raise ValueError(f"{field} must be an integer, got {token!r}") from None
    if not math.isfinite(v) or v != int(v):
        raise ValueError(f"{field} must be an integer, got {token!r}")
    if v < 0:
        raise ValueError(f"{field} must be >= 0, got {token!r}")
    return int(v)


def _parse_float(token: str, field: str) -> float:
    try:
        v = float(token)
    except ValueError:
        raise ValueError(f"{field} must be a number, got {token!r}") from None
    if not math.isfinite(v):
        raise ValueError(f"{field} must be finite, got {token!r}")
    if v < 0:
        raise ValueError(f"{field} must be >= 0, got {token!r}")
    return v


def read_raw_csv(path):
    """Read header and raw data rows (lists of strings) from a CSV file."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty, expected a header row") from None
        rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    return header, rows


def map_header(header, require_label: bool = True) -> dict[str, int]:
    """Resolve a header row to a field -> column-index map, order-insensitive."""
    colmap: dict[str, int] = {}
    for idx, name in enumerate(header):
        canon = _canon_header(name)
        if canon in FIELD_NAMES or canon == LABEL_FIELD:
            if canon in colmap:
                raise SchemaError(f"duplicate header column for field {canon!r}")
            colmap[canon] = idx
        else:
            raise SchemaError(f"unknown header column {name!r}")
    missing = [f for f in FIELD_NAMES if f not in colmap]
    if require_label and LABEL_FIELD not in colmap:
        missing.append(LABEL_FIELD)
    if missing:
        raise SchemaError(f"missing header column(s): {', '.join(missing)}")
    return colmap


def parse_row(row, colmap: dict[str, int], line_no: int) -> CustomerRecord:
    """Parse one raw CSV row into a CustomerRecord; raises ValueError on bad cells."""
    n_cols = max(colmap.values()) + 1
    if len(row) < n_cols:
        raise ValueError(f"line {line_no}: expected {n_cols} columns, got {len(row)}")
    values: dict[str, object] = {}
    for f in FIELD_NAMES:
        token = row[colmap[f]]
        if f in ("state", "phone_number"):
            values[f] = token.strip()
        elif f == "area_code":
            values[f] = token.strip()
        elif f in BINARY_FIELDS:
            values[f] = _parse_yes_no(token, f)
        elif f in INT_FIELDS:
            values[f] = _parse_int(token, f)
        else:
            values[f] = _parse_float(token, f)
    if LABEL_FIELD in colmap:
        values[LABEL_FIELD] = _parse_label(row[colmap[LABEL_FIELD]])
    return CustomerRecord(**values)


def parse_csv(path, require_label: bool = True) -> list[CustomerRecord]:
    """Parse the churn CSV into records.

    Malformed rows are skipped with a logged warning carrying their line
    number; if more than MAX_BAD_ROW_FRACTION of the data rows are bad the
    whole file is rejected with a SchemaError.
    """
    header, rows = read_raw_csv(path)
    colmap = map_header(header, require_label=require_label)
    records: list[CustomerRecord] = []
    bad: list[tuple[int, str]] = []
    for i, row in enumerate(rows):
        line_no = i + 2  # header is line 1
        try:
            records.append(parse_row(row, colmap, line_no))
        except ValueError as exc:
            bad.append((line_no, str(exc)))
    if rows and len(bad) > MAX_BAD_ROW_FRACTION * len(rows):
        detail = "; ".join(f"line {ln}: {msg}" for ln, msg in bad[:5])
        raise SchemaError(
            f"{path}: {len(bad)} of {len(rows)} rows failed to parse ({detail} ...)"
        )
    for line_no, msg in bad:
        log.warning("%s: skipped line %d: %s", path, line_no, msg)
    log.info("%s: parsed %d records (%d rows skipped)", path, len(records), len(bad))
    return records


def write_csv(records, path) -> None:
    """Write records back out with canonical headers; inverse of parse_csv."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        labeled = any(r.churn is not None for r in records)
        header = list(FIELD_NAMES) + ([LABEL_FIELD] if labeled else [])
        writer.writerow(header)
        for r in records:
            writer.writerow(record_to_row(r, include_label=labeled))


def record_to_row(r: CustomerRecord, include_label: bool = True) -> list[str]:
    """Serialize a record as canonical CSV cells (floats via repr round-trip)."""
    row = []
    for f in FIELD_NAMES:
        v = getattr(r, f)
        if f in BINARY_FIELDS:
            row.append("yes" if v else "no")
        elif f in FLOAT_FIELDS:
            row.append(repr(v))
        else:
            row.append(str(v))
    if include_label and r.churn is not None:
        row.append("True." if r.churn else "False.")
    return row


@dataclass
class EncodingSchema:
    """Fitted feature mapping: categorical level maps plus min-max bounds.

    Bounds come from the training subset only; values outside them clamp at
    encode time rather than rescaling, so a holdout set can never leak into
    the normalization.
    """

    categorical_levels: dict[str, list[str]]
    numeric_bounds: dict[str, tuple[float, float]]
    constant_fields: list[str]
    feature_names: list[str]
    dropped_fields: tuple[str, ...] = DROPPED_FIELDS

    @property
    def feature_width(self) -> int:
        return len(self.feature_names)

    @property
    def retained_fields(self) -> list[str]:
        return [f for f in FIELD_NAMES if f not in self.dropped_fields]


@dataclass
class EncodedExample:
    """Feature vector in [0,1] plus, when labeled, a 2-element one-hot target."""

    features: np.ndarray
    target: np.ndarray | None


def one_hot_target(churn: bool) -> np.ndarray:
    """(1,0) for a loyal customer, (0,1) for a churner."""
    return np.array([0.0, 1.0]) if churn else np.array([1.0, 0.0])


def fit_schema(records) -> EncodingSchema:
    """Fit level maps and min-max bounds on a training subset."""
    if not records:
        raise ConfigError("cannot fit an encoding schema on zero records")
    categorical_levels = {
        f: sorted({getattr(r, f) for r in records}) for f in CATEGORICAL_FIELDS
    }
    numeric_bounds = {}
    constant_fields = []
    for f in NUMERIC_FIELDS:
        vals = [float(getattr(r, f)) for r in records]
        lo, hi = min(vals), max(vals)
        numeric_bounds[f] = (lo, hi)
        if lo == hi:
            constant_fields.append(f)

    feature_names = []
    for f in FIELD_NAMES:
        if f in DROPPED_FIELDS:
            continue
        if f in CATEGORICAL_FIELDS:
            feature_names.extend(f"{f}={level}" for level in categorical_levels[f])
        else:
            feature_names.append(f)
    return EncodingSchema(categorical_levels, numeric_bounds, constant_fields, feature_names)


def encode(record: CustomerRecord, schema: EncodingSchema) -> EncodedExample:
    """Encode one record against a fitted schema.

    Numeric features min-max scale to [0,1] and clamp outside the fitted
    bounds; constant features encode as 0.0; an unseen categorical level
    yields an all-zero one-hot group.
    """
    feats: list[float] = []
    for f in FIELD_NAMES:
        if f in schema.dropped_fields:
            continue
        if f in CATEGORICAL_FIELDS:
            levels = schema.categorical_levels[f]
            group = [0.0] * len(levels)
            value = getattr(record, f)
            if value in levels:
                group[levels.index(value)] = 1.0
            feats.extend(group)
        elif f in BINARY_FIELDS:
            feats.append(1.0 if getattr(record, f) else 0.0)
        else:
            lo, hi = schema.numeric_bounds[f]
            if lo == hi:
                feats.append(0.0)
            else:
                x = (float(getattr(record, f)) - lo) / (hi - lo)
                feats.append(min(1.0, max(0.0, x)))
    target = None if record.churn is None else one_hot_target(record.churn)
    return EncodedExample(np.array(feats), target)


def encode_features(records, schema: EncodingSchema):
    """Encode many records into a feature matrix.

    Returns ``(matrix, n_unseen)`` where n_unseen tallies categorical values
    that were absent from the training data and encoded as all-zero groups.
    """
    n_unseen = 0
    for r in records:
        for f in CATEGORICAL_FIELDS:
            if getattr(r, f) not in schema.categorical_levels[f]:
                n_unseen += 1
    matrix = np.array([encode(r, schema).features for r in records])
    if not records:
        matrix = matrix.reshape(0, schema.feature_width)
    if n_unseen:
        log.warning("%d categorical value(s) unseen at fit time, encoded as zeros", n_unseen)
    return matrix, n_unseen


def split(records, holdout_fraction: float, seed: int):
    """Deterministic shuffled partition into (train, holdout) lists."""
    if not 0.0 < holdout_fraction < 1.0:
        raise ConfigError(f"holdout_fraction must be in (0, 1), got {holdout_fraction}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(records))
    n_holdout = int(round(holdout_fraction * len(records)))
    holdout = [records[i] for i in order[:n_holdout]]
    train = [records[i] for i in order[n_holdout:]]
    return train, holdout


def with_field_values(records, field: str, values) -> list[CustomerRecord]:
    """Copies of records with one raw field replaced by the given values."""
    return [replace(r, **{field: v}) for r, v in zip(records, values)]
