"""Ingestion of software-metric datasets.

Covers parsing (a pragmatic ARFF subset plus headered CSV), mean imputation
of missing numeric cells, construction of labeled numeric datasets, class
ratio resampling for the balanced/unbalanced training regimes, and a
canonical plain-text on-disk form.

All operations are pure functions of their inputs (plus an explicit seed
where sampling is involved); inputs are never mutated.
"""

from __future__ import annotations

import csv
import hashlib
import io
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import TextIO

import numpy as np

log = logging.getLogger("intersmell.dataset_io")

__all__ = [
    "ParseError",
    "DatasetError",
    "Attribute",
    "RawTable",
    "DatasetDescriptor",
    "Dataset",
    "MissingReport",
    "DatasetStats",
    "parse_arff",
    "parse_csv",
    "impute_mean",
    "build_dataset",
    "resample",
    "dataset_stats",
    "dumps_dataset",
    "loads_dataset",
    "write_dataset",
    "read_dataset",
    "fingerprint",
]

KNOWN_SMELLS = ("LM", "FE", "GC", "DC")
GRANULARITIES = ("class", "method")
CONDITIONS = ("balanced", "unbalanced")

# Attribute names that mark the label column regardless of position.
_CLASS_NAME_HINTS = ("is_smell", "smelly")

BALANCED_FRACTION = Fraction(1, 3)
BALANCED_TOLERANCE = Fraction(1, 100)
UNBALANCED_FRACTION = Fraction(1, 10)


class ParseError(ValueError):
    """Malformed input file; carries the 1-based source line when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DatasetError(ValueError):
    """A structurally valid table or dataset violating an operation contract."""


# ---------------------------------------------------------------------------
# Raw tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Attribute:
    """One declared column: numeric when `levels` is None, nominal otherwise."""

    name: str
    levels: tuple[str, ...] | None = None

    @property
    def is_numeric(self) -> bool:
        return self.levels is None


@dataclass
class RawTable:
    """Parsed tabular data before imputation and label binarization.

    Cells are float (numeric), str (nominal level), or None (missing).
    `class_attribute` indexes a nominal attribute with exactly two levels.
    """

    attributes: list[Attribute]
    rows: list[list[object]]
    class_attribute: int
    relation: str = ""

    @property
    def attribute_names(self) -> list[str]:
        return [a.name for a in self.attributes]

    @property
    def class_levels(self) -> tuple[str, ...]:
        levels = self.attributes[self.class_attribute].levels
        assert levels is not None
        return levels

    def validate(self) -> None:
        n = len(self.attributes)
        for i, row in enumerate(self.rows):
            if len(row) != n:
                raise DatasetError(f"row {i} has {len(row)} cells, expected {n}")
        cls = self.attributes[self.class_attribute]
        if cls.is_numeric or len(cls.levels or ()) != 2:
            raise DatasetError(
                f"class attribute {cls.name!r} must be nominal with exactly 2 levels"
            )


def _as_lines(source: str | TextIO) -> list[str]:
    if isinstance(source, str):
        return source.splitlines()
    return source.read().splitlines()


_ATTR_RE = re.compile(
    r"""@attribute\s+('[^']*'|"[^"]*"|\S+)\s+(.+)$""", re.IGNORECASE
)


def _unquote(token: str) -> str:
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1]
    return token


def _parse_attribute(line: str, lineno: int) -> Attribute:
    m = _ATTR_RE.match(line)
    if m is None:
        raise ParseError(f"malformed @attribute declaration: {line!r}", lineno)
    name = _unquote(m.group(1))
    kind = m.group(2).strip()
    if kind.startswith("{"):
        if not kind.endswith("}"):
            raise ParseError(f"unterminated nominal level list: {kind!r}", lineno)
        levels = tuple(_unquote(tok) for tok in kind[1:-1].split(","))
        if any(not lv for lv in levels):
            raise ParseError(f"empty nominal level in {kind!r}", lineno)
        return Attribute(name, levels)
    if kind.lower() in ("numeric", "real", "integer"):
        return Attribute(name)
    raise ParseError(f"unsupported attribute type {kind!r}", lineno)


def _parse_cell(token: str, attr: Attribute, lineno: int) -> object:
    token = token.strip()
    if token == "?":
        return None
    if attr.is_numeric:
        try:
            return float(token)
        except ValueError:
            raise ParseError(
                f"non-numeric value {token!r} in numeric attribute {attr.name!r}",
                lineno,
            ) from None
    level = _unquote(token)
    if level not in (attr.levels or ()):
        raise ParseError(
            f"value {level!r} is not a declared level of {attr.name!r}", lineno
        )
    return level


def _pick_class_attribute(attributes: list[Attribute], lineno: int) -> int:
    for i, a in enumerate(attributes):
        if a.name.lower() in _CLASS_NAME_HINTS:
            if a.is_numeric or len(a.levels or ()) != 2:
                raise ParseError(
                    f"attribute {a.name!r} must be nominal with 2 levels to act "
                    "as the class attribute",
                    lineno,
                )
            return i
    two_level = [
        i for i, a in enumerate(attributes) if not a.is_numeric and len(a.levels or ()) == 2
    ]
    if not two_level:
        raise ParseError("no two-level nominal attribute to use as the class", lineno)
    return two_level[-1]


def parse_arff(source: str | TextIO) -> RawTable:
    """Parse the ARFF subset used by the public metric datasets.

    Supported: `@relation`, `@attribute <name> <numeric|real|integer|{a,b}>`,
    `@data` with comma-separated rows, `?` for missing values, full-line `%`
    comments, and single- or double-quoted attribute names. The class
    attribute is the nominal one named `is_smell`/`smelly` (case-insensitive)
    when present, otherwise the last two-level nominal attribute.
    """
    attributes: list[Attribute] = []
    rows: list[list[object]] = []
    relation = ""
    in_data = False
    data_line = 0
    for lineno, raw in enumerate(_as_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if not in_data:
            lowered = line.lower()
            if lowered.startswith("@relation"):
                relation = _unquote(line[len("@relation"):])
            elif lowered.startswith("@attribute"):
                attributes.append(_parse_attribute(line, lineno))
            elif lowered.startswith("@data"):
                if not attributes:
                    raise ParseError("@data section before any @attribute", lineno)
                in_data = True
                data_line = lineno
            else:
                raise ParseError(f"unrecognized header line: {line!r}", lineno)
        else:
            cells = line.split(",")
            if len(cells) != len(attributes):
                raise ParseError(
                    f"row has {len(cells)} values, expected {len(attributes)}", lineno
                )
            rows.append(
                [_parse_cell(tok, attr, lineno) for tok, attr in zip(cells, attributes)]
            )
    if not in_data:
        raise ParseError("missing @data section")
    class_idx = _pick_class_attribute(attributes, data_line)
    table = RawTable(attributes, rows, class_idx, relation)
    table.validate()
    return table


def parse_csv(source: str | TextIO, label_column: str) -> RawTable:
    """Parse headered CSV into the same table form as `parse_arff`.

    All columns except `label_column` must be numeric; empty cells or `?`
    mark missing values. The label column must contain exactly two distinct
    non-empty tokens (taken as nominal levels in order of first appearance).
    """
    text = source if isinstance(source, str) else source.read()
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("missing header row", 1) from None
    if not header or all(not h for h in header):
        raise ParseError("missing header row", 1)
    if label_column not in header:
        raise ParseError(f"unknown label column {label_column!r}", 1)
    class_idx = header.index(label_column)

    rows: list[list[object]] = []
    levels: list[str] = []
    for recno, record in enumerate(reader, start=2):
        if not record or all(not cell.strip() for cell in record):
            continue
        if len(record) != len(header):
            raise ParseError(
                f"row has {len(record)} values, expected {len(header)}", recno
            )
        row: list[object] = []
        for col, token in enumerate(record):
            token = token.strip()
            if token in ("", "?"):
                row.append(None)
            elif col == class_idx:
                row.append(token)
                if token not in levels:
                    levels.append(token)
            else:
                try:
                    row.append(float(token))
                except ValueError:
                    raise ParseError(
                        f"non-numeric value {token!r} in column {header[col]!r}", recno
                    ) from None
        rows.append(row)
    if len(levels) != 2:
        raise ParseError(
            f"label column {label_column!r} has {len(levels)} distinct values, expected 2"
        )
    attributes = [
        Attribute(name, tuple(levels)) if i == class_idx else Attribute(name)
        for i, name in enumerate(header)
    ]
    table = RawTable(attributes, rows, class_idx)
    table.validate()
    return table


# ---------------------------------------------------------------------------
# Imputation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MissingReport:
    """Missing-cell census of a table's feature columns before imputation."""

    total_missing: int
    per_feature_missing: dict[str, int]
    missing_fraction: float


def impute_mean(table: RawTable) -> tuple[RawTable, MissingReport]:
    """Replace each missing numeric cell with its column's arithmetic mean.

    Means are computed over the present values of the whole table. Nominal
    cells are left untouched. Returns a new table plus a report of the
    pre-imputation state (counts over non-class columns; the fraction is
    missing cells / (rows * feature columns)).
    """
    n_rows = len(table.rows)
    feature_idx = [i for i in range(len(table.attributes)) if i != table.class_attribute]

    per_feature: dict[str, int] = {}
    means: dict[int, float] = {}
    for i, attr in enumerate(table.attributes):
        column = [row[i] for row in table.rows]
        missing = sum(1 for cell in column if cell is None)
        if missing and i in feature_idx:
            per_feature[attr.name] = missing
        if attr.is_numeric:
            present = [cell for cell in column if cell is not None]
            if missing and not present:
                raise DatasetError(
                    f"feature {attr.name!r} is entirely missing; cannot impute a mean"
                )
            if missing:
                means[i] = float(np.mean(present))

    new_rows = [
        [
            means[i] if cell is None and i in means else cell
            for i, cell in enumerate(row)
        ]
        for row in table.rows
    ]
    total = sum(per_feature.values())
    cells = n_rows * len(feature_idx)
    report = MissingReport(total, per_feature, total / cells if cells else 0.0)
    repaired = RawTable(
        list(table.attributes), new_rows, table.class_attribute, table.relation
    )
    return repaired, report


# ---------------------------------------------------------------------------
# Datasets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DatasetDescriptor:
    """Identity of a metric dataset: which smell, language domain,
    granularity, and feature space (as an ordered list of metric names)."""

    name: str
    smell: str
    language: str
    granularity: str
    feature_names: tuple[str, ...]

    def __post_init__(self):
        if self.granularity not in GRANULARITIES:
            raise DatasetError(
                f"granularity must be one of {GRANULARITIES}, got {self.granularity!r}"
            )
        if not self.feature_names:
            raise DatasetError("feature_names must be non-empty")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise DatasetError("feature_names must be pairwise distinct")
        object.__setattr__(self, "feature_names", tuple(self.feature_names))


@dataclass(frozen=True)
class Dataset:
    """Numeric feature matrix plus binary smell labels (1 = smelly)."""

    descriptor: DatasetDescriptor
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        feats = np.ascontiguousarray(np.asarray(self.features, dtype=float))
        labels = np.asarray(self.labels, dtype=int).ravel()
        if feats.ndim != 2:
            raise DatasetError("features must be a 2-D matrix")
        if feats.shape[1] != len(self.descriptor.feature_names):
            raise DatasetError(
                f"feature matrix has {feats.shape[1]} columns but the descriptor "
                f"names {len(self.descriptor.feature_names)}"
            )
        if labels.shape[0] != feats.shape[0]:
            raise DatasetError("labels length must match the feature row count")
        if not np.all(np.isfinite(feats)):
            raise DatasetError("features contain non-finite values")
        if labels.size and not np.isin(labels, (0, 1)).all():
            raise DatasetError("labels must be 0 or 1")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def positive_count(self) -> int:
        return int(self.labels.sum())

    @property
    def negative_count(self) -> int:
        return self.n_rows - self.positive_count


def build_dataset(
    table: RawTable,
    *,
    name: str,
    smell: str,
    language: str,
    granularity: str,
    positive_level: str,
) -> Dataset:
    """Binarize an imputed table: label 1 where the class cell equals
    `positive_level`, features = the non-class numeric attributes in order."""
    missing = sum(1 for row in table.rows for cell in row if cell is None)
    if missing:
        raise DatasetError(f"{missing} missing cells remain; run impute_mean first")
    levels = table.class_levels
    if positive_level not in levels:
        raise DatasetError(
            f"positive level {positive_level!r} is not a class level of {levels}"
        )
    feat_cols = [
        i
        for i, a in enumerate(table.attributes)
        if i != table.class_attribute and a.is_numeric
    ]
    descriptor = DatasetDescriptor(
        name=name,
        smell=smell,
        language=language,
        granularity=granularity,
        feature_names=tuple(table.attributes[i].name for i in feat_cols),
    )
    features = np.array(
        [[row[i] for i in feat_cols] for row in table.rows], dtype=float
    ).reshape(len(table.rows), len(feat_cols))
    labels = np.array(
        [1 if row[table.class_attribute] == positive_level else 0 for row in table.rows],
        dtype=int,
    )
    return Dataset(descriptor, features, labels)


# ---------------------------------------------------------------------------
# Resampling
# ---------------------------------------------------------------------------


def _take_subset(ds: Dataset, keep_mask: np.ndarray) -> Dataset:
    return Dataset(ds.descriptor, ds.features[keep_mask], ds.labels[keep_mask])


def _downsample(ds: Dataset, class_value: int, keep: int, seed: int) -> Dataset:
    idx = np.flatnonzero(ds.labels == class_value)
    rng = np.random.default_rng(seed)
    chosen = rng.choice(idx, size=keep, replace=False)
    keep_mask = np.ones(ds.n_rows, dtype=bool)
    keep_mask[idx] = False
    keep_mask[np.sort(chosen)] = True
    return _take_subset(ds, keep_mask)


def resample(ds: Dataset, condition: str, seed: int) -> Dataset:
    """Downsample one class so the positive fraction matches a regime.

    balanced: positive fraction ~1/3 of the total (within 0.01). Compliant
    input is returned unchanged; otherwise the over-represented class is
    downsampled to the largest subset landing inside the window.

    unbalanced: all negatives are kept and positives are downsampled to
    floor(f/(1-f) * negatives) with f = 0.10. When fewer positives exist
    than the target, all are kept and a warning is logged (never upsample).

    Selection is uniform without replacement from the given seed; surviving
    rows keep their original relative order.
    """
    if condition not in CONDITIONS:
        raise DatasetError(f"condition must be one of {CONDITIONS}, got {condition!r}")
    pos = ds.positive_count
    neg = ds.negative_count
    if pos == 0 or neg == 0:
        raise DatasetError("resample requires at least one instance of each class")

    if condition == "balanced":
        lo = BALANCED_FRACTION - BALANCED_TOLERANCE
        hi = BALANCED_FRACTION + BALANCED_TOLERANCE
        fraction = Fraction(pos, pos + neg)
        if lo <= fraction <= hi:
            return ds
        if fraction > hi:
            # Too many positives: largest p with p/(p+neg) <= hi.
            keep = min(pos, int(hi / (1 - hi) * neg))
            if keep < 1 or Fraction(keep, keep + neg) < lo:
                raise DatasetError(
                    f"cannot reach a balanced positive fraction with {pos} positives "
                    f"and {neg} negatives"
                )
            return _downsample(ds, 1, keep, seed)
        # Too many negatives: largest n with pos/(pos+n) >= lo.
        keep = min(neg, int((1 - lo) / lo * pos))
        if keep < 1 or Fraction(pos, pos + keep) > hi:
            raise DatasetError(
                f"cannot reach a balanced positive fraction with {pos} positives "
                f"and {neg} negatives"
            )
        return _downsample(ds, 0, keep, seed)

    # unbalanced
    f = UNBALANCED_FRACTION
    target = int(f / (1 - f) * neg)
    if target < 1:
        raise DatasetError(
            f"insufficient negatives ({neg}) for the unbalanced regime: the "
            "positive target would be below 1"
        )
    if pos <= target:
        if pos < target:
            log.warning(
                "unbalanced resample of %r: only %d positives available for a "
                "target of %d; keeping all positives",
                ds.descriptor.name,
                pos,
                target,
            )
        return ds
    return _downsample(ds, 1, target, seed)


@dataclass(frozen=True)
class DatasetStats:
    row_count: int
    feature_count: int
    positive_count: int
    negative_count: int
    positive_fraction: float


def dataset_stats(ds: Dataset) -> DatasetStats:
    rows = ds.n_rows
    pos = ds.positive_count
    return DatasetStats(
        row_count=rows,
        feature_count=len(ds.descriptor.feature_names),
        positive_count=pos,
        negative_count=rows - pos,
        positive_fraction=pos / rows if rows else 0.0,
    )


# ---------------------------------------------------------------------------
# Canonical on-disk form
# ---------------------------------------------------------------------------

_FORMAT_MAGIC = "intersmell-dataset v1"


def dumps_dataset(ds: Dataset) -> str:
    """Serialize to the canonical text form (see README for the layout):
    a `key = value` header followed by `data:` and one row per line of
    full-precision feature values plus the 0/1 label."""
    for name in ds.descriptor.feature_names:
        if "," in name or "\n" in name:
            raise DatasetError(f"feature name {name!r} may not contain ',' or newline")
    out = io.StringIO()
    out.write(_FORMAT_MAGIC + "\n")
    out.write(f"name = {ds.descriptor.name}\n")
    out.write(f"smell = {ds.descriptor.smell}\n")
    out.write(f"language = {ds.descriptor.language}\n")
    out.write(f"granularity = {ds.descriptor.granularity}\n")
    out.write(f"rows = {ds.n_rows}\n")
    out.write(f"features = {len(ds.descriptor.feature_names)}\n")
    out.write(f"feature_names = {','.join(ds.descriptor.feature_names)}\n")
    out.write("data:\n")
    for row, label in zip(ds.features, ds.labels):
        out.write(" ".join(repr(v) for v in row))
        out.write(f" {label}\n" if len(row) else f"{label}\n")
    return out.getvalue()


def loads_dataset(text: str) -> Dataset:
    lines = text.splitlines()
    if not lines or lines[0].strip() != _FORMAT_MAGIC:
        raise ParseError(f"not a canonical dataset file (expected {_FORMAT_MAGIC!r})", 1)
    header: dict[str, str] = {}
    data_start = None
    for lineno, line in enumerate(lines[1:], start=2):
        if line.strip() == "data:":
            data_start = lineno
            break
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", lineno)
        key, _, value = line.partition("=")
        header[key.strip()] = value.strip()
    if data_start is None:
        raise ParseError("missing 'data:' section")
    required = ("name", "smell", "language", "granularity", "rows", "features", "feature_names")
    for key in required:
        if key not in header:
            raise ParseError(f"missing header key {key!r}")
    names = tuple(n.strip() for n in header["feature_names"].split(","))
    n_rows = int(header["rows"])
    n_features = int(header["features"])
    if len(names) != n_features:
        raise ParseError(
            f"feature_names lists {len(names)} names but features = {n_features}"
        )
    body = [line for line in lines[data_start:] if line.strip()]
    if len(body) != n_rows:
        raise ParseError(f"expected {n_rows} data rows, found {len(body)}")
    features = np.empty((n_rows, n_features))
    labels = np.empty(n_rows, dtype=int)
    for i, line in enumerate(body):
        parts = line.split()
        if len(parts) != n_features + 1:
            raise ParseError(
                f"data row has {len(parts)} fields, expected {n_features + 1}",
                data_start + 1 + i,
            )
        features[i] = [float(p) for p in parts[:-1]]
        labels[i] = int(parts[-1])
    descriptor = DatasetDescriptor(
        name=header["name"],
        smell=header["smell"],
        language=header["language"],
        granularity=header["granularity"],
        feature_names=names,
    )
    return Dataset(descriptor, features, labels)


def write_dataset(ds: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_dataset(ds))


def read_dataset(path) -> Dataset:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_dataset(fh.read())


def fingerprint(ds: Dataset) -> str:
    """Stable hex digest of the canonical serialization."""
    return hashlib.sha256(dumps_dataset(ds).encode()).hexdigest()[:16]
