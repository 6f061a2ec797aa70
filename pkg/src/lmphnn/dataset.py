"""CSV ingestion, categorical encoding, feature scaling and stratified splits."""

from __future__ import annotations

import csv
import logging
import math
import os
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

logger = logging.getLogger(__name__)

MISSING_TOKENS = frozenset({"", "?", "na", "n/a", "nan", "null", "none"})


class DatasetError(ValueError):
    """Raised when input data cannot be turned into a usable dataset."""


class LabeledSample(NamedTuple):
    features: np.ndarray
    label: str


@dataclass(frozen=True)
class Dataset:
    """An immutable labelled design matrix.

    ``X`` has shape ``(n_samples, dim)``; ``y`` holds one label per row and
    every label is a member of ``classes``.
    """

    X: np.ndarray
    y: np.ndarray
    classes: tuple
    name: str = "dataset"
    feature_names: tuple = ()
    n_dropped: int = 0
    categorical_columns: tuple = ()
    indices: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        if X.ndim != 2:
            raise DatasetError(f"X must be 2-D, got shape {X.shape}")
        y = np.asarray(self.y)
        if y.shape != (X.shape[0],):
            raise DatasetError("y must hold exactly one label per row of X")
        if not np.all(np.isfinite(X)):
            raise DatasetError("features must be finite")
        classes = tuple(self.classes)
        if not classes or len(set(classes)) != len(classes):
            raise DatasetError("classes must be non-empty and free of duplicates")
        unknown = set(y.tolist()) - set(classes)
        if unknown:
            raise DatasetError(f"labels not in classes: {sorted(map(str, unknown))}")
        indices = self.indices
        if indices is None:
            indices = np.arange(X.shape[0])
        X.setflags(write=False)
        y.setflags(write=False)
        indices = np.asarray(indices, dtype=np.intp)
        indices.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "indices", indices)
        if not self.feature_names:
            names = tuple(f"x{i}" for i in range(X.shape[1]))
            object.__setattr__(self, "feature_names", names)

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def samples(self) -> list[LabeledSample]:
        return [LabeledSample(x, label) for x, label in zip(self.X, self.y)]

    def class_counts(self) -> dict:
        return {c: int(np.sum(self.y == c)) for c in self.classes}

    def subset(self, rows: np.ndarray, name: str | None = None) -> Dataset:
        """Rows ``rows`` of this dataset; original sample indices are kept."""
        rows = np.asarray(rows, dtype=np.intp)
        return Dataset(
            self.X[rows],
            self.y[rows],
            self.classes,
            name=name or self.name,
            feature_names=self.feature_names,
            categorical_columns=self.categorical_columns,
            indices=self.indices[rows],
        )

    def with_features(self, X: np.ndarray) -> Dataset:
        return Dataset(
            X,
            self.y,
            self.classes,
            name=self.name,
            feature_names=self.feature_names,
            n_dropped=self.n_dropped,
            categorical_columns=self.categorical_columns,
            indices=self.indices,
        )


@dataclass(frozen=True)
class SplitPair:
    train: Dataset
    test: Dataset
    seed: int
    ratio: float


@dataclass
class RawTable:
    """String cells of a delimited file, header split off."""

    header: list[str] | None
    rows: list[list[str]]
    name: str = "dataset"


# --------------------------------------------------------------------------
# parsing


def _parse_float(token: str) -> float | None:
    try:
        return float(token)
    except ValueError:
        return None


def _is_missing(token: str) -> bool:
    return token.strip().lower() in MISSING_TOKENS


def _is_numeric(token: str) -> bool:
    return _parse_float(token) is not None and not _is_missing(token)


def read_table(path: str | os.PathLike, header: bool | None = None) -> RawTable:
    """Read a comma-separated UTF-8 file into a :class:`RawTable`.

    When ``header`` is None the first row is taken as a header iff some
    column has a non-numeric first cell while all its other present cells
    are numeric.
    """
    name = os.path.splitext(os.path.basename(os.fspath(path)))[0]
    with open(path, newline="", encoding="utf-8-sig") as fh:
        rows = [[cell.strip() for cell in row] for row in csv.reader(fh) if row]
    if not rows:
        raise DatasetError(f"{path}: empty file, zero usable rows")
    width = len(rows[0])
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            raise DatasetError(
                f"{path}: row {lineno} has {len(row)} columns, expected {width}"
            )
    if header is None:
        header = _detect_header(rows)
    if header:
        return RawTable(header=rows[0], rows=rows[1:], name=name)
    return RawTable(header=None, rows=rows, name=name)


def _detect_header(rows: list[list[str]]) -> bool:
    if len(rows) < 2:
        return False
    first, rest = rows[0], rows[1:]
    for col, token in enumerate(first):
        if _is_numeric(token) or _is_missing(token):
            continue
        body = [r[col] for r in rest if not _is_missing(r[col])]
        if body and all(_is_numeric(c) for c in body):
            return True
    return False


def _resolve_label_column(table: RawTable, label_column) -> int:
    width = len(table.header) if table.header else len(table.rows[0]) if table.rows else 0
    if label_column is None or label_column == "last":
        return width - 1
    if isinstance(label_column, (int, np.integer)):
        col = int(label_column)
    elif isinstance(label_column, str) and label_column.lstrip("-").isdigit():
        col = int(label_column)
    else:
        if table.header is None or label_column not in table.header:
            raise DatasetError(f"label column {label_column!r} not found")
        return table.header.index(label_column)
    if col < 0:
        col += width
    if not 0 <= col < width:
        raise DatasetError(f"label column {label_column!r} out of range for {width} columns")
    return col


# --------------------------------------------------------------------------
# encoding


def encode_column(tokens: Sequence[str], policy: str = "ordinal") -> np.ndarray:
    """Encode one string column.

    Ordinal codes follow first-appearance order. One-hot returns an
    ``(n, n_levels)`` indicator block in the same level order.
    """
    levels: dict[str, int] = {}
    for t in tokens:
        levels.setdefault(t, len(levels))
    codes = np.array([levels[t] for t in tokens], dtype=np.float64)
    if policy == "ordinal":
        return codes
    if policy in ("onehot", "one-hot"):
        out = np.zeros((len(tokens), len(levels)))
        out[np.arange(len(tokens)), codes.astype(int)] = 1.0
        return out
    raise ValueError(f"unknown encoding policy {policy!r}")


def encode_categoricals(
    table: RawTable,
    policy: str = "ordinal",
    label_column="last",
    name: str | None = None,
) -> Dataset:
    """Turn a raw string table into a :class:`Dataset`.

    Rows with a missing cell, or a non-finite numeric cell, are dropped and
    counted in ``n_dropped``. Feature columns whose present cells are all
    non-numeric are encoded with ``policy``; numeric columns pass through.

    Raises
    ------
    DatasetError
        If a column mixes numeric and string tokens, no usable rows remain,
        or fewer than two classes are present.
    """
    if policy not in ("ordinal", "onehot", "one-hot"):
        raise ValueError(f"unknown encoding policy {policy!r}")
    label_col = _resolve_label_column(table, label_column)
    width = len(table.header) if table.header else (len(table.rows[0]) if table.rows else 0)
    feature_cols = [c for c in range(width) if c != label_col]
    header = table.header or [f"x{c}" for c in range(width)]

    kept = []
    for row in table.rows:
        if any(_is_missing(row[c]) for c in range(width)):
            continue
        if any(
            _is_numeric(row[c]) and not math.isfinite(float(row[c])) for c in feature_cols
        ):
            continue
        kept.append(row)
    n_dropped = len(table.rows) - len(kept)
    if n_dropped:
        logger.info("%s: dropped %d row(s) with missing or non-finite values", table.name, n_dropped)
    if not kept:
        raise DatasetError(f"{table.name}: zero usable rows")

    blocks, names, categorical = [], [], []
    for c in feature_cols:
        tokens = [row[c] for row in kept]
        numeric = [_is_numeric(t) for t in tokens]
        if all(numeric):
            blocks.append(np.array([float(t) for t in tokens])[:, None])
            names.append(header[c])
        elif not any(numeric):
            categorical.append(header[c])
            enc = encode_column(tokens, policy)
            if enc.ndim == 1:
                blocks.append(enc[:, None])
                names.append(header[c])
            else:
                blocks.append(enc)
                levels = list(dict.fromkeys(tokens))
                names.extend(f"{header[c]}={lvl}" for lvl in levels)
        else:
            raise DatasetError(
                f"{table.name}: column {header[c]!r} mixes numeric and string tokens"
            )
    X = np.hstack(blocks) if blocks else np.empty((len(kept), 0))
    if X.shape[1] == 0:
        raise DatasetError(f"{table.name}: no feature columns")
    y = np.array([row[label_col] for row in kept])
    classes = tuple(sorted(set(y.tolist()), key=_label_sort_key))
    if len(classes) < 2:
        raise DatasetError(f"{table.name}: fewer than 2 classes")
    return Dataset(
        X,
        y,
        classes,
        name=name or table.name,
        feature_names=tuple(names),
        n_dropped=n_dropped,
        categorical_columns=tuple(categorical),
    )


def _label_sort_key(label: str):
    value = _parse_float(label)
    return (0, value, label) if value is not None else (1, 0.0, label)


def load_csv(
    path: str | os.PathLike,
    label_column="last",
    encode: str = "ordinal",
    header: bool | None = None,
) -> Dataset:
    """Load a CSV file as a :class:`Dataset` (label in the last column by default)."""
    return encode_categoricals(read_table(path, header=header), encode, label_column)


def write_csv(dataset: Dataset, path: str | os.PathLike, label_name: str = "label") -> None:
    """Write ``dataset`` so that :func:`load_csv` reads it back bit-equal."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([*dataset.feature_names, label_name])
        for x, label in zip(dataset.X, dataset.y):
            writer.writerow([repr(float(v)) for v in x] + [label])


# --------------------------------------------------------------------------
# scaling


class FeatureScaler(TransformerMixin, BaseEstimator):
    """Per-feature affine scaling: ``none``, ``zscore`` or ``minmax``.

    z-scores use the population standard deviation. Constant features are
    passed through unchanged.
    """

    def __init__(self, method="none"):
        self.method = method

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        d = X.shape[1]
        shift, scale = np.zeros(d), np.ones(d)
        if self.method == "zscore":
            shift, spread = X.mean(axis=0), X.std(axis=0)
        elif self.method == "minmax":
            shift, spread = X.min(axis=0), X.max(axis=0) - X.min(axis=0)
        elif self.method == "none":
            spread = scale
        else:
            raise ValueError(f"unknown normalization method {self.method!r}")
        constant = spread == 0
        if self.method != "none":
            if np.any(constant):
                logger.warning(
                    "%d constant feature(s) passed through unscaled", int(constant.sum())
                )
            shift = np.where(constant, 0.0, shift)
            scale = np.where(constant, 1.0, spread)
        self.shift_ = shift
        self.scale_ = scale
        self.n_features_in_ = d
        return self

    def transform(self, X):
        check_is_fitted(self, ["shift_", "scale_"])
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but FeatureScaler "
                f"is expecting {self.n_features_in_} features as input"
            )
        if self.method == "none":
            return X
        return (X - self.shift_) / self.scale_


def normalize(dataset: Dataset, method: str = "none") -> tuple[Dataset, FeatureScaler]:
    """Scale ``dataset`` and return the fitted scaler for reuse on held-out data."""
    scaler = FeatureScaler(method).fit(dataset.X)
    if method == "none":
        return dataset, scaler
    return dataset.with_features(scaler.transform(dataset.X)), scaler


def apply_normalization(dataset: Dataset, scaler: FeatureScaler) -> Dataset:
    if scaler.method == "none":
        return dataset
    return dataset.with_features(scaler.transform(dataset.X))


# --------------------------------------------------------------------------
# splitting


def stratified_split(dataset: Dataset, ratio: float = 0.5, seed: int = 0) -> SplitPair:
    """Seeded per-class split into train and test.

    Each class contributes ``max(1, floor(ratio * n_class))`` samples to the
    training set; the rest go to the test set. Classes are shuffled in the
    order of ``dataset.classes`` from one generator seeded with ``seed``.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    rng = np.random.default_rng(seed)
    train_rows, test_rows = [], []
    for c in dataset.classes:
        rows = np.flatnonzero(dataset.y == c)
        if len(rows) < 2:
            raise DatasetError(
                f"class {c!r} has {len(rows)} sample(s); at least 2 are needed to split"
            )
        n_train = max(1, math.floor(ratio * len(rows)))
        perm = rng.permutation(rows)
        train_rows.append(perm[:n_train])
        test_rows.append(perm[n_train:])
    train = np.sort(np.concatenate(train_rows))
    test = np.sort(np.concatenate(test_rows))
    return SplitPair(
        train=dataset.subset(train, name=dataset.name),
        test=dataset.subset(test, name=dataset.name),
        seed=seed,
        ratio=ratio,
    )
