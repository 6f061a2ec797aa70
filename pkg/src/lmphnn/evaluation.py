"""Confusion matrices, macro metrics, k sweeps and k-sensitivity."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .classifiers import ClassifierKind, fit_dataset, predict_one, warn_if_clamped

RUN_COLUMNS = (
    "dataset",
    "kind",
    "k",
    "seed",
    "accuracy",
    "precision",
    "recall",
    "f1",
    "n_test",
    "runtime_ms",
)
METRICS = ("accuracy", "precision", "recall", "f1")


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are true classes, columns predicted classes."""

    counts: np.ndarray
    classes: tuple

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    n_test: int
    per_class: dict = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict:
        return {m: getattr(self, m) for m in METRICS} | {"n_test": self.n_test}


def confusion_matrix(true_labels, predicted_labels, classes) -> ConfusionMatrix:
    true_labels = list(true_labels)
    predicted_labels = list(predicted_labels)
    if len(true_labels) != len(predicted_labels):
        raise ValueError(
            f"length mismatch: {len(true_labels)} true vs {len(predicted_labels)} predicted"
        )
    classes = tuple(classes)
    position = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(true_labels, predicted_labels):
        try:
            counts[position[t], position[p]] += 1
        except KeyError as exc:
            raise ValueError(f"unknown label {exc.args[0]!r}") from None
    counts.setflags(write=False)
    return ConfusionMatrix(counts, classes)


def _ratio(num: float, den: float) -> float:
    return float(num / den) if den else 0.0


def macro_metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Accuracy plus unweighted class means of precision, recall and F1.

    Any ratio with a zero denominator counts as 0.
    """
    counts = cm.counts
    total = counts.sum()
    if total == 0:
        raise ValueError("confusion matrix is empty")
    tp = np.diag(counts).astype(float)
    predicted = counts.sum(axis=0)
    actual = counts.sum(axis=1)
    per_class = {}
    for i, c in enumerate(cm.classes):
        p = _ratio(tp[i], predicted[i])
        r = _ratio(tp[i], actual[i])
        f = _ratio(2 * p * r, p + r)
        per_class[c] = {"precision": p, "recall": r, "f1": f}
    n = len(cm.classes)
    return MetricsReport(
        accuracy=float(tp.sum() / total),
        precision=sum(v["precision"] for v in per_class.values()) / n,
        recall=sum(v["recall"] for v in per_class.values()) / n,
        f1=sum(v["f1"] for v in per_class.values()) / n,
        n_test=int(total),
        per_class=per_class,
    )


def k_sensitivity(values: Sequence[float]) -> float:
    """Population standard deviation of a metric across a k sweep."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size < 2:
        raise ValueError("need a series of at least 2 values")
    return float(np.sqrt(np.mean((values - values.mean()) ** 2)))


@dataclass
class SweepResult:
    dataset: str
    seed: int
    kinds: tuple
    k_range: tuple
    reports: dict
    runtime_ms: dict = field(default_factory=dict)

    def series(self, kind, metric: str = "accuracy") -> np.ndarray:
        kind = ClassifierKind.parse(kind)
        return np.array([getattr(self.reports[kind, k], metric) for k in self.k_range])

    def rows(self, timing: bool = False) -> list[dict]:
        """One flat record per (kind, k), in sweep order."""
        out = []
        for kind in self.kinds:
            for k in self.k_range:
                rep = self.reports[kind, k]
                row = {"dataset": self.dataset, "kind": kind.value, "k": k, "seed": self.seed}
                row.update(rep.as_dict())
                row["runtime_ms"] = self.runtime_ms.get((kind, k)) if timing else None
                out.append(row)
        return out


def run_sweep(
    train,
    test,
    kinds: Iterable = tuple(ClassifierKind),
    k_range: Iterable[int] = range(2, 11),
    seed: int = 0,
) -> SweepResult:
    """Evaluate every (kind, k) pair on ``test`` after fitting on ``train``.

    ``train`` and ``test`` are :class:`lmphnn.dataset.Dataset` objects with
    the same feature dimension and class set. Predictions depend only on the
    inputs; ``seed`` is recorded for bookkeeping.
    """
    kinds = tuple(ClassifierKind.parse(k) for k in kinds)
    k_range = tuple(int(k) for k in k_range)
    if not kinds or not k_range:
        raise ValueError("kinds and k_range must be non-empty")
    if train.dim != test.dim or tuple(train.classes) != tuple(test.classes):
        raise ValueError("train and test sets do not share a schema")
    if test.n_samples == 0:
        raise ValueError("test set is empty")
    model = fit_dataset(train)
    reports, runtime = {}, {}
    for kind in kinds:
        for k in k_range:
            warn_if_clamped(model, kind, k)
            start = time.perf_counter()
            pred = [predict_one(model, kind, x, k) for x in test.X]
            runtime[kind, k] = (time.perf_counter() - start) * 1e3
            cm = confusion_matrix(test.y.tolist(), pred, test.classes)
            reports[kind, k] = macro_metrics(cm)
    return SweepResult(test.name, seed, kinds, k_range, reports, runtime)


# --------------------------------------------------------------------------
# serialization


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def runs_to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RUN_COLUMNS)
    for row in rows:
        writer.writerow([_cell(row.get(col)) for col in RUN_COLUMNS])
    return buf.getvalue()


def runs_to_jsonl(rows: Iterable[dict]) -> str:
    return "".join(json.dumps({c: row.get(c) for c in RUN_COLUMNS}) + "\n" for row in rows)


def read_runs_csv(path) -> list[dict]:
    """Parse a file written from :func:`runs_to_csv` back into records."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            rec = dict(row)
            rec["k"] = int(rec["k"])
            rec["seed"] = int(rec["seed"])
            rec["n_test"] = int(rec["n_test"])
            for m in METRICS:
                rec[m] = float(rec[m])
            rec["runtime_ms"] = float(rec["runtime_ms"]) if rec["runtime_ms"] else math.nan
            out.append(rec)
    return out
