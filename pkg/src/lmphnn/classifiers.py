"""Nearest-neighbor classification rules.

Eight rules share one fitted model (the training set partitioned by class)
and are dispatched by :class:`ClassifierKind`:

=======  =================================================================
KNN      majority vote among the k nearest training samples
LMKNN    distance to the mean of the k nearest samples of each class
PNN      1/j-weighted sum of distances to the k nearest of each class
LMPNN    1/j-weighted sum of distances to the k cumulative local means
KNCN     majority vote among the k nearest centroid neighbors
LMKNCN   distance to the mean of the k nearest centroid neighbors per class
LMKHNN   harmonic mean of distances to the k cumulative local means
LMPHNN   1/j-weighted sum of prefix harmonic means of those distances
=======  =================================================================

Distance-scored rules pick the class with the smallest score; ties go to
the class listed first in ``model.classes``.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import check_classification_targets
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .geometry import (
    cumulative_harmonic_means,
    cumulative_local_means,
    harmonic_mean,
    k_nearest_in_class,
    nearest_centroid_neighbors,
)

logger = logging.getLogger(__name__)


class ClassifierKind(str, enum.Enum):
    KNN = "KNN"
    LMKNN = "LMKNN"
    PNN = "PNN"
    LMPNN = "LMPNN"
    KNCN = "KNCN"
    LMKNCN = "LMKNCN"
    LMKHNN = "LMKHNN"
    LMPHNN = "LMPHNN"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, value) -> ClassifierKind:
        try:
            return cls(str(value).upper())
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown classifier kind {value!r}; expected one of {names}") from None


ALL_KINDS = tuple(ClassifierKind)
VOTING_KINDS = frozenset({ClassifierKind.KNN, ClassifierKind.KNCN})


@dataclass(frozen=True)
class FittedModel:
    """Training set partitioned by class; immutable once built."""

    X: np.ndarray
    y: np.ndarray
    indices: np.ndarray
    classes: tuple
    per_class: Mapping[object, tuple[np.ndarray, np.ndarray]]
    label_of: Mapping[int, object]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def class_sizes(self) -> dict:
        return {c: len(idx) for c, (_, idx) in self.per_class.items()}


def fit_model(X, y, classes=None, indices=None) -> FittedModel:
    """Partition the training samples by class.

    ``classes`` fixes the class order (and so tie-breaking); by default it is
    the sorted set of labels. ``indices`` are the samples' original dataset
    indices, used for distance tie-breaking.
    """
    X = np.array(X, dtype=np.float64)
    y = np.array(y)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("training set must be a non-empty 2-D array")
    if y.shape != (X.shape[0],):
        raise ValueError("y must hold one label per training sample")
    if indices is None:
        indices = np.arange(X.shape[0])
    indices = np.array(indices, dtype=np.intp)
    present = np.unique(y)
    if classes is None:
        classes = tuple(present.tolist())
    else:
        classes = tuple(c for c in classes if c in set(present.tolist()))
    if len(classes) < 2:
        raise ValueError(f"training set must contain at least 2 classes, got {len(classes)} class")
    per_class = {}
    for c in classes:
        rows = np.flatnonzero(y == c)
        pts, idx = X[rows], indices[rows]
        pts.setflags(write=False)
        idx.setflags(write=False)
        per_class[c] = (pts, idx)
    for arr in (X, y, indices):
        arr.setflags(write=False)
    if len(set(indices.tolist())) != len(indices):
        raise ValueError("sample indices must be unique")
    label_of = dict(zip(indices.tolist(), y.tolist()))
    return FittedModel(X, y, indices, classes, per_class, label_of)


def fit_dataset(train) -> FittedModel:
    """:func:`fit_model` on a :class:`lmphnn.dataset.Dataset`."""
    return fit_model(train.X, train.y, classes=train.classes, indices=train.indices)


def _harmonic_pseudo_distance(local_mean_distances: np.ndarray) -> float:
    prefix = cumulative_harmonic_means(local_mean_distances)
    weights = 1.0 / np.arange(1, len(prefix) + 1)
    return float(np.dot(weights, prefix))


def _class_score(kind: ClassifierKind, query: np.ndarray, pts, idx, k: int) -> float:
    if kind is ClassifierKind.LMKNCN:
        nb = nearest_centroid_neighbors(query, pts, k, idx)
        centroid = nb.points.mean(axis=0)
        diff = query - centroid
        return float(np.sqrt(np.dot(diff, diff)))

    nb = k_nearest_in_class(query, pts, k, idx)
    if kind is ClassifierKind.PNN:
        weights = 1.0 / np.arange(1, nb.k_eff + 1)
        return float(np.dot(weights, nb.distances))

    lm = cumulative_local_means(nb, query)
    dists = lm.distances_to_query
    if kind is ClassifierKind.LMKNN:
        return float(dists[-1])
    if kind is ClassifierKind.LMPNN:
        weights = 1.0 / np.arange(1, nb.k_eff + 1)
        return float(np.dot(weights, dists))
    if kind is ClassifierKind.LMKHNN:
        return harmonic_mean(dists)
    if kind is ClassifierKind.LMPHNN:
        return _harmonic_pseudo_distance(dists)
    raise ValueError(f"{kind} is not a per-class distance rule")


def _check_query(model: FittedModel, query, k: int) -> np.ndarray:
    query = np.asarray(query, dtype=np.float64)
    if query.shape != (model.dim,):
        raise ValueError(f"query has shape {query.shape}, model expects ({model.dim},)")
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    return query


def class_scores(model: FittedModel, kind, query, k: int) -> np.ndarray:
    """Per-class scores of a distance-based rule, in ``model.classes`` order.

    Smaller is better. Not defined for the voting rules KNN and KNCN.
    """
    kind = ClassifierKind.parse(kind)
    if kind in VOTING_KINDS:
        raise ValueError(f"{kind} is a voting rule and has no per-class distance score")
    query = _check_query(model, query, k)
    return np.array(
        [_class_score(kind, query, *model.per_class[c], int(k)) for c in model.classes]
    )


def _vote(model: FittedModel, nb) -> object:
    labels = np.array([model.label_of[i] for i in nb.indices.tolist()])
    best, best_key = None, None
    for rank, c in enumerate(model.classes):
        mask = labels == c
        votes = int(mask.sum())
        if votes == 0:
            continue
        # more votes, then the closer nearest member, then class order
        key = (-votes, float(nb.distances[mask].min()), rank)
        if best_key is None or key < best_key:
            best, best_key = c, key
    return best


def predict_one(model: FittedModel, kind, query, k: int):
    """Class label assigned to ``query`` by rule ``kind`` with neighborhood ``k``."""
    kind = ClassifierKind.parse(kind)
    query = _check_query(model, query, k)
    k = int(k)
    if kind is ClassifierKind.KNN:
        return _vote(model, k_nearest_in_class(query, model.X, k, model.indices))
    if kind is ClassifierKind.KNCN:
        return _vote(model, nearest_centroid_neighbors(query, model.X, k, model.indices))
    scores = [_class_score(kind, query, *model.per_class[c], k) for c in model.classes]
    return model.classes[int(np.argmin(scores))]


def warn_if_clamped(model: FittedModel, kind, k: int) -> bool:
    """Log a warning when ``k`` exceeds a neighbor pool; returns whether it did."""
    kind = ClassifierKind.parse(kind)
    if kind in VOTING_KINDS:
        pool = {"training set": model.X.shape[0]}
    else:
        pool = model.class_sizes()
    small = {c: n for c, n in pool.items() if n < k}
    if small:
        logger.warning("%s: k=%d exceeds pool size for %s; clamping", kind, k, small)
    return bool(small)


# --------------------------------------------------------------------------
# estimators


class _NeighborRuleClassifier(ClassifierMixin, BaseEstimator):
    _kind: ClassifierKind

    def __init__(self, n_neighbors=5):
        self.n_neighbors = n_neighbors

    def fit(self, X, y):
        """Store the training set, partitioned by class.

        Parameters
        ----------
        X : array-like of shape (n_samples, n_features)
        y : array-like of shape (n_samples,)

        Returns
        -------
        self
        """
        X, y = check_X_y(X, y, dtype=np.float64)
        check_classification_targets(y)
        self.model_ = fit_model(X, y)
        self.classes_ = np.array(self.model_.classes)
        self.n_features_in_ = X.shape[1]
        return self

    def _validate_query(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but {type(self).__name__} "
                f"is expecting {self.n_features_in_} features as input"
            )
        if int(self.n_neighbors) != self.n_neighbors or self.n_neighbors < 1:
            raise ValueError(f"n_neighbors must be a positive integer, got {self.n_neighbors!r}")
        return X

    def predict(self, X):
        """Predict a class label for each row of ``X``."""
        X = self._validate_query(X)
        warn_if_clamped(self.model_, self._kind, self.n_neighbors)
        labels = [predict_one(self.model_, self._kind, x, self.n_neighbors) for x in X]
        return np.array(labels, dtype=self.classes_.dtype)


class _DistanceRuleClassifier(_NeighborRuleClassifier):
    def class_scores(self, X):
        """Per-class scores, shape ``(n_queries, n_classes)``; smaller is better."""
        X = self._validate_query(X)
        return np.vstack([class_scores(self.model_, self._kind, x, self.n_neighbors) for x in X])


class KNNClassifier(_NeighborRuleClassifier):
    """Majority vote among the k nearest training samples.

    Vote ties go to the class whose nearest voting member is closest, then
    to class order.
    """

    _kind = ClassifierKind.KNN


class KNCNClassifier(_NeighborRuleClassifier):
    """Majority vote among the k nearest centroid neighbors of the query."""

    _kind = ClassifierKind.KNCN


class LMKNNClassifier(_DistanceRuleClassifier):
    """Local mean rule: nearest class mean of the k nearest per class."""

    _kind = ClassifierKind.LMKNN


class PNNClassifier(_DistanceRuleClassifier):
    """Pseudo nearest neighbor rule with weights 1/j on the sorted distances."""

    _kind = ClassifierKind.PNN


class LMPNNClassifier(_DistanceRuleClassifier):
    """Pseudo nearest neighbor rule over cumulative local mean vectors."""

    _kind = ClassifierKind.LMPNN


class LMKNCNClassifier(_DistanceRuleClassifier):
    """Local mean of the k nearest centroid neighbors within each class."""

    _kind = ClassifierKind.LMKNCN


class LMKHNNClassifier(_DistanceRuleClassifier):
    """Harmonic mean of the distances to the k cumulative local means."""

    _kind = ClassifierKind.LMKHNN


class LMPHNNClassifier(_DistanceRuleClassifier):
    """Local mean pseudo nearest neighbor rule with harmonic mean distance.

    For each class the k nearest samples give local means ``m_1..m_k``
    (``m_j`` averages the first j). With ``d_j`` the distance from the query
    to ``m_j`` and ``H_j`` the harmonic mean of ``d_1..d_j``, the class score
    is ``sum_j H_j / j``; the smallest score wins.

    Parameters
    ----------
    n_neighbors : int, default=5
        Neighbors taken per class. Classes with fewer training samples use
        all of them.

    Examples
    --------
    >>> import numpy as np
    >>> X = np.array([[0.0], [1.0], [10.0], [11.0]])
    >>> y = np.array(["A", "A", "B", "B"])
    >>> LMPHNNClassifier(n_neighbors=2).fit(X, y).predict([[0.2], [9.0]])
    array(['A', 'B'], dtype='<U1')
    """

    _kind = ClassifierKind.LMPHNN


CLASSIFIERS = {
    ClassifierKind.KNN: KNNClassifier,
    ClassifierKind.LMKNN: LMKNNClassifier,
    ClassifierKind.PNN: PNNClassifier,
    ClassifierKind.LMPNN: LMPNNClassifier,
    ClassifierKind.KNCN: KNCNClassifier,
    ClassifierKind.LMKNCN: LMKNCNClassifier,
    ClassifierKind.LMKHNN: LMKHNNClassifier,
    ClassifierKind.LMPHNN: LMPHNNClassifier,
}


def make_classifier(kind, n_neighbors=5) -> _NeighborRuleClassifier:
    return CLASSIFIERS[ClassifierKind.parse(kind)](n_neighbors=n_neighbors)
