"""Distance and neighbor-selection kernels.

All functions are pure and operate on a single query vector. Candidate sets
are passed as a 2-D array of rows plus, optionally, the original dataset
index of each row; ties in distance are broken by the lower index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NeighborList:
    """Selected neighbors of a query, in selection order.

    ``points`` are the neighbor vectors, ``indices`` their original dataset
    indices and ``distances`` their Euclidean distances to the query. For
    plain k-nearest lists the distances are nondecreasing; nearest centroid
    neighbor lists are in greedy selection order instead.
    """

    points: np.ndarray
    indices: np.ndarray
    distances: np.ndarray

    @property
    def k_eff(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class LocalMeanSequence:
    """``means[j-1]`` is the mean of the first ``j`` neighbors."""

    means: np.ndarray
    distances_to_query: np.ndarray


def euclidean(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return float(np.sqrt(np.dot(diff, diff)))


def _row_distances(query: np.ndarray, points: np.ndarray) -> np.ndarray:
    diff = points - query
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def _prepare(query, samples, indices):
    query = np.asarray(query, dtype=np.float64)
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2 or samples.shape[0] == 0:
        raise ValueError("samples must be a non-empty 2-D array")
    if samples.shape[1] != query.shape[-1]:
        raise ValueError(
            f"dimension mismatch: query has {query.shape[-1]}, samples have {samples.shape[1]}"
        )
    if indices is None:
        indices = np.arange(samples.shape[0])
    else:
        indices = np.asarray(indices, dtype=np.intp)
    return query, samples, indices


def k_nearest_in_class(query, samples, k: int, indices=None) -> NeighborList:
    """The ``min(k, len(samples))`` samples nearest to ``query``, ascending."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    query, samples, indices = _prepare(query, samples, indices)
    dist = _row_distances(query, samples)
    order = np.lexsort((indices, dist))[:k]
    return NeighborList(samples[order], indices[order], dist[order])


def cumulative_local_means(neighbors: NeighborList, query) -> LocalMeanSequence:
    """Running means of the neighbors and their distances to ``query``.

    The means are built with the recurrence
    ``m_j = ((j - 1) * m_{j-1} + x_j) / j`` so the first mean is exactly the
    first neighbor.
    """
    points = neighbors.points
    if len(points) == 0:
        raise ValueError("at least one neighbor is required")
    means = np.empty_like(points)
    means[0] = points[0]
    for j in range(2, len(points) + 1):
        means[j - 1] = ((j - 1) * means[j - 2] + points[j - 1]) / j
    return LocalMeanSequence(means, _row_distances(np.asarray(query, dtype=np.float64), means))


def harmonic_mean(distances) -> float:
    """``n / sum(1 / d)``; 0 as soon as any distance is 0."""
    distances = np.asarray(distances, dtype=np.float64)
    if distances.size == 0:
        raise ValueError("at least one distance is required")
    if np.any(distances == 0.0):
        return 0.0
    return float(distances.size / np.sum(1.0 / distances))


def harmonic_mean_distance(query, vectors) -> float:
    """Harmonic mean of the Euclidean distances from ``query`` to ``vectors``."""
    query = np.asarray(query, dtype=np.float64)
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[0] == 0:
        raise ValueError("at least one vector is required")
    return harmonic_mean(_row_distances(query, vectors))


def cumulative_harmonic_means(distances) -> np.ndarray:
    """Harmonic mean of each prefix ``distances[:j]`` for ``j = 1..n``.

    A prefix containing a zero distance has harmonic mean 0.
    """
    distances = np.asarray(distances, dtype=np.float64)
    out = np.zeros_like(distances)
    total = 0.0
    for j, d in enumerate(distances, start=1):
        if d == 0.0:
            break
        total += 1.0 / d
        out[j - 1] = j / total
    return out


def nearest_centroid_neighbors(query, samples, k: int, indices=None) -> NeighborList:
    """Greedy nearest centroid neighbors of ``query``.

    The first neighbor is the nearest sample. Each following neighbor is the
    unselected sample that brings the centroid of the selected set closest to
    the query.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    query, samples, indices = _prepare(query, samples, indices)
    n = samples.shape[0]
    k = min(k, n)
    available = np.ones(n, dtype=bool)
    chosen = []
    running = np.zeros(samples.shape[1])
    for m in range(1, k + 1):
        cand = np.flatnonzero(available)
        centroids = (running + samples[cand]) / m
        score = _row_distances(query, centroids)
        pick = cand[np.lexsort((indices[cand], score))[0]]
        chosen.append(pick)
        available[pick] = False
        running = running + samples[pick]
    chosen = np.array(chosen, dtype=np.intp)
    return NeighborList(
        samples[chosen], indices[chosen], _row_distances(query, samples[chosen])
    )
