#!/usr/bin/env python3

"""
Dynamic time warping: alignment, distance, path diagonality and the similarity index
between a segment and the segments stored in a state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Sequence, Tuple

import numpy as np
import numpy.typing as npt
from scipy.spatial.distance import cdist

from .exceptions import DimensionMismatch, EmptySequence, EmptyState
from .typing import FloatArray

if TYPE_CHECKING:
    from .segmentation import Segment
    from .synthesis import StateRecord

AlignmentPath = npt.NDArray[np.int64]
"""`(k, 2)` array of 0-based `(i, j)` pairs, from `(0, 0)` to `(N-1, M-1)`."""


@dataclass(frozen=True)
class SimIndex:
    distance: float
    diagonality: float


SimilarityFunction = Callable[["Segment", "StateRecord"], SimIndex]


def _as_sequence(x: npt.ArrayLike) -> FloatArray:
    array = np.asarray(x, dtype=np.float64)
    return array.reshape(-1, 1) if array.ndim == 1 else array


def accumulated_cost(cost: FloatArray) -> FloatArray:
    """
    `(N+1, M+1)` accumulated cost matrix with an infinite border and `D[0, 0] = 0`.
    Cells on one anti-diagonal only depend on the two previous ones, so each
    anti-diagonal is filled in a single vectorized step.
    """
    n, m = cost.shape
    acc = np.full((n + 1, m + 1), np.inf)
    acc[0, 0] = 0.0

    for s in range(2, n + m + 1):
        i = np.arange(max(1, s - m), min(n, s - 1) + 1)
        j = s - i
        best = np.minimum(np.minimum(acc[i - 1, j - 1], acc[i - 1, j]), acc[i, j - 1])
        acc[i, j] = cost[i - 1, j - 1] + best

    return acc


def _backtrack(acc: FloatArray) -> AlignmentPath:
    """
    Walk back from `(N, M)`. Ties prefer the diagonal, then the vertical and last the
    horizontal step.
    """
    i, j = acc.shape[0] - 1, acc.shape[1] - 1
    path = [(i - 1, j - 1)]

    while (i, j) != (1, 1):
        steps = ((i - 1, j - 1), (i - 1, j), (i, j - 1))
        i, j = min(steps, key=lambda cell: acc[cell])  # min() keeps the first of equals
        path.append((i - 1, j - 1))

    return np.array(path[::-1], dtype=np.int64)


def dtw_align(x: npt.ArrayLike, y: npt.ArrayLike) -> Tuple[float, AlignmentPath]:
    """
    Optimal DTW alignment of two sequences of shape `(N,)`/`(N, d)` and `(M,)`/`(M, d)`.
    The cell cost is the euclidean distance between samples; the distance is the minimal
    sum of cell costs over monotone continuous paths.
    """
    x, y = _as_sequence(x), _as_sequence(y)

    if len(x) == 0 or len(y) == 0:
        raise EmptySequence()

    if x.shape[1] != y.shape[1]:
        raise DimensionMismatch(
            f"Cannot align sequences with {x.shape[1]} and {y.shape[1]} channels."
        )

    acc = accumulated_cost(cdist(x, y, metric="euclidean"))
    return float(acc[-1, -1]), _backtrack(acc)


def diagonality(path: AlignmentPath) -> float:
    """
    Pearson correlation between the two index sequences of a warping path, 0 when either
    one is constant.
    """
    path = np.asarray(path)
    p_i, p_j = path[:, 0], path[:, 1]

    if np.ptp(p_i) == 0 or np.ptp(p_j) == 0:
        return 0.0

    if np.array_equal(p_i - p_i[0], p_j - p_j[0]):
        return 1.0

    return float(np.clip(np.corrcoef(p_i, p_j)[0, 1], -1.0, 1.0))


def sequence_similarity(x: npt.ArrayLike, stored: Sequence[npt.ArrayLike]) -> SimIndex:
    """
    Mean length-normalized DTW distance (distance over path length) and mean diagonality
    of `x` against every sequence in `stored`.
    """
    if not stored:
        raise EmptyState()

    distances, diagonals = [], []
    for other in stored:
        distance, path = dtw_align(x, other)
        distances.append(distance / len(path))
        diagonals.append(diagonality(path))

    return SimIndex(distance=float(np.mean(distances)), diagonality=float(np.mean(diagonals)))


def segment_state_similarity(seg: "Segment", state: "StateRecord") -> SimIndex:
    """
    Similarity index of a segment against the segments stored in a state, compared on
    the non-clock channels.
    """
    if not state.segments:
        raise EmptyState(f"State {state.id} has no stored segments.")

    return sequence_similarity(seg.features, [s.features for s in state.segments])
