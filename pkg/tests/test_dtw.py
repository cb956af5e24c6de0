import functools
import itertools

import numpy as np
import pytest

from hamine.dtw import diagonality, dtw_align, segment_state_similarity, sequence_similarity
from hamine.exceptions import DimensionMismatch, EmptySequence, EmptyState
from hamine.segmentation import Segment
from hamine.synthesis import StateRecord, StateSegment


def _all_paths(n, m):
    """Every monotone continuous warping path from (0, 0) to (n-1, m-1)."""
    if (n, m) == (1, 1):
        yield [(0, 0)]
        return
    for di, dj in ((1, 1), (1, 0), (0, 1)):
        if n - di >= 1 and m - dj >= 1:
            for path in _all_paths(n - di, m - dj):
                yield path + [(n - 1, m - 1)]


@functools.lru_cache(maxsize=None)
def _path_indexes(n, m):
    """Row and column indexes of every path, padded with the cell (n, m)."""
    paths = list(_all_paths(n, m))
    longest = max(len(p) for p in paths)
    padded = np.array([p + [(n, m)] * (longest - len(p)) for p in paths])
    return padded[:, :, 0], padded[:, :, 1]


def _brute_force(x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    cost = np.zeros((len(x) + 1, len(y) + 1))
    cost[:-1, :-1] = np.abs(x[:, None] - y[None, :])
    rows, cols = _path_indexes(len(x), len(y))
    return cost[rows, cols].sum(axis=1).min()


def test_identical_sequences():
    distance, path = dtw_align([1, 2, 3], [1, 2, 3])
    assert distance == 0.0
    assert path.tolist() == [[0, 0], [1, 1], [2, 2]]


def test_warped_sequences():
    distance, path = dtw_align([0, 0, 1], [0, 1, 1])
    assert distance == 0.0
    assert path.tolist() == [[0, 0], [1, 0], [2, 1], [2, 2]]


def test_constant_offset_takes_the_diagonal():
    distance, path = dtw_align([1, 1, 1], [2, 2, 2])
    assert distance == pytest.approx(3.0)
    assert path.tolist() == [[0, 0], [1, 1], [2, 2]]


def test_multivariate_cost_is_euclidean():
    distance, _ = dtw_align([[0, 0]], [[3, 4]])
    assert distance == pytest.approx(5.0)


def _check_against_enumeration(x, y):
    distance, path = dtw_align(x, y)
    assert distance == pytest.approx(_brute_force(x, y), abs=1e-12)
    assert tuple(path[0]) == (0, 0) and tuple(path[-1]) == (len(x) - 1, len(y) - 1)
    steps = np.diff(path, axis=0)
    assert np.all((steps >= 0) & (steps <= 1)) and np.all(steps.sum(axis=1) >= 1)


def test_matches_exhaustive_enumeration():
    grid = (0.0, 0.5, 1.0)
    sequences = [s for n in (1, 2, 3) for s in itertools.product(grid, repeat=n)]
    for x, y in itertools.product(sequences, repeat=2):
        _check_against_enumeration(x, y)


def test_matches_enumeration_up_to_six_samples():
    rng = np.random.default_rng(2)
    for n, m in itertools.product(range(1, 7), repeat=2):
        for _ in range(30):
            _check_against_enumeration(rng.uniform(size=n), rng.uniform(size=m))


def test_metric_properties():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        x = rng.uniform(size=(rng.integers(1, 12), 2))
        y = rng.uniform(size=(rng.integers(1, 12), 2))
        d_xy, path = dtw_align(x, y)
        d_yx, _ = dtw_align(y, x)

        assert d_xy >= 0
        assert d_xy == pytest.approx(d_yx)
        assert dtw_align(x, x)[0] == 0.0
        assert -1.0 <= diagonality(path) <= 1.0


def test_distance_bounded_by_diagonal_path():
    rng = np.random.default_rng(1)
    x, y = rng.uniform(size=8), rng.uniform(size=8)
    assert dtw_align(x, y)[0] <= np.abs(x - y).sum() + 1e-12


def test_errors():
    with pytest.raises(EmptySequence):
        dtw_align([], [1.0])
    with pytest.raises(DimensionMismatch):
        dtw_align([[1.0, 2.0]], [[1.0]])


def test_diagonality():
    assert diagonality(np.array([[0, 0], [1, 1], [2, 2], [3, 3]])) == 1.0
    assert diagonality(np.array([[0, 0], [1, 0], [2, 1], [2, 2]])) == pytest.approx(9 / 11)
    assert diagonality(np.array([[0, 0], [1, 0], [2, 0]])) == 0.0
    assert diagonality(np.array([[0, 0]])) == 0.0


def _state(*features):
    segments = [
        StateSegment(trace=0, start=0, end=len(f) - 1, values=np.asarray(f), features=np.asarray(f))
        for f in features
    ]
    return StateRecord(id=0, segments=segments)


def test_segment_identical_to_stored(make_trace):
    y = np.linspace(0, 1, 20)
    trace = make_trace({"i:u": np.zeros(20), "o:y": y})
    seg = Segment(trace, 0, 19)
    index = segment_state_similarity(seg, _state(trace.features))

    assert index.distance == 0.0
    assert index.diagonality == 1.0


def test_similarity_is_the_mean_over_stored_segments():
    x = np.array([0.0, 0.5, 1.0, 1.0])
    first, second = np.array([0.0, 0.0, 1.0]), np.array([1.0, 1.0, 0.0, 0.0, 0.5])
    index = sequence_similarity(x, [first, second])

    parts = []
    for other in (first, second):
        distance, path = dtw_align(x, other)
        parts.append((distance / len(path), diagonality(path)))

    assert index.distance == pytest.approx(np.mean([p[0] for p in parts]))
    assert index.diagonality == pytest.approx(np.mean([p[1] for p in parts]))


def test_shifted_steps_warp_off_the_diagonal():
    # zeros of x only match zeros of y: the path runs along the edges of the cost matrix
    x = np.array([0.0] * 2 + [1.0] * 8)
    y = np.array([0.0] * 8 + [1.0] * 2)
    distance, path = dtw_align(x, y)

    assert distance == 0.0
    assert np.all(path[path[:, 1] <= 7, 0] <= 1)
    assert np.all(path[path[:, 0] >= 2, 1] >= 8)
    assert 0.5 < diagonality(path) < 0.9

    _, straight = dtw_align(x, x)
    assert diagonality(straight) == 1.0


def test_empty_state(make_trace):
    trace = make_trace({"i:u": np.zeros(5), "o:y": np.zeros(5)})
    with pytest.raises(EmptyState):
        segment_state_similarity(Segment(trace, 0, 4), StateRecord(id=3))
