import numpy as np
import pytest

from hamine.dtw import SimIndex
from hamine.exceptions import SchemaMismatch
from hamine.models import LearnerConfig
from hamine.segmentation import Segment
from hamine.synthesis import (
    ModelStore,
    StateRecord,
    find_candidate_state,
    learn_trace,
    new_store,
    process_trace,
)


@pytest.fixture
def ramps(make_trace):
    """Three identical ramps back to back."""

    def _make(count=3):
        u = np.tile(np.linspace(0, 1, 50), count)
        return make_trace({"i:u": u, "o:y": 2 * u})

    return _make


def _segments(trace, length=50):
    return [Segment(trace, start, start + length - 1) for start in range(0, trace.p, length)]


def test_single_segment_opens_one_state(ramps):
    trace = ramps(1)
    store = new_store(trace, LearnerConfig())
    process_trace(store, [Segment(trace, 0, trace.p - 1)])

    assert list(store.states) == [0]
    assert list(store.transitions) == [(None, 0)]

    entry = store.transitions[(None, 0)]
    assert entry.support == 1
    assert entry.updates == 0
    np.testing.assert_array_equal(entry.confidence, [1.0])
    assert store.traces_processed == 1


def test_identical_segments_share_a_state(ramps):
    trace = ramps(2)
    store = process_trace(new_store(trace, LearnerConfig()), _segments(trace))

    assert list(store.states) == [0]
    assert set(store.transitions) == {(None, 0), (0, 0)}
    assert store.states[0].visits == 2
    assert store.transitions[(0, 0)].source_dwells == [pytest.approx(5.0)]


def test_old_segments_are_evicted(ramps):
    trace = ramps(3)
    store = process_trace(new_store(trace, LearnerConfig(max_segments=2)), _segments(trace))
    state = store.states[0]

    assert [s.start for s in state.segments] == [50, 100]
    assert state.visits == 3
    assert len(state.dwells) == 3


def test_empty_store_has_no_candidate(ramps):
    trace = ramps(1)
    store = new_store(trace, LearnerConfig())
    assert find_candidate_state(Segment(trace, 0, 49), store) is None


def _fake_similarity(indexes):
    def similarity(seg, state):
        return indexes[state.id]

    return similarity


def test_candidate_must_win_on_both_criteria(ramps):
    trace = ramps(1)
    store = new_store(trace, LearnerConfig())
    for k in (0, 1):
        store.states[k] = StateRecord(id=k)
    store.next_id = 2

    similarity = _fake_similarity(
        {0: SimIndex(distance=0.05, diagonality=0.7), 1: SimIndex(distance=0.2, diagonality=0.95)}
    )
    seg = Segment(trace, 0, 49)

    state, index = find_candidate_state(seg, store, similarity=similarity)
    assert state == 0
    assert index.diagonality == 0.7

    # the candidate is not diagonal enough, so the segment opens a new state
    process_trace(store, [seg], similarity=similarity)
    assert sorted(store.states) == [0, 1, 2]
    assert list(store.transitions) == [(None, 2)]


def test_segments_join_a_state_below_both_thresholds(ramps):
    trace = ramps(1)
    store = new_store(trace, LearnerConfig())
    store.states[0] = StateRecord(id=0)
    store.next_id = 1

    similarity = _fake_similarity({0: SimIndex(distance=0.05, diagonality=0.9)})
    process_trace(store, [Segment(trace, 0, 49)], similarity=similarity)

    assert list(store.states) == [0]
    assert store.states[0].visits == 1


def test_step_trace_learns_two_states(step_trace):
    config = LearnerConfig(window=10, penalty=0.1)
    store = learn_trace(None, step_trace, config)

    assert sorted(store.states) == [0, 1]
    assert set(store.transitions) == {(None, 0), (0, 1), (1, 0)}
    assert store.normalization.ranges["y"].min == 1.0
    assert store.normalization.ranges["y"].max == 3.0

    # neighborhoods are centered on the change points
    assert [nb.cp for nb in store.transitions[(0, 1)].neighborhoods] == [50]
    assert [nb.cp for nb in store.transitions[(1, 0)].neighborhoods] == [100]


def test_schema_mismatch(step_trace, make_trace):
    config = LearnerConfig(window=10, penalty=0.1)
    store = learn_trace(None, step_trace, config)
    other = make_trace({"i:u": np.zeros(150), "o:z": np.zeros(150)})

    with pytest.raises(SchemaMismatch):
        learn_trace(store, other, config)


def test_resumed_store_learns_like_an_uninterrupted_one(step_trace, make_trace):
    config = LearnerConfig(window=10, penalty=0.1)
    u = np.r_[np.zeros(40), np.ones(70), np.zeros(40)]
    second = make_trace({"i:u": u, "o:y": 1 + 2 * u}, name="second.csv")

    uninterrupted = learn_trace(learn_trace(None, step_trace, config), second, config)

    first = learn_trace(None, step_trace, config)
    restored = ModelStore.from_document(
        first.to_document(), first.schema, first.normalization, first.config
    )
    resumed = learn_trace(restored, second, config)

    assert resumed.to_document() == uninterrupted.to_document()
    for key, transition in uninterrupted.transitions.items():
        np.testing.assert_allclose(resumed.transitions[key].confidence, transition.confidence)
