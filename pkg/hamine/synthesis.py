#!/usr/bin/env python3

"""
The online learning loop. Each trace is segmented once and its segments are clustered
into states (modes) by DTW similarity; the change-point neighborhoods between consecutive
segments are collected on the transitions (switches) they traverse.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from .dtw import SimIndex, SimilarityFunction, segment_state_similarity
from .exceptions import SchemaMismatch
from .jumps import confidence_from_sums, update_confidence
from .models import (
    ChannelSchema,
    LearnerConfig,
    NeighborhoodDocument,
    NormalizationParams,
    SegmentDocument,
    StateDocument,
    StoreDocument,
    TransitionDocument,
)
from .segmentation import Neighborhood, Segment, detect_change_points, neighborhood, segment
from .traces import IOTrace, normalize
from .typing import FloatArray, SwitchKey

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class StateSegment:
    """A segment kept by a state, detached from its trace."""

    trace: int
    start: int
    end: int
    values: FloatArray
    features: FloatArray


@dataclass
class StateRecord:
    id: int
    segments: List[StateSegment] = field(default_factory=list)
    dwells: List[float] = field(default_factory=list)
    """Dwell duration (seconds) of every segment ever attached."""
    visits: int = 0


@dataclass
class TransitionRecord:
    source: Optional[int]
    target: int
    neighborhoods: List[Neighborhood] = field(default_factory=list)
    source_dwells: List[float] = field(default_factory=list)
    """Dwell (seconds) of the source segment that preceded each traversal."""
    distance_sums: Optional[FloatArray] = None
    updates: int = 0
    support: int = 0
    confidence: Optional[FloatArray] = None

    @property
    def key(self) -> SwitchKey:
        return (self.source, self.target)


def switch_sort_key(key: SwitchKey) -> tuple:
    """Initial switches first, then by source and target id."""
    source, target = key
    return (-1 if source is None else source, target)


@dataclass
class ModelStore:
    schema: ChannelSchema
    normalization: NormalizationParams
    config: LearnerConfig
    states: Dict[int, StateRecord] = field(default_factory=dict)
    transitions: Dict[SwitchKey, TransitionRecord] = field(default_factory=dict)
    next_id: int = 0
    traces_processed: int = 0
    current: Optional[int] = None
    """State of the previous segment of the trace being processed."""

    def ordered_states(self) -> List[StateRecord]:
        return [self.states[k] for k in sorted(self.states)]

    def ordered_transitions(self) -> List[TransitionRecord]:
        return [self.transitions[k] for k in sorted(self.transitions, key=switch_sort_key)]

    def outgoing(self, state_id: int) -> List[TransitionRecord]:
        return [t for t in self.ordered_transitions() if t.source == state_id]

    def to_document(self) -> StoreDocument:
        return StoreDocument(
            states=[
                StateDocument(
                    id=s.id,
                    segments=[
                        SegmentDocument(
                            trace=seg.trace,
                            start=seg.start,
                            end=seg.end,
                            values=seg.values.tolist(),
                        )
                        for seg in s.segments
                    ],
                    dwells=[float(d) for d in s.dwells],
                    visits=s.visits,
                )
                for s in self.ordered_states()
            ],
            transitions=[
                TransitionDocument(
                    src=t.source,
                    dst=t.target,
                    neighborhoods=[
                        NeighborhoodDocument(
                            trace=nb.trace_index,
                            cp=nb.cp,
                            times=nb.times.tolist(),
                            values=nb.values.tolist(),
                        )
                        for nb in t.neighborhoods
                    ],
                    source_dwells=[float(d) for d in t.source_dwells],
                    distance_sums=(
                        [] if t.distance_sums is None else t.distance_sums.tolist()
                    ),
                    updates=t.updates,
                    support=t.support,
                )
                for t in self.ordered_transitions()
            ],
            next_id=self.next_id,
            traces_processed=self.traces_processed,
        )

    @classmethod
    def from_document(
        cls,
        document: StoreDocument,
        schema: ChannelSchema,
        normalization: NormalizationParams,
        config: LearnerConfig,
    ) -> "ModelStore":
        store = cls(schema=schema, normalization=normalization, config=config)
        features = schema.feature_positions
        width = len(schema.channels)

        for s in document.states:
            segments = []
            for seg in s.segments:
                values = np.array(seg.values, dtype=np.float64).reshape(-1, width)
                segments.append(
                    StateSegment(seg.trace, seg.start, seg.end, values, values[:, features])
                )
            store.states[s.id] = StateRecord(s.id, segments, list(s.dwells), s.visits)

        n_inputs = len(schema.inputs)
        for t in document.transitions:
            neighborhoods = [
                Neighborhood(
                    cp=nb.cp,
                    v=config.v,
                    times=np.array(nb.times, dtype=np.float64),
                    values=np.array(nb.values, dtype=np.float64).reshape(-1, width),
                    schema=schema,
                    trace_index=nb.trace,
                )
                for nb in t.neighborhoods
            ]
            sums = np.array(t.distance_sums, dtype=np.float64) if t.distance_sums else None
            record = TransitionRecord(
                source=t.src,
                target=t.dst,
                neighborhoods=neighborhoods,
                source_dwells=list(t.source_dwells),
                distance_sums=sums,
                updates=t.updates,
                support=t.support,
            )
            record.confidence = confidence_from_sums(
                sums, t.updates, n_inputs, config.confidence_decay
            )
            store.transitions[(t.src, t.dst)] = record

        store.next_id = document.next_id
        store.traces_processed = document.traces_processed
        return store


def new_store(
    trace: IOTrace, config: LearnerConfig, normalization: Optional[NormalizationParams] = None
) -> ModelStore:
    """
    Empty store for traces shaped like `trace`. Without `normalization`, the ranges of
    `trace` are frozen into the store.
    """
    if normalization is None:
        _, normalization = normalize(trace)
    return ModelStore(schema=trace.schema, normalization=normalization, config=config)


def find_candidate_state(
    seg: Segment,
    store: ModelStore,
    config: Optional[LearnerConfig] = None,
    similarity: SimilarityFunction = segment_state_similarity,
) -> Optional[tuple]:
    """
    Best state for `seg` as `(state id, SimIndex)`, or `None` for an empty store.

    States are visited in ascending id order and one replaces the candidate only when its
    distance is strictly lower and its diagonality strictly higher. Thresholds are left
    to the caller.
    """
    candidate: Optional[int] = None
    candidate_index = SimIndex(distance=np.inf, diagonality=0.0)

    for state in store.ordered_states():
        index = similarity(seg, state)
        log.debug(
            "Segment [%d, %d] vs state %d: distance %.4f, diagonality %.4f",
            seg.start, seg.end, state.id, index.distance, index.diagonality,
        )
        if (
            index.distance < candidate_index.distance
            and index.diagonality > candidate_index.diagonality
        ):
            candidate, candidate_index = state.id, index

    if candidate is None:
        return None

    return candidate, candidate_index


def _create_state(store: ModelStore) -> StateRecord:
    state = StateRecord(id=store.next_id)
    store.states[state.id] = state
    store.next_id += 1
    log.info("Created state %d", state.id)
    return state


def _attach(state: StateRecord, seg: Segment, trace_index: int, max_segments: int) -> None:
    state.segments.append(
        StateSegment(trace_index, seg.start, seg.end, seg.values.copy(), seg.features.copy())
    )
    if len(state.segments) > max_segments:
        state.segments.pop(0)

    state.dwells.append(seg.duration)
    state.visits += 1


def _traverse(
    store: ModelStore,
    target: int,
    nb: Neighborhood,
    source_dwell: Optional[float],
) -> TransitionRecord:
    key = (store.current, target)
    transition = store.transitions.get(key)
    if transition is None:
        transition = TransitionRecord(source=store.current, target=target)
        store.transitions[key] = transition
        log.info("Created transition %s -> %d", "NULL" if key[0] is None else key[0], target)

    update_confidence(transition, nb, store.config.confidence_decay)
    if source_dwell is not None:
        transition.source_dwells.append(source_dwell)

    return transition


def process_trace(
    store: ModelStore,
    segments: Sequence[Segment],
    config: Optional[LearnerConfig] = None,
    similarity: SimilarityFunction = segment_state_similarity,
) -> ModelStore:
    """
    Consume the segments of one normalized trace, in temporal order, updating the store
    in place.

    Every segment joins the candidate state when it is closer than the distance threshold
    and more diagonal than the diagonality threshold, and opens a new state otherwise.
    The neighborhood of its first sample is appended to the transition from the previous
    segment's state (`None` for the first segment of the trace).
    """
    config = config or store.config
    if segments and not store.schema.same_channels(segments[0].trace.schema):
        raise SchemaMismatch(
            f"Trace channels {segments[0].trace.schema.names} differ from "
            f"the model channels {store.schema.names}."
        )

    trace_index = store.traces_processed
    store.current = None
    previous: Optional[Segment] = None

    for seg in segments:
        nb = replace(neighborhood(seg.trace, seg.start, config.v), trace_index=trace_index)

        if not store.states:
            state = _create_state(store)
        else:
            found = find_candidate_state(seg, store, config, similarity)
            if (
                found is not None
                and found[1].distance < config.dist_threshold
                and found[1].diagonality > config.diag_threshold
            ):
                state = store.states[found[0]]
            else:
                state = _create_state(store)

        _attach(state, seg, trace_index, config.max_segments)
        _traverse(store, state.id, nb, None if previous is None else previous.duration)
        store.current = state.id
        previous = seg

    store.traces_processed += 1
    store.current = None
    log.info(
        "Trace %d: %d segments, %d states, %d transitions",
        trace_index, len(segments), len(store.states), len(store.transitions),
    )
    return store


def learn_trace(store: Optional[ModelStore], trace: IOTrace, config: LearnerConfig) -> ModelStore:
    """
    Normalize a raw trace with the store's frozen ranges (the first trace defines them),
    segment it and feed it to `process_trace`.
    """
    if store is None:
        store = new_store(trace, config)
    elif not store.schema.same_channels(trace.schema):
        raise SchemaMismatch(
            f"Trace {trace.name} has channels {trace.schema.names}, "
            f"the model expects {store.schema.names}."
        )

    normalized, _ = normalize(trace, store.normalization)
    normalized = normalized.replace(schema=store.schema)
    cps = detect_change_points(
        normalized, config.window, config.min_size, config.penalty, config.cost
    )
    log.info("%s: %d change points", trace.name or "<unnamed>", len(cps))

    return process_trace(store, segment(normalized, cps), config)
