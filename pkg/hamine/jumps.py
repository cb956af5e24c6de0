#!/usr/bin/env python3

"""
Jump condition mining: per-input confidence levels on the transitions, dwell time
conditions on the states, and deterministic jump labels.
"""

from __future__ import annotations

import itertools
import logging
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence

import numpy as np

from .exceptions import IndistinguishableTransitions, LengthMismatch
from .models import Clause, JumpCondition
from .typing import FloatArray, SwitchKey

if TYPE_CHECKING:
    from .segmentation import Neighborhood
    from .synthesis import ModelStore, StateRecord, TransitionRecord

log = logging.getLogger(__name__)


def confidence_from_sums(
    sums: Optional[FloatArray], updates: int, n_inputs: int, decay: float
) -> FloatArray:
    """`exp(-decay * mean distance)` per input; all ones before the first comparison."""
    if sums is None or updates == 0:
        return np.ones(n_inputs)
    return np.exp(-decay * sums / updates)


def update_confidence(
    tr: "TransitionRecord", nb: "Neighborhood", beta: float
) -> "TransitionRecord":
    """
    Compare the input windows of `nb` with every neighborhood already on the transition,
    fold the mean distance per input into the running mean and append `nb`.

    The distance on input `k` is the euclidean distance between the two windows of `k`
    divided by the window length. The first neighborhood leaves every confidence at 1.
    """
    new = nb.inputs

    if tr.neighborhoods:
        length = len(tr.neighborhoods[0])
        if len(nb) != length:
            raise LengthMismatch(
                f"Neighborhood of {len(nb)} samples on a transition of {length}-sample ones."
            )

        stored = np.stack([n.inputs for n in tr.neighborhoods])
        distances = np.linalg.norm(stored - new[np.newaxis], axis=1).mean(axis=0) / length
        tr.distance_sums = (
            distances if tr.distance_sums is None else tr.distance_sums + distances
        )
        tr.updates += 1

    tr.confidence = confidence_from_sums(tr.distance_sums, tr.updates, new.shape[1], beta)
    tr.neighborhoods.append(nb)
    tr.support += 1
    return tr


def _time_condition(
    durations: Sequence[float], max_variance: float, time_span: float
) -> Optional[float]:
    if len(durations) < 2:
        return None

    normalized = np.asarray(durations, dtype=np.float64) / time_span
    if np.var(normalized, ddof=1) < max_variance:
        return float(np.mean(normalized))

    return None


def mine_time_condition(
    state: "StateRecord", max_variance: float, time_span: float = 1.0
) -> Optional[float]:
    """
    Mean dwell time of a state, in units of `time_span`, when the sample variance of its
    dwell times is below `max_variance`. Needs at least two dwell times.
    """
    return _time_condition(state.dwells, max_variance, time_span)


def _clause(tr: "TransitionRecord", position: int, name: str, v: int) -> Clause:
    """
    `name: before -> after` from the first and last `v` samples of every neighborhood.
    """
    windows = np.stack([n.inputs[:, position] for n in tr.neighborhoods])
    return Clause(
        channel=name,
        before=float(windows[:, :v].mean()),
        after=float(windows[:, -v:].mean()),
    )


def _edge_sizes(tr: "TransitionRecord", v: int) -> FloatArray:
    """`|after - before|` of every input, from the first and last `v` samples of the neighborhoods."""
    windows = np.stack([n.inputs for n in tr.neighborhoods])
    return np.abs(windows[:, -v:].mean(axis=(0, 1)) - windows[:, :v].mean(axis=(0, 1)))


def _ranked_inputs(tr: "TransitionRecord", store: "ModelStore") -> List[int]:
    """
    Non-clock inputs by decreasing confidence. Among equally confident inputs the one that
    steps the most across the change point comes first, then the lowest channel index, so
    an input that stays flat never outranks the one that moved.
    """
    clocks = set(store.schema.clock_input_positions)
    positions = [k for k in range(len(store.schema.inputs)) if k not in clocks]
    edges = _edge_sizes(tr, store.config.v)
    return sorted(positions, key=lambda k: (-tr.confidence[k], -edges[k], k))


def _overlap(a: JumpCondition, b: JumpCondition, epsilon: float) -> bool:
    """
    Whether two labels may fire on the same event: no clause at all on either side, or the
    clauses they share all agree within `epsilon`.
    """
    if not a.clauses and not b.clauses:
        return True

    ours = {c.channel: c for c in a.clauses}
    theirs = {c.channel: c for c in b.clauses}
    shared = ours.keys() & theirs.keys()
    if not shared:
        return False

    return all(
        abs(ours[k].before - theirs[k].before) < epsilon
        and abs(ours[k].after - theirs[k].after) < epsilon
        for k in shared
    )


def _time_separates(a: JumpCondition, b: JumpCondition, epsilon: float) -> bool:
    return a.time is not None and b.time is not None and abs(a.time - b.time) >= epsilon


def _overlapping_pairs(
    labels: Dict[SwitchKey, JumpCondition], keys: List[SwitchKey], epsilon: float
) -> List[tuple]:
    return [
        (a, b)
        for a, b in itertools.combinations(keys, 2)
        if _overlap(labels[a], labels[b], epsilon)
        and not _time_separates(labels[a], labels[b], epsilon)
    ]


def _disambiguate(
    store: "ModelStore",
    keys: List[SwitchKey],
    labels: Dict[SwitchKey, JumpCondition],
    ranked: Dict[SwitchKey, List[int]],
) -> None:
    config = store.config
    inputs = store.schema.inputs
    depth = {k: 1 for k in keys}

    # Add AND clauses on the next most confident inputs
    while pairs := _overlapping_pairs(labels, keys, config.epsilon):
        involved = sorted({k for pair in pairs for k in pair}, key=lambda k: k[1])
        grew = False
        for key in involved:
            if depth[key] < len(ranked[key]):
                position = ranked[key][depth[key]]
                clause = _clause(store.transitions[key], position, inputs[position].name, config.v)
                labels[key].clauses.append(clause)
                depth[key] += 1
                grew = True
        if not grew:
            break

    # Fall back on the dwell time observed before each transition
    pairs = _overlapping_pairs(labels, keys, config.epsilon)
    for key in sorted({k for pair in pairs for k in pair}, key=lambda k: k[1]):
        time = _time_condition(
            store.transitions[key].source_dwells,
            config.time_variance,
            store.normalization.time_span,
        )
        if time is not None:
            labels[key].time = time

    for a, b in _overlapping_pairs(labels, keys, config.epsilon):
        labels[a].ambiguous = labels[b].ambiguous = True
        log.warning(
            "%s Switches %s->%d and %s->%d are marked ambiguous.",
            IndistinguishableTransitions.default_msg, a[0], a[1], b[0], b[1],
        )


def build_jump_labels(store: "ModelStore") -> Dict[SwitchKey, JumpCondition]:
    """
    Jump condition of every transition.

    The primary clause sits on the most confident non-clock input and the source state's
    time condition is added when its dwell times are regular. Outgoing labels of a state
    that may fire on the same event get AND clauses on their next most confident inputs,
    then transition-specific time conditions; if they still overlap they are marked
    ambiguous. Non-initial switches left without an edge clause or a time condition wait
    for the source state's mean dwell time and are marked ambiguous too.
    Initial switches carry no condition.
    """
    config = store.config
    span = store.normalization.time_span
    inputs = store.schema.inputs
    labels: Dict[SwitchKey, JumpCondition] = {}
    ranked: Dict[SwitchKey, List[int]] = {}

    for tr in store.ordered_transitions():
        if tr.source is None:
            labels[tr.key] = JumpCondition(support=tr.support)
            continue

        order = _ranked_inputs(tr, store)
        clauses = [_clause(tr, order[0], inputs[order[0]].name, config.v)] if order else []
        time = mine_time_condition(store.states[tr.source], config.time_variance, span)

        labels[tr.key] = JumpCondition(clauses=clauses, time=time, support=tr.support)
        ranked[tr.key] = order

    for state in store.ordered_states():
        keys = [tr.key for tr in store.outgoing(state.id)]
        if len(keys) > 1:
            _disambiguate(store, keys, labels, ranked)

    for key, label in labels.items():
        if key[0] is None or label.time is not None:
            continue
        if any(abs(c.step) >= config.epsilon for c in label.clauses):
            continue

        dwells = np.asarray(store.states[key[0]].dwells) / span
        label.time = float(dwells.mean())
        label.ambiguous = True
        log.warning(
            "Switch %d->%d has no input event nor regular dwell time, "
            "using the mean dwell time %.3f.",
            key[0], key[1], label.time,
        )

    return labels


def _number(x: float, precision: int) -> str:
    return str(round(x, precision) + 0.0)


def render_label(jump: JumpCondition, precision: int = 3) -> str:
    """
    Text form of a jump condition, e.g. `brake:0.0->1.0 & time:0.054 (6)`.
    """
    parts = [
        f"{c.channel}:{_number(c.before, precision)}->{_number(c.after, precision)}"
        for c in jump.clauses
    ]
    if jump.time is not None:
        parts.append(f"time:{_number(jump.time, precision)}")

    text = " & ".join(parts) if parts else "entry"
    return f"{text} ({jump.support})"
