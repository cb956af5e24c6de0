#!/usr/bin/env python3

"""
Finalized hybrid automata: building them from a learning store, simulating input traces,
scoring predictions, and the JSON and DOT representations.
"""

from __future__ import annotations

import json
import logging
from collections import deque
from typing import List, Sequence, Tuple

import numpy as np
import numpy.typing as npt
from pydantic import ValidationError as PydanticValidationError

from . import MODEL_VERSION
from .exceptions import (
    DegenerateDesign,
    EmptyTestSet,
    MalformedDocument,
    SchemaMismatch,
    SchemaVersionMismatch,
    Underdetermined,
    ValidationError,
)
from .flows import evaluate_flow, fit_flow, render_flow
from .jumps import build_jump_labels, render_label
from .models import DwellStats, HybridAutomaton, ModeDocument, SwitchDocument
from .synthesis import ModelStore
from .traces import IOTrace, denormalize, normalize
from .typing import FloatArray

log = logging.getLogger(__name__)

IntArray = npt.NDArray[np.int64]


def finalize(store: ModelStore) -> HybridAutomaton:
    """
    Fit the flow of every state and label every transition. A state whose flow cannot be
    fitted keeps no flow (its `fit_error` says why) and the automaton is still produced.
    """
    if not store.states:
        raise ValidationError("Cannot finalize a model without states.")

    config = store.config
    span = store.normalization.time_span
    modes = []

    for state in store.ordered_states():
        flow, error = None, None
        try:
            flow = fit_flow(state, store.schema, config.degree, config.ridge)
        except (Underdetermined, DegenerateDesign) as e:
            error = e.msg
            log.warning("State %d has no flow: %s", state.id, e.msg)

        outputs = np.vstack([s.values[:, store.schema.output_positions] for s in state.segments])
        dwells = np.asarray(state.dwells) / span
        modes.append(
            ModeDocument(
                id=state.id,
                flow=flow,
                fit_error=error,
                mean_outputs={
                    name: float(m)
                    for name, m in zip(store.schema.output_names, outputs.mean(axis=0))
                },
                dwell=DwellStats(
                    count=len(dwells),
                    mean=float(dwells.mean()),
                    variance=float(dwells.var(ddof=1)) if len(dwells) > 1 else 0.0,
                ),
                visits=state.visits,
            )
        )

    labels = build_jump_labels(store)
    switches = [
        SwitchDocument(
            src=tr.source,
            dst=tr.target,
            confidence={
                c.name: float(v) for c, v in zip(store.schema.inputs, tr.confidence)
            },
            **labels[tr.key].model_dump(),
        )
        for tr in store.ordered_transitions()
    ]

    automaton = HybridAutomaton(
        channels=store.schema,
        normalization=store.normalization,
        modes=modes,
        switches=switches,
        initial_modes=sorted({s.dst for s in switches if s.src is None}),
        config=config,
        store=store.to_document(),
    )

    unreachable = unreachable_modes(automaton)
    if unreachable:
        log.warning("Modes %s are not reachable from an initial mode", unreachable)

    return automaton


def unreachable_modes(h: HybridAutomaton) -> List[int]:
    seen = set(h.initial_modes)
    queue = deque(h.initial_modes)
    while queue:
        for switch in h.outgoing(queue.popleft()):
            if switch.dst not in seen:
                seen.add(switch.dst)
                queue.append(switch.dst)
    return sorted({m.id for m in h.modes} - seen)


def load_store(h: HybridAutomaton) -> ModelStore:
    """Learning store saved in a model document, to resume online learning."""
    if h.store is None:
        raise MalformedDocument("The model document has no learning store to resume from.")
    return ModelStore.from_document(h.store, h.channels, h.normalization, h.config)


def _initial_mode(h: HybridAutomaton) -> int:
    entries = [s for s in h.switches if s.src is None]
    return min(entries, key=lambda s: (-s.support, s.dst)).dst


def _check_inputs(h: HybridAutomaton, trace: IOTrace) -> None:
    if trace.schema.input_names != h.channels.input_names:
        raise SchemaMismatch(
            f"Trace inputs {trace.schema.input_names} differ from the model inputs "
            f"{h.channels.input_names}."
        )


def _event_fires(
    switch: SwitchDocument,
    prev: FloatArray,
    curr: FloatArray,
    names: List[str],
    epsilon: float,
) -> bool:
    """
    Every clause goes from `before` to `after` (within `epsilon`) between two samples and
    at least one of them is an actual change.
    """
    if not switch.clauses:
        return False

    edge = False
    for clause in switch.clauses:
        k = names.index(clause.channel)
        if abs(prev[k] - clause.before) > epsilon or abs(curr[k] - clause.after) > epsilon:
            return False
        edge = edge or abs(clause.step) >= epsilon

    return edge


def mode_sequence(h: HybridAutomaton, trace: IOTrace) -> Tuple[IntArray, IntArray]:
    """
    Mode of every sample of a normalized trace and the samples where a mode was entered.

    A switch fires on sample `j` when its input event happens between `j-1` and `j`, or
    when its time condition has elapsed since mode entry (within half a sample). Input
    events take precedence over elapsed time; within each kind the most supported switch
    wins, then the lowest target. Every firing, self-loops included, restarts the mode
    clock.
    """
    _check_inputs(h, trace)

    epsilon = h.config.epsilon
    names = h.channels.input_names
    x = trace.inputs
    step = trace.sampling_period / h.normalization.time_span
    outgoing = {
        m.id: sorted(h.outgoing(m.id), key=lambda s: (-s.support, s.dst)) for m in h.modes
    }

    mode = _initial_mode(h)
    entry = 0
    modes = np.empty(trace.p, dtype=np.int64)
    entries = [0]

    for j in range(trace.p):
        if j > 0:
            elapsed = (j - entry) * step
            events = [s for s in outgoing[mode] if _event_fires(s, x[j - 1], x[j], names, epsilon)]
            timed = [
                s for s in outgoing[mode] if s.time is not None and elapsed >= s.time - step / 2
            ]
            fired = (events or timed or [None])[0]
            if fired is not None:
                mode, entry = fired.dst, j
                entries.append(j)
        modes[j] = mode

    return modes, np.asarray(entries, dtype=np.int64)


def simulate(h: HybridAutomaton, trace: IOTrace) -> IOTrace:
    """
    Predicted outputs for the inputs of a normalized trace. Clock inputs are re-based to
    each mode entry; modes without a flow output the mean of their training outputs.
    The result has the model's channels, the trace's inputs and the predicted outputs.
    """
    modes, entries = mode_sequence(h, trace)
    clocks = h.channels.clock_input_positions
    x = trace.inputs
    y = np.empty((trace.p, len(h.channels.outputs)))

    bounds = list(entries) + [trace.p]
    for start, stop in zip(bounds, bounds[1:]):
        mode = h.mode(int(modes[start]))
        run = x[start:stop].copy()
        run[:, clocks] -= run[0, clocks]

        if mode.flow is None:
            y[start:stop] = [mode.mean_outputs[n] for n in h.channels.output_names]
        else:
            y[start:stop] = evaluate_flow(mode.flow, run)

    values = np.empty((trace.p, len(h.channels.channels)))
    values[:, h.channels.input_positions] = x
    values[:, h.channels.output_positions] = y
    return trace.replace(values=values, schema=h.channels)


def predict(h: HybridAutomaton, trace: IOTrace) -> IOTrace:
    """`simulate` on a raw trace, in physical units."""
    normalized, _ = normalize(_inputs_only(trace), h.normalization)
    predicted = simulate(h, normalized)
    return denormalize(predicted, h.normalization)


def _inputs_only(trace: IOTrace) -> IOTrace:
    """Drop everything but the inputs; normalization needs no output range."""
    values = np.full((trace.p, len(trace.schema.channels)), np.nan)
    values[:, trace.schema.input_positions] = trace.inputs
    return trace.replace(values=values)


def normalize_for(h: HybridAutomaton, trace: IOTrace) -> IOTrace:
    """A raw trace in the model's normalized units, carrying the model's channels."""
    if not h.channels.same_channels(trace.schema):
        raise SchemaMismatch(
            f"Trace {trace.name} has channels {trace.schema.names}, "
            f"the model expects {h.channels.names}."
        )
    normalized, _ = normalize(trace, h.normalization)
    return normalized.replace(schema=h.channels)


def trace_costs(h: HybridAutomaton, tests: Sequence[IOTrace]) -> List[float]:
    """Per-trace RMSE between predicted and actual outputs, in normalized units."""
    costs = []
    for trace in tests:
        if trace.schema.output_names != h.channels.output_names:
            raise SchemaMismatch(
                f"Trace outputs {trace.schema.output_names} differ from the model outputs "
                f"{h.channels.output_names}."
            )
        predicted = simulate(h, trace)
        error = predicted.outputs - trace.outputs
        costs.append(float(np.sqrt(np.mean(error**2))))
    return costs


def cost(h: HybridAutomaton, tests: Sequence[IOTrace]) -> float:
    """
    Mean over the (normalized) test traces of the RMSE of the predicted outputs.
    """
    if not tests:
        raise EmptyTestSet()
    return float(np.mean(trace_costs(h, tests)))


def serialize_json(h: HybridAutomaton) -> bytes:
    """Model document with sorted keys, byte-stable for identical models."""
    document = h.model_dump(mode="json", by_alias=True)
    return (json.dumps(document, sort_keys=True, indent=2) + "\n").encode("utf-8")


def deserialize_json(data: bytes) -> HybridAutomaton:
    try:
        document = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise MalformedDocument(f"The model document is not valid JSON: {e}") from e

    if not isinstance(document, dict):
        raise MalformedDocument("The model document must be a JSON object.")

    version = document.get("version")
    if version != MODEL_VERSION:
        raise SchemaVersionMismatch(
            f"Model document version {version!r}, expected {MODEL_VERSION}."
        )

    try:
        return HybridAutomaton.model_validate(document)
    except PydanticValidationError as e:
        raise MalformedDocument(f"Invalid model document: {e}") from e


def _dot_string(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def to_dot(h: HybridAutomaton) -> str:
    """
    Graphviz digraph: one node per mode labeled with its id and flow, one edge per switch
    labeled with its jump condition, and a point node with arrows into the initial modes.
    Ambiguous switches are dashed.
    """
    lines = [
        "digraph hybrid_automaton {",
        "  rankdir=LR;",
        "  node [shape=box, style=rounded];",
        "  __start [shape=point];",
    ]

    for mode in h.modes:
        body = render_flow(mode.flow) if mode.flow is not None else "no flow"
        label = _dot_string(f"{mode.id}\n{body}")
        lines.append(f"  m{mode.id} [label={label}];")

    for switch in h.switches:
        source = "__start" if switch.src is None else f"m{switch.src}"
        attributes = [f"label={_dot_string(render_label(switch))}"]
        if switch.ambiguous:
            attributes.append("style=dashed")
        lines.append(f"  {source} -> m{switch.dst} [{', '.join(attributes)}];")

    lines.append("}")
    return "\n".join(lines) + "\n"
