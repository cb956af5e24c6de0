#!/usr/bin/env python3

"""
Module that exposes `PlantSpec`, the description of a piecewise-polynomial plant used to
generate ground-truth traces: input stimuli, one polynomial per output and mode, and the
input guards that switch between modes.
"""

from __future__ import annotations

from typing import Dict, List, Literal, Optional

from pydantic import Field, model_validator

from .automaton_document import Term
from .base_document import DocumentModel

StimulusKind = Literal["const", "ramp", "sine", "steps", "pulses", "clock", "events"]
GuardKind = Literal["rise", "fall", "above", "below"]

MAX_PLANT_DEGREE = 2


class InputSpec(DocumentModel):
    """
    Stimulus program of an input channel.

    - `const`: `value`.
    - `ramp`: from `value` to `value + amplitude` over the trace.
    - `sine`: `value + amplitude * sin(2*pi*t/period + phase)`, random phase.
    - `steps`: toggles between `value` and `value + amplitude` every ~`period` seconds.
    - `pulses`: `value` with pulses of height `amplitude` lasting `width` seconds,
      spaced ~`period` seconds apart.
    - `clock`: the sample time. Flows see it reset to 0 on every mode entry.
    - `events`: `value` with pulses of height `amplitude` lasting `width` seconds, fired by
      the event schedule of the plant (see `PlantSpec`).

    Step and pulse timings are drawn uniformly in `[0.5, 1.5] * period`.
    """

    name: str = Field(min_length=1)
    kind: StimulusKind = "const"
    value: float = 0.0
    amplitude: float = 1.0
    period: float = Field(default=1.0, gt=0)
    width: float = Field(default=0.1, gt=0)


class ModeSpec(DocumentModel):
    """
    `dwell` is the time from the mode entry, or from the last event, to the next scheduled
    event; it is required when the plant has `events` inputs.
    """

    name: str = Field(min_length=1)
    flows: Dict[str, List[Term]]
    dwell: Optional[float] = Field(default=None, gt=0)


class GuardSpec(DocumentModel):
    """
    Switch from `source` to `target` when `channel` rises through / falls through /
    is above / is below `threshold`.
    """

    source: str
    target: str
    channel: str
    kind: GuardKind = "rise"
    threshold: float = 0.5


class PlantSpec(DocumentModel):
    """
    With `events` inputs the plant runs an event schedule: the first event comes after
    `first_event` seconds (half the initial dwell by default) and the next one `dwell`
    seconds after every mode entry or event, each time a pulse on one of the `events`
    inputs drawn at random. Such traces run for `duration` seconds and stop right before
    the following event, so every visit in them is complete.
    """

    inputs: List[InputSpec] = Field(min_length=1)
    outputs: List[str] = Field(min_length=1)
    modes: List[ModeSpec] = Field(min_length=1)
    guards: List[GuardSpec] = Field(default_factory=list)
    initial_mode: str
    noise: float = Field(default=0.0, ge=0)
    seed: int = 0
    period: float = Field(default=0.01, gt=0)
    duration: float = Field(default=10.0, gt=0)
    traces: int = Field(default=10, ge=1)
    first_event: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _check_references(self) -> "PlantSpec":
        input_names = [i.name for i in self.inputs]
        mode_names = [m.name for m in self.modes]
        names = input_names + self.outputs

        if len(set(names)) != len(names):
            raise ValueError(f"channel names must be unique: {names}")

        if len(set(mode_names)) != len(mode_names):
            raise ValueError(f"mode names must be unique: {mode_names}")

        if self.initial_mode not in mode_names:
            raise ValueError(f"unknown initial mode '{self.initial_mode}'")

        if self.duration < 2 * self.period:
            raise ValueError("duration must cover at least two samples")

        for mode in self.modes:
            if sorted(mode.flows) != sorted(self.outputs):
                raise ValueError(f"mode '{mode.name}' must define a flow for every output")

            for output, terms in mode.flows.items():
                for term in terms:
                    if len(term.exponents) != len(self.inputs):
                        raise ValueError(
                            f"term {term.exponents} of '{mode.name}.{output}' "
                            f"does not match {len(self.inputs)} inputs"
                        )
                    if any(e < 0 for e in term.exponents) or term.degree > MAX_PLANT_DEGREE:
                        raise ValueError(
                            f"term {term.exponents} of '{mode.name}.{output}' "
                            f"exceeds degree {MAX_PLANT_DEGREE}"
                        )

        for guard in self.guards:
            if guard.source not in mode_names or guard.target not in mode_names:
                raise ValueError(f"guard {guard.source}->{guard.target} references unknown modes")
            if guard.channel not in input_names:
                raise ValueError(f"guard channel '{guard.channel}' is not an input")

        if self.event_inputs:
            undefined = [m.name for m in self.modes if m.dwell is None]
            if undefined:
                raise ValueError(f"modes {undefined} need a dwell to schedule events")

        return self

    @property
    def event_inputs(self) -> List[str]:
        return [i.name for i in self.inputs if i.kind == "events"]

    @property
    def input_names(self) -> List[str]:
        return [i.name for i in self.inputs]

    @property
    def mode_names(self) -> List[str]:
        return [m.name for m in self.modes]
