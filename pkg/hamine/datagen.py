#!/usr/bin/env python3

"""
Ground-truth trace generators: the two-mode thermostat and configurable plants whose
modes are quadratic polynomials of their inputs.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Tuple

import numpy as np
import tomllib
from pydantic import ValidationError as PydanticValidationError

from .exceptions import InvalidSpec, TraceNotFound, UnableToReadFile, ValidationError
from .models import Channel, ChannelSchema, GuardSpec, InputSpec, PlantSpec
from .traces import IOTrace, detect_clocks
from .typing import FloatArray

log = logging.getLogger(__name__)

THERMOSTAT_LOW = 19.0
THERMOSTAT_HIGH = 21.0
THERMOSTAT_DECAY = 0.1
THERMOSTAT_HEAT = 5.0
THERMOSTAT_START = 20.0
"""Initial temperature, the heater starts off."""

_TIMING_JITTER = (0.5, 1.5)
_MAX_OVERRUN = 10
"""A thermostat trace waiting for its next switch stops after this many times `duration`."""


def _flow(const: float, slope: float, curvature: float) -> List[Dict[str, Any]]:
    """`const + slope*tau + curvature*tau^2` in the clock input, the first of four inputs."""
    return [
        {"exponents": [0, 0, 0, 0], "coef": const},
        {"exponents": [1, 0, 0, 0], "coef": slope},
        {"exponents": [2, 0, 0, 0], "coef": curvature},
    ]


_PEDALS = {"throttle": "accelerate", "brake": "braking", "load": "cruise"}

_DEFAULT_PLANT = {
    "inputs": [
        {"name": "clock", "kind": "clock"},
        *(
            {"name": name, "kind": "events", "value": 0.0, "amplitude": 1.0, "width": 0.15}
            for name in _PEDALS
        ),
    ],
    "outputs": ["speed"],
    "modes": [
        # from 23 down to 20, flat at the end of the dwell
        {"name": "cruise", "dwell": 1.5, "flows": {"speed": _flow(23.0, -4.0, 4.0 / 3.0)}},
        # from 24 up to 32
        {"name": "accelerate", "dwell": 1.0, "flows": {"speed": _flow(24.0, 16.0, -8.0)}},
        # from 14 down to 6
        {"name": "braking", "dwell": 2.0, "flows": {"speed": _flow(14.0, -8.0, 2.0)}},
    ],
    "guards": [
        {"source": source, "target": target, "channel": channel, "kind": "rise"}
        for source in _PEDALS.values()
        for channel, target in _PEDALS.items()
    ],
    "initial_mode": "cruise",
    "first_event": 0.5,
}


def default_plant_spec() -> PlantSpec:
    """
    Three modes with quadratic flows in a clock input, entered on pulses of three distinct
    inputs from any mode.
    """
    return PlantSpec.model_validate(_DEFAULT_PLANT)


def _sample_count(period: float, duration: float) -> int:
    if period <= 0:
        raise ValidationError("The sampling period must be positive.")
    count = int(round(duration / period))
    if count < 2:
        raise ValidationError("The duration must cover at least two sampling periods.")
    return count


def _samples(seconds: float, period: float) -> int:
    return max(1, int(round(seconds / period)))


def gen_thermostat(
    n_traces: int,
    seed: int,
    period: float = 0.01,
    duration: float = 10.0,
    jitter: float = 0.0,
) -> List[IOTrace]:
    """
    Forward-Euler traces of the thermostat: `x' = -0.1x` with the heater off and
    `x' = 5 - 0.1x` with it on; it turns on at `x <= 19` and off at `x >= 21`.
    Time is the only input (a clock) and `x` the only output.

    Every trace starts at `x = 20` with the heater off, or uniformly within `jitter` of
    it, and runs for `duration` seconds and then up to the sample before the next switch.
    """
    if n_traces < 1:
        raise ValidationError("At least one trace must be generated.")
    if jitter < 0:
        raise ValidationError("The start jitter must not be negative.")

    rng = np.random.default_rng(seed)
    count = _sample_count(period, duration)
    schema = ChannelSchema(
        time="t",
        channels=[
            Channel(name="clock", role="input", index=1, clock=True),
            Channel(name="x", role="output", index=2),
        ],
    )

    traces = []
    for k in range(n_traces):
        x = [THERMOSTAT_START + (rng.uniform(-jitter, jitter) if jitter > 0 else 0.0)]
        heating = False

        while len(x) < _MAX_OVERRUN * count:
            rate = (THERMOSTAT_HEAT if heating else 0.0) - THERMOSTAT_DECAY * x[-1]
            following = x[-1] + period * rate
            switches = (heating and following >= THERMOSTAT_HIGH) or (
                not heating and following <= THERMOSTAT_LOW
            )
            if switches and len(x) >= count:
                break
            x.append(following)
            if switches:
                heating = not heating

        times = np.arange(len(x)) * period
        traces.append(
            IOTrace(times, np.column_stack([times, x]), schema, period, name=f"trace_{k:03d}")
        )

    log.info("Generated %d thermostat traces of at least %d samples", n_traces, count)
    return traces


def _switch_times(rng: np.random.Generator, period: float, horizon: float) -> FloatArray:
    """Random instants spaced uniformly in `[0.5, 1.5] * period` up to `horizon`."""
    instants = []
    now = rng.uniform(*_TIMING_JITTER) * period
    while now <= horizon:
        instants.append(now)
        now += rng.uniform(*_TIMING_JITTER) * period
    return np.asarray(instants)


def _stimulus(spec: InputSpec, t: FloatArray, rng: np.random.Generator) -> FloatArray:
    horizon = float(t[-1])

    if spec.kind in ("const", "events"):
        return np.full_like(t, spec.value)

    if spec.kind == "clock":
        return t.copy()

    if spec.kind == "ramp":
        return spec.value + spec.amplitude * t / horizon

    if spec.kind == "sine":
        phase = rng.uniform(0.0, 2 * np.pi)
        return spec.value + spec.amplitude * np.sin(2 * np.pi * t / spec.period + phase)

    instants = _switch_times(rng, spec.period, horizon)

    if spec.kind == "steps":
        # toggles after every instant, starting at `value`
        toggles = np.searchsorted(instants, t, side="right") % 2
        return spec.value + spec.amplitude * toggles

    if not instants.size:
        return np.full_like(t, spec.value)

    # pulses
    last = np.searchsorted(instants, t, side="right") - 1
    started = last >= 0
    active = started & (t < np.where(started, instants[np.clip(last, 0, None)], 0) + spec.width)
    return spec.value + spec.amplitude * active


def _guard_holds(guard: GuardSpec, prev: float, curr: float) -> bool:
    if guard.kind == "rise":
        return prev < guard.threshold <= curr
    if guard.kind == "fall":
        return prev >= guard.threshold > curr
    if guard.kind == "above":
        return curr > guard.threshold
    return curr < guard.threshold


def _polynomial(terms, u: FloatArray) -> FloatArray:
    y = np.zeros(len(u))
    for term in terms:
        y += term.coef * np.prod(u ** np.asarray(term.exponents, dtype=np.float64), axis=1)
    return y


def _run_modes(
    spec: PlantSpec, u: FloatArray, count: int, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray, int]:
    """
    Walk the guards over the samples, firing scheduled events into `u` in place.
    Returns the mode of every sample, the index of its mode entry and the sample count.
    """
    input_names = spec.input_names
    events = [input_names.index(name) for name in spec.event_inputs]
    dwells = {m.name: _samples(m.dwell, spec.period) for m in spec.modes if m.dwell}
    widths = {k: _samples(spec.inputs[k].width, spec.period) for k in events}

    current = spec.initial_mode
    entry = 0
    upcoming = -1
    if events:
        first = spec.first_event or spec.modes[spec.mode_names.index(current)].dwell / 2
        upcoming = _samples(first, spec.period)

    sequence: List[str] = []
    entries: List[int] = []
    for j in range(len(u)):
        fired = j == upcoming
        if fired:
            if j >= count:
                break
            column = events[rng.integers(len(events))]
            spec_input = spec.inputs[column]
            u[j : j + widths[column], column] = spec_input.value + spec_input.amplitude

        switched = False
        if j > 0:
            for guard in spec.guards:
                if guard.source != current:
                    continue
                column = input_names.index(guard.channel)
                if _guard_holds(guard, u[j - 1, column], u[j, column]):
                    current, entry, switched = guard.target, j, True
                    break

        if events and (fired or switched):
            upcoming = j + dwells[current]
        sequence.append(current)
        entries.append(entry)

    return np.asarray(sequence), np.asarray(entries), len(sequence)


def gen_polyplant(spec: PlantSpec) -> List[IOTrace]:
    """
    Traces of a piecewise-polynomial plant. Guards of the current mode are checked in
    order on every sample and the first one that holds switches mode; outputs are the
    polynomial of the current mode plus optional gaussian noise. Clock inputs enter the
    polynomials as the time since the mode entry.
    """
    rng = np.random.default_rng(spec.seed)
    count = _sample_count(spec.period, spec.duration)
    # room for the wait past `duration` until the next scheduled event
    longest = max((m.dwell or 0.0) for m in spec.modes) if spec.event_inputs else 0.0
    total = count + _samples(longest, spec.period) + 1 if spec.event_inputs else count
    grid = np.arange(total) * spec.period
    modes = {m.name: m for m in spec.modes}
    input_names = spec.input_names
    clocks = [k for k, i in enumerate(spec.inputs) if i.kind == "clock"]

    channels = [
        Channel(name=name, role="input", index=k)
        for k, name in enumerate(input_names, start=1)
    ] + [
        Channel(name=name, role="output", index=len(input_names) + k)
        for k, name in enumerate(spec.outputs, start=1)
    ]
    schema = ChannelSchema(time="t", channels=channels)

    traces = []
    for k in range(spec.traces):
        u = np.column_stack([_stimulus(i, grid, rng) for i in spec.inputs])
        sequence, entries, p = _run_modes(spec, u, count, rng)
        u, times = u[:p], grid[:p]

        local = u.copy()
        local[:, clocks] = (times - times[entries])[:, None]

        y = np.zeros((p, len(spec.outputs)))
        for name, mode in modes.items():
            rows = sequence == name
            if not rows.any():
                continue
            for col, output in enumerate(spec.outputs):
                y[rows, col] = _polynomial(mode.flows[output], local[rows])

        if spec.noise > 0:
            y += spec.noise * rng.standard_normal(y.shape)

        values = np.column_stack([u, y])
        traces.append(
            IOTrace(
                times,
                values,
                detect_clocks(times, values, schema),
                spec.period,
                name=f"trace_{k:03d}",
            )
        )

    log.info("Generated %d plant traces of at least %d samples", spec.traces, count)
    return traces


def load_plant_spec(path: Path) -> PlantSpec:
    """
    Read a plant specification from a JSON or (`.toml` suffix) TOML document.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise TraceNotFound(f"Plant specification not found: {path}") from e
    except (OSError, UnicodeDecodeError) as e:
        raise UnableToReadFile(f"Unable to read {path}: {e}") from e

    try:
        if Path(path).suffix.lower() == ".toml":
            document = tomllib.loads(text)
        else:
            document = json.loads(text)
        return PlantSpec.model_validate(document)

    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise InvalidSpec(f"Unable to parse {path}: {e}") from e

    except PydanticValidationError as e:
        raise InvalidSpec(f"Invalid plant specification {path}: {e}") from e
