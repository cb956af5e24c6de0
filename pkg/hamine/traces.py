#!/usr/bin/env python3

"""
Input/output traces: CSV ingestion and validation, per-channel min-max normalization and
the square-wave to frequency preprocessing of binary event channels.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from numpy.lib.stride_tricks import sliding_window_view
from pydantic import ValidationError as PydanticValidationError

from .config import SAMPLING_TOLERANCE
from .exceptions import (
    EmptyTrace,
    MalformedDocument,
    MissingColumn,
    NonBinaryChannel,
    NonMonotonicTime,
    NonUniformSampling,
    SchemaMismatch,
    TraceNotFound,
    UnableToReadFile,
    ValidationError,
)
from .models import ChannelRange, ChannelSchema, NormalizationParams
from .models.channel_schema import INPUT_PREFIX, OUTPUT_PREFIX
from .typing import FloatArray
from .utils import atomic_write

log = logging.getLogger(__name__)

CLOCK_TOLERANCE = 1e-9
"""Relative tolerance (on the time span) for an input channel to be taken as a clock."""

_RANGE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class IOTrace:
    """
    Uniformly sampled multivariate trace. `values` holds one column per channel, in
    `schema.channels` order.
    """

    times: FloatArray
    values: FloatArray
    schema: ChannelSchema
    sampling_period: float
    name: str = ""

    def __post_init__(self) -> None:
        times = np.array(self.times, dtype=np.float64)
        values = np.array(self.values, dtype=np.float64).reshape(len(times), -1)

        if values.shape[1] != len(self.schema.channels):
            raise SchemaMismatch(
                f"{values.shape[1]} value columns for {len(self.schema.channels)} channels"
            )

        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def p(self) -> int:
        return len(self.times)

    def column(self, name: str) -> FloatArray:
        return self.values[:, self.schema.names.index(name)]

    @property
    def inputs(self) -> FloatArray:
        return self.values[:, self.schema.input_positions]

    @property
    def outputs(self) -> FloatArray:
        return self.values[:, self.schema.output_positions]

    @property
    def features(self) -> FloatArray:
        """Non-clock channels, the ones compared by change-point detection and DTW."""
        return self.values[:, self.schema.feature_positions]

    def replace(self, **changes) -> "IOTrace":
        fields = {
            "times": self.times,
            "values": self.values,
            "schema": self.schema,
            "sampling_period": self.sampling_period,
            "name": self.name,
        }
        fields.update(changes)
        return IOTrace(**fields)


def _strip_prefix(column: str) -> str:
    for prefix in (INPUT_PREFIX, OUTPUT_PREFIX):
        if column.startswith(prefix):
            return column[len(prefix) :]
    return column


def detect_clocks(times: FloatArray, values: FloatArray, schema: ChannelSchema) -> ChannelSchema:
    """
    Flag the input channels that replicate the time column.
    """
    span = float(times[-1] - times[0]) if len(times) > 1 else 0.0
    tolerance = CLOCK_TOLERANCE * max(abs(span), 1.0)
    clocks = [
        channel.name
        for k, channel in enumerate(schema.channels)
        if channel.role == "input" and np.allclose(values[:, k], times, rtol=0, atol=tolerance)
    ]
    return schema.with_clocks(clocks)


def check_sampling(times: FloatArray) -> float:
    """
    Validate a time column and return its sampling period.

    Rows in error messages are 1-based data rows (the header is not counted).
    """
    if len(times) < 2:
        raise EmptyTrace()

    steps = np.diff(times)
    backwards = np.flatnonzero(steps <= 0)
    if backwards.size:
        row = int(backwards[0]) + 2
        raise NonMonotonicTime(f"Timestamps are not strictly increasing at row {row}.")

    period = float(steps[0])
    irregular = np.flatnonzero(np.abs(steps - period) > SAMPLING_TOLERANCE * period)
    if irregular.size:
        row = int(irregular[0]) + 2
        raise NonUniformSampling(
            f"Sampling gap {steps[irregular[0]]:g} differs from period {period:g} at row {row}.",
            row=row,
        )

    return period


def load_trace(
    path: Path,
    schema: Optional[ChannelSchema] = None,
    inputs: Optional[Sequence[str]] = None,
    outputs: Optional[Sequence[str]] = None,
    require_outputs: bool = True,
) -> IOTrace:
    """
    Read and validate a CSV trace.

    Without `schema`, roles come from `i:`/`o:` header prefixes or the `inputs`/`outputs`
    name lists. With `schema`, columns are matched by name (prefixes ignored) and reordered.
    When `require_outputs` is false, missing output columns are filled with NaN.
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)

    except FileNotFoundError as e:
        raise TraceNotFound(f"Trace file not found: {path}") from e

    except pd.errors.EmptyDataError as e:
        raise EmptyTrace(f"The trace {path} is empty.") from e

    except (OSError, UnicodeDecodeError) as e:
        raise UnableToReadFile(f"Unable to read {path}: {e}") from e

    except pd.errors.ParserError as e:
        raise MalformedDocument(f"Unable to parse {path}: {e}") from e

    header = [str(c).strip() for c in frame.columns]
    frame.columns = header

    if schema is None:
        try:
            schema = ChannelSchema.from_header(header, inputs, outputs)
        except (ValueError, PydanticValidationError) as e:
            raise MissingColumn(f"Invalid header in {path}: {e}") from e

    by_name = {_strip_prefix(c): c for c in header[1:]}
    missing = [
        c.name
        for c in schema.channels
        if c.name not in by_name and (require_outputs or c.role == "input")
    ]
    if missing:
        raise MissingColumn(f"Columns {missing} are missing from {path}.")

    if header[0] != schema.time:
        log.debug("Using '%s' as time column of %s (schema says '%s')", header[0], path, schema.time)

    try:
        times = frame.iloc[:, 0].astype(np.float64).to_numpy()
        columns = [
            frame[by_name[c.name]].astype(np.float64).to_numpy()
            if c.name in by_name
            else np.full(len(frame), np.nan)
            for c in schema.channels
        ]
    except ValueError as e:
        raise MalformedDocument(f"Non numeric value in {path}: {e}") from e

    values = np.column_stack(columns) if columns else np.empty((len(times), 0))
    read_positions = [k for k, c in enumerate(schema.channels) if c.name in by_name]

    if np.isnan(times).any() or np.isnan(values[:, read_positions]).any():
        raise MalformedDocument(f"Missing values in {path}.")

    period = check_sampling(times)
    schema = detect_clocks(times, values, schema)

    trace = IOTrace(times, values, schema, period, name=Path(path).name)
    log.debug("Loaded %s: %d samples, period %g", path, trace.p, period)
    return trace


def serialize_trace(trace: IOTrace) -> str:
    """
    CSV text of `trace` with role-prefixed headers. Floats are written with their shortest
    round-trip representation.
    """
    frame = pd.DataFrame(
        np.column_stack([trace.times, trace.values]), columns=trace.schema.header
    )
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def write_trace(path: Path, trace: IOTrace) -> None:
    atomic_write(path, serialize_trace(trace))


def select_outputs(trace: IOTrace, names: Sequence[str]) -> IOTrace:
    """
    Keep every input and only the `names` output channels.
    """
    unknown = set(names) - set(trace.schema.output_names)
    if unknown:
        raise SchemaMismatch(f"Unknown output channels: {sorted(unknown)}")

    schema = trace.schema.restrict_outputs(names)
    positions = [trace.schema.names.index(n) for n in schema.names]
    return trace.replace(values=trace.values[:, positions], schema=schema)


def normalization_params(trace: IOTrace) -> NormalizationParams:
    lows = trace.values.min(axis=0)
    highs = trace.values.max(axis=0)
    ranges = {
        name: ChannelRange(min=float(lo), max=float(hi))
        for name, lo, hi in zip(trace.schema.names, lows, highs)
    }
    return NormalizationParams(
        ranges=ranges, time_start=float(trace.times[0]), time_end=float(trace.times[-1])
    )


def _ranges_for(trace: IOTrace, params: NormalizationParams) -> Tuple[FloatArray, FloatArray]:
    missing = [n for n in trace.schema.names if n not in params.ranges]
    if missing:
        raise SchemaMismatch(f"No normalization range for channels {missing}.")

    lows = np.array([params.ranges[n].min for n in trace.schema.names])
    widths = np.array([params.ranges[n].width for n in trace.schema.names])
    return lows, widths


def normalize(
    trace: IOTrace, params: Optional[NormalizationParams] = None
) -> Tuple[IOTrace, NormalizationParams]:
    """
    Min-max normalize every channel to [0, 1]. Constant channels map to 0.

    Without `params` they are computed from `trace`; frozen `params` from an earlier
    trace are applied as is, and values outside their range are kept (a warning is logged).
    Times are left untouched.
    """
    if params is None:
        params = normalization_params(trace)

    lows, widths = _ranges_for(trace, params)
    safe = np.where(widths > 0, widths, 1.0)
    scaled = np.where(widths > 0, (trace.values - lows) / safe, 0.0)

    finite = scaled[np.isfinite(scaled)]
    if finite.size and (
        finite.min() < -_RANGE_TOLERANCE or finite.max() > 1 + _RANGE_TOLERANCE
    ):
        log.warning(
            "Trace %s exceeds the frozen normalization range; values fall outside [0, 1]",
            trace.name or "<unnamed>",
        )

    return trace.replace(values=scaled), params


def denormalize(trace: IOTrace, params: NormalizationParams) -> IOTrace:
    """
    Inverse of `normalize`. Constant channels are restored to their recorded value.
    """
    lows, widths = _ranges_for(trace, params)
    return trace.replace(values=trace.values * widths + lows)


def _selected_positions(trace: IOTrace, channels: Optional[Sequence[str]]) -> List[int]:
    if channels is None:
        return [k for k, c in enumerate(trace.schema.channels) if c.role == "input" and not c.clock]

    unknown = set(channels) - set(trace.schema.names)
    if unknown:
        raise SchemaMismatch(f"Unknown channels: {sorted(unknown)}")

    return [trace.schema.names.index(n) for n in channels]


def to_frequency(
    trace: IOTrace,
    window: int,
    channels: Optional[Sequence[str]] = None,
    stride: int = 1,
) -> IOTrace:
    """
    Replace binary channels by their rising-edge rate (Hz) over a sliding window.

    A rising edge is counted when both of its samples fall inside the window, so a window
    of `w` samples holds at most `w // 2` edges and the rate never exceeds `1 / (2c)`.
    Other channels take the window mean. Output timestamps sit at the window centers;
    a window longer than the trace is clamped to it and yields a single point.
    `channels` defaults to every non-clock input.
    """
    if window < 2:
        raise ValidationError("The frequency window must be at least 2 samples.")
    if stride < 1:
        raise ValidationError("The frequency stride must be at least 1 sample.")

    selected = _selected_positions(trace, channels)
    for k in selected:
        column = trace.values[:, k]
        if not np.isin(column, (0.0, 1.0)).all():
            raise NonBinaryChannel(
                f"Channel '{trace.schema.names[k]}' has values other than 0 and 1."
            )

    w = min(window, trace.p)
    c = trace.sampling_period

    edges = np.zeros_like(trace.values)
    edges[1:] = (trace.values[:-1] == 0) & (trace.values[1:] == 1)

    # windows of the rising-edge flags start one sample later: edge i spans samples i-1, i
    edge_counts = sliding_window_view(edges[1:], w - 1, axis=0).sum(axis=-1)[::stride]
    means = sliding_window_view(trace.values, w, axis=0).mean(axis=-1)[::stride]

    values = means.copy()
    values[:, selected] = edge_counts[:, selected] / (w * c)

    starts = np.arange(0, trace.p - w + 1, stride)
    times = trace.times[starts] + (w - 1) * c / 2

    log.debug("Frequency conversion of %d channels, window %d, %d points", len(selected), w, len(times))
    return trace.replace(times=times, values=values, sampling_period=stride * c)


def from_frequency(
    trace: IOTrace,
    period: float,
    channels: Optional[Sequence[str]] = None,
) -> IOTrace:
    """
    Rebuild 0/1 square waves sampled every `period` seconds from frequency channels, by
    integrating the (linearly interpolated) frequency into a phase. Other channels are
    linearly interpolated.
    """
    if period <= 0:
        raise ValidationError("The sampling period must be positive.")

    selected = _selected_positions(trace, channels)
    start, end = float(trace.times[0]), float(trace.times[-1])
    count = int(np.floor((end - start) / period + 1e-9)) + 1
    times = start + np.arange(count) * period

    values = np.column_stack(
        [np.interp(times, trace.times, trace.values[:, k]) for k in range(trace.values.shape[1])]
    )
    for k in selected:
        frequency = np.clip(values[:, k], 0.0, None)
        phase = np.concatenate([[0.0], np.cumsum(frequency[:-1] * period)])
        values[:, k] = (np.mod(phase, 1.0) >= 0.5).astype(np.float64)

    return trace.replace(times=times, values=values, sampling_period=period)
