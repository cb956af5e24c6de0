#!/usr/bin/env python3

"""
Module that exposes the channel schema of an input/output trace and the per-channel
normalization parameters frozen into a learned model.
"""

from __future__ import annotations

from typing import Dict, List, Literal, Optional, Sequence

from pydantic import Field, model_validator

from .base_document import DocumentModel

ChannelRole = Literal["input", "output"]

INPUT_PREFIX = "i:"
OUTPUT_PREFIX = "o:"


class Channel(DocumentModel):
    """
    A named column of a trace. `clock` marks input channels that replicate the time column.
    """

    name: str = Field(min_length=1)
    role: ChannelRole
    index: int = Field(ge=1)
    clock: bool = False


class ChannelSchema(DocumentModel):
    """
    Named time column plus the ordered input and output channels of a trace.
    """

    time: str = Field(min_length=1)
    channels: List[Channel]

    @model_validator(mode="after")
    def _check_channels(self) -> "ChannelSchema":
        names = [self.time] + [c.name for c in self.channels]
        if len(set(names)) != len(names):
            raise ValueError(f"channel names must be unique: {names}")

        if not any(c.role == "input" for c in self.channels):
            raise ValueError("at least one input channel is required")

        if not any(c.role == "output" for c in self.channels):
            raise ValueError("at least one output channel is required")

        if any(c.clock and c.role != "input" for c in self.channels):
            raise ValueError("only input channels can be clocks")

        return self

    @classmethod
    def from_header(
        cls,
        header: Sequence[str],
        inputs: Optional[Sequence[str]] = None,
        outputs: Optional[Sequence[str]] = None,
    ) -> "ChannelSchema":
        """
        Build a schema from a CSV header. The first column is the time column, `i:`/`o:`
        prefixes set the role of a column and override `inputs`/`outputs`.
        """
        if len(header) < 3:
            raise ValueError("a trace needs a time column, an input and an output")

        inputs = set(inputs or ())
        outputs = set(outputs or ())
        channels = []

        for position, column in enumerate(header[1:], start=1):
            if column.startswith(INPUT_PREFIX):
                name, role = column[len(INPUT_PREFIX) :], "input"
            elif column.startswith(OUTPUT_PREFIX):
                name, role = column[len(OUTPUT_PREFIX) :], "output"
            elif column in inputs:
                name, role = column, "input"
            elif column in outputs:
                name, role = column, "output"
            else:
                raise ValueError(f"unknown role for column '{column}'")

            channels.append(Channel(name=name, role=role, index=position))

        return cls(time=header[0], channels=channels)

    @property
    def names(self) -> List[str]:
        return [c.name for c in self.channels]

    @property
    def inputs(self) -> List[Channel]:
        return [c for c in self.channels if c.role == "input"]

    @property
    def outputs(self) -> List[Channel]:
        return [c for c in self.channels if c.role == "output"]

    @property
    def input_names(self) -> List[str]:
        return [c.name for c in self.inputs]

    @property
    def output_names(self) -> List[str]:
        return [c.name for c in self.outputs]

    @property
    def header(self) -> List[str]:
        """
        CSV header with role prefixes, so the file can be re-read without extra flags.
        """
        prefixes = {"input": INPUT_PREFIX, "output": OUTPUT_PREFIX}
        return [self.time] + [prefixes[c.role] + c.name for c in self.channels]

    @property
    def clock_names(self) -> List[str]:
        return [c.name for c in self.channels if c.clock]

    @property
    def input_positions(self) -> List[int]:
        """Columns of the input channels in a trace value matrix."""
        return [k for k, c in enumerate(self.channels) if c.role == "input"]

    @property
    def output_positions(self) -> List[int]:
        return [k for k, c in enumerate(self.channels) if c.role == "output"]

    @property
    def feature_positions(self) -> List[int]:
        """Columns compared by change-point detection and DTW (every non-clock channel)."""
        return [k for k, c in enumerate(self.channels) if not c.clock]

    @property
    def clock_input_positions(self) -> List[int]:
        """Positions of the clock channels inside the input vector."""
        return [k for k, c in enumerate(self.inputs) if c.clock]

    def with_clocks(self, names: Sequence[str]) -> "ChannelSchema":
        """
        Copy of the schema where exactly the input channels in `names` are flagged as clocks.
        """
        channels = [c.model_copy(update={"clock": c.name in names}) for c in self.channels]
        return ChannelSchema(time=self.time, channels=channels)

    def restrict_outputs(self, names: Sequence[str]) -> "ChannelSchema":
        """
        Copy of the schema keeping every input and only the outputs in `names`.
        Column indexes are renumbered.
        """
        kept = [c for c in self.channels if c.role == "input" or c.name in names]
        channels = [c.model_copy(update={"index": k}) for k, c in enumerate(kept, start=1)]
        return ChannelSchema(time=self.time, channels=channels)

    def same_channels(self, other: "ChannelSchema") -> bool:
        """
        Whether both schemas declare the same channel names and roles, in order.
        """
        ours = [(c.name, c.role) for c in self.channels]
        theirs = [(c.name, c.role) for c in other.channels]
        return ours == theirs


class ChannelRange(DocumentModel):
    min: float
    max: float

    @model_validator(mode="after")
    def _check_order(self) -> "ChannelRange":
        if self.max < self.min:
            raise ValueError(f"max ({self.max}) is lower than min ({self.min})")
        return self

    @property
    def width(self) -> float:
        return self.max - self.min


class NormalizationParams(DocumentModel):
    """
    Per-channel min/max pairs plus the time span of the trace they were computed on.
    The time span is the unit of normalized durations (dwell times, time conditions).
    """

    ranges: Dict[str, ChannelRange]
    time_start: float
    time_end: float

    @property
    def time_span(self) -> float:
        return self.time_end - self.time_start
