#!/usr/bin/env python3

"""
Module that exposes the persisted form of the learning store. Everything the online loop
needs to continue with a new trace is kept, so resuming from a file behaves exactly like
a session that never stopped.
"""

from __future__ import annotations

from typing import List, Optional

from pydantic import Field

from .base_document import DocumentModel

Matrix = List[List[float]]


class SegmentDocument(DocumentModel):
    """A stored state segment, values in normalized units (samples x channels)."""

    trace: int = Field(ge=0)
    start: int = Field(ge=0)
    end: int = Field(ge=0)
    values: Matrix


class NeighborhoodDocument(DocumentModel):
    """A transition segment: the change-point vicinity that entered a state."""

    trace: int = Field(ge=0)
    cp: int = Field(ge=0)
    times: List[float]
    values: Matrix


class StateDocument(DocumentModel):
    id: int = Field(ge=0)
    segments: List[SegmentDocument]
    dwells: List[float]
    visits: int = Field(ge=0)


class TransitionDocument(DocumentModel):
    src: Optional[int] = None
    dst: int = Field(ge=0)
    neighborhoods: List[NeighborhoodDocument]
    source_dwells: List[float] = Field(default_factory=list)
    distance_sums: List[float]
    updates: int = Field(ge=0)
    support: int = Field(ge=0)


class StoreDocument(DocumentModel):
    states: List[StateDocument]
    transitions: List[TransitionDocument]
    next_id: int = Field(ge=0)
    traces_processed: int = Field(ge=0)
