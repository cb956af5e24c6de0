#!/usr/bin/env python3

"""
Module that exposes `LearnerConfig`, the knobs of the online learner. A resolved copy is
stored in every model file so a resumed session learns with the same settings.
"""

from __future__ import annotations

from typing import Optional

from pydantic import Field, model_validator

from ..config import (
    DEFAULT_CONFIDENCE_DECAY,
    DEFAULT_COST,
    DEFAULT_DEGREE,
    DEFAULT_DIAG_THRESHOLD,
    DEFAULT_DIST_THRESHOLD,
    DEFAULT_EPSILON,
    DEFAULT_MAX_SEGMENTS,
    DEFAULT_RIDGE,
    DEFAULT_TIME_VARIANCE,
    DEFAULT_WINDOW,
    MAX_DEGREE,
    MIN_WINDOW,
)
from ..typing import CostModel
from .base_document import DocumentModel


class LearnerConfig(DocumentModel):
    """
    Thresholds and sizes used by segmentation, clustering, jump and flow mining.

    `min_size` defaults to `window` and `neighborhood` (half-width `v`) to `window // 2`.
    A `None` penalty is estimated per trace from its discrepancy curve and noise level.
    `cost` picks the segment model of the detector: `l2` for level shifts, `linear` for
    slope changes.
    """

    dist_threshold: float = Field(default=DEFAULT_DIST_THRESHOLD, gt=0)
    diag_threshold: float = Field(default=DEFAULT_DIAG_THRESHOLD, gt=0, le=1)
    window: int = Field(default=DEFAULT_WINDOW, ge=MIN_WINDOW)
    cost: CostModel = DEFAULT_COST
    min_size: Optional[int] = Field(default=None, ge=1)
    neighborhood: Optional[int] = Field(default=None, ge=1)
    penalty: Optional[float] = Field(default=None, ge=0)
    max_segments: int = Field(default=DEFAULT_MAX_SEGMENTS, ge=1)
    degree: int = Field(default=DEFAULT_DEGREE, ge=1, le=MAX_DEGREE)
    ridge: float = Field(default=DEFAULT_RIDGE, ge=0)
    confidence_decay: float = Field(default=DEFAULT_CONFIDENCE_DECAY, gt=0)
    time_variance: float = Field(default=DEFAULT_TIME_VARIANCE, gt=0)
    epsilon: float = Field(default=DEFAULT_EPSILON, gt=0)

    @model_validator(mode="after")
    def _resolve_window_defaults(self) -> "LearnerConfig":
        if self.min_size is None:
            self.min_size = self.window
        if self.neighborhood is None:
            self.neighborhood = max(1, self.window // 2)
        return self

    @property
    def v(self) -> int:
        """Neighborhood half-width, in samples."""
        return int(self.neighborhood)  # type: ignore[arg-type]
