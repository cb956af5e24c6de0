#!/usr/bin/env python3

"""
Window-sliding change-point detection over a multivariate trace, segment extraction and
change-point neighborhoods.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import ruptures as rpt
from ruptures.base import BaseCost
from ruptures.exceptions import NotEnoughPoints
from scipy.stats import median_abs_deviation

from .config import DEFAULT_COST, MIN_WINDOW
from .exceptions import TraceTooShort
from .models import ChannelSchema
from .traces import IOTrace
from .typing import CostModel, FloatArray

log = logging.getLogger(__name__)

PENALTY_FACTOR = 3.0
"""Automatic penalty, as a multiple of the median discrepancy."""

NOISE_PENALTY_FACTOR = 5.0
"""Automatic penalty floor, as a multiple of `ln(p)` times the estimated noise variance."""

_RELATIVE_PENALTY_FLOOR = 1e-9
_ABSOLUTE_PENALTY_FLOOR = 1e-12


@dataclass(frozen=True)
class ChangePointSet:
    """
    Detected change points. Index `i` is the first sample of a new segment, so
    `1 <= i <= p - 2`; `scores` holds the discrepancy of each index.
    """

    indices: Tuple[int, ...]
    scores: Tuple[float, ...]
    window: int
    min_size: int
    penalty: float

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class Segment:
    """Inclusive `[start, end]` slice of a trace."""

    trace: IOTrace
    start: int
    end: int

    def __len__(self) -> int:
        return self.end - self.start + 1

    @property
    def values(self) -> FloatArray:
        return self.trace.values[self.start : self.end + 1]

    @property
    def features(self) -> FloatArray:
        return self.trace.features[self.start : self.end + 1]

    @property
    def duration(self) -> float:
        """Dwell duration in seconds, one sampling period per sample."""
        return len(self) * self.trace.sampling_period


@dataclass(frozen=True)
class Neighborhood:
    """
    `2v + 1` samples centered on a change point, edge-replicated at the trace boundaries.
    """

    cp: int
    v: int
    times: FloatArray
    values: FloatArray
    schema: ChannelSchema
    trace_index: int = 0

    def __len__(self) -> int:
        return len(self.times)

    @property
    def inputs(self) -> FloatArray:
        return self.values[:, self.schema.input_positions]

    @property
    def outputs(self) -> FloatArray:
        return self.values[:, self.schema.output_positions]


class LinearTrendCost(BaseCost):
    """
    Residual sum of squares of a least-squares line in time, fitted per channel and summed.
    A ramp costs nothing, so the discrepancy peaks where the slope changes.
    """

    model = "linear"
    min_size = 2

    def fit(self, signal: FloatArray) -> "LinearTrendCost":
        self.signal = signal.reshape(-1, 1) if signal.ndim == 1 else signal
        return self

    def error(self, start: int, end: int) -> float:
        if end - start < self.min_size:
            raise NotEnoughPoints
        sub = self.signal[start:end]
        t = np.arange(end - start) - (end - start - 1) / 2
        centered = sub - sub.mean(axis=0)
        slope = t @ centered / (t @ t)
        return float(((centered - np.outer(t, slope)) ** 2).sum())


def discrepancy_curve(trace: IOTrace, window: int, cost: CostModel = DEFAULT_COST) -> FloatArray:
    """
    Discrepancy of every sample: the cost of the union of the windows `[i-W, i)` and
    `[i, i+W)` minus the cost of each one, over the non-clock channels. With the `l2` cost
    this is `(W/2) * |mean_left - mean_right|^2`. Samples where either window does not fit
    score 0.
    """
    p = trace.p
    if window < MIN_WINDOW or p < 2 * window:
        raise TraceTooShort(
            f"The trace has {p} samples, detection needs at least {2 * max(window, MIN_WINDOW)} "
            f"(window {window}, minimum {MIN_WINDOW})."
        )

    features = trace.features
    curve = np.zeros(p)
    if features.shape[1] == 0 or p == 2 * window:
        return curve

    if cost == "linear":
        detector = rpt.Window(width=2 * window, custom_cost=LinearTrendCost(), jump=1)
    else:
        detector = rpt.Window(width=2 * window, model="l2", jump=1)
    detector.fit(features)
    curve[window : p - window] = detector.score
    return curve


def noise_variance(features: FloatArray, cost: CostModel = DEFAULT_COST) -> float:
    """
    Robust noise variance summed over channels, from the normalized MAD of the first
    differences (`l2`) or of the second differences (`linear`). Steps and kinks are
    outliers of the differences and barely move the median.
    """
    order, scale = (1, np.sqrt(2.0)) if cost == "l2" else (2, np.sqrt(6.0))
    if features.shape[1] == 0 or features.shape[0] <= order + 1:
        return 0.0
    diffs = np.diff(features, n=order, axis=0)
    sigma = median_abs_deviation(diffs, axis=0, scale="normal") / scale
    return float((sigma**2).sum())


def auto_penalty(
    curve: FloatArray, window: int, noise: float = 0.0, samples: Optional[int] = None
) -> float:
    """
    The largest of `PENALTY_FACTOR` times the median discrepancy over the scored samples
    and `NOISE_PENALTY_FACTOR * ln(p) * noise`, floored so that a flat curve never yields
    change points.
    """
    samples = len(curve) if samples is None else samples
    scored = curve[window : len(curve) - window]
    peak = float(scored.max()) if scored.size else 0.0
    return max(
        PENALTY_FACTOR * float(np.median(scored)) if scored.size else 0.0,
        NOISE_PENALTY_FACTOR * np.log(max(samples, 2)) * noise,
        _RELATIVE_PENALTY_FLOOR * peak,
        _ABSOLUTE_PENALTY_FLOOR,
    )


def detect_change_points(
    trace: IOTrace,
    window: int,
    min_size: Optional[int] = None,
    penalty: Optional[float] = None,
    cost: CostModel = DEFAULT_COST,
) -> ChangePointSet:
    """
    Local maxima of the discrepancy curve above `penalty`, picked greedily from the highest
    so that change points stay `min_size` apart and every segment keeps `min_size` samples.

    A local maximum is strictly above its left neighbor and not below its right one, so
    the first sample of a plateau wins; both neighbors must be scored, so a curve still
    rising at the edge of the scored range is not a peak. `min_size` defaults to `window`
    and `penalty` to `auto_penalty`.
    """
    min_size = window if min_size is None else min_size
    curve = discrepancy_curve(trace, window, cost)
    p = trace.p
    if penalty is None:
        penalty = auto_penalty(curve, window, noise_variance(trace.features, cost), p)

    candidates = np.arange(window + 1, p - window - 1)
    peaks = candidates[
        (curve[candidates] > curve[candidates - 1])
        & (curve[candidates] >= curve[candidates + 1])
        & (curve[candidates] > penalty)
        & (candidates >= min_size)
        & (p - candidates >= min_size)
    ]

    chosen: List[int] = []
    for index in sorted(peaks.tolist(), key=lambda i: (-curve[i], i)):
        if all(abs(index - other) >= min_size for other in chosen):
            chosen.append(index)

    chosen.sort()
    log.debug(
        "%d change points in %s (%s cost, penalty %.3g, %d peaks)",
        len(chosen), trace.name or "<unnamed>", cost, penalty, len(peaks),
    )
    return ChangePointSet(
        indices=tuple(chosen),
        scores=tuple(float(curve[i]) for i in chosen),
        window=window,
        min_size=min_size,
        penalty=float(penalty),
    )


def segment(trace: IOTrace, cps: ChangePointSet) -> List[Segment]:
    """
    Tile the trace: `k` change points give `k + 1` segments in temporal order.
    """
    bounds = [0, *cps.indices, trace.p]
    return [Segment(trace, start, stop - 1) for start, stop in zip(bounds, bounds[1:])]


def neighborhood(trace: IOTrace, cp: int, v: int) -> Neighborhood:
    """
    The `2v + 1` samples around `cp`; positions outside the trace repeat the nearest sample.
    """
    positions = np.clip(np.arange(cp - v, cp + v + 1), 0, trace.p - 1)
    return Neighborhood(
        cp=cp,
        v=v,
        times=trace.times[positions],
        values=trace.values[positions],
        schema=trace.schema,
    )
