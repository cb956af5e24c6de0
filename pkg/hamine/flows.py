#!/usr/bin/env python3

"""
Polynomial flow conditions: least-squares fit of every output on the monomials of the
inputs, exact partial derivatives and evaluation.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from itertools import combinations_with_replacement
from typing import TYPE_CHECKING, Dict, List, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from .exceptions import DegenerateDesign, DimensionMismatch, Underdetermined
from .models import ChannelSchema, PolynomialFlow, Term
from .typing import Exponents, FloatArray

if TYPE_CHECKING:
    from .synthesis import StateRecord

log = logging.getLogger(__name__)


def monomial_exponents(n_inputs: int, degree: int) -> List[Exponents]:
    """
    Exponent tuples of every monomial of total degree `<= degree`, in graded lexicographic
    order: `1, x0, x1, x0^2, x0*x1, x1^2, ...`.
    """
    exponents = []
    for total in range(degree + 1):
        for combo in combinations_with_replacement(range(n_inputs), total):
            counts = [0] * n_inputs
            for k in combo:
                counts[k] += 1
            exponents.append(tuple(counts))
    return exponents


def design_matrix(x: FloatArray, exponents: Sequence[Exponents]) -> FloatArray:
    """`(samples, monomials)` matrix of every monomial evaluated at every sample."""
    powers = np.asarray(exponents, dtype=np.float64).reshape(len(exponents), -1)
    return np.prod(x[:, np.newaxis, :] ** powers[np.newaxis, :, :], axis=2)


def fit_polynomial(
    x: npt.ArrayLike,
    y: npt.ArrayLike,
    degree: int,
    ridge: float = 0.0,
    inputs: Sequence[str] = (),
    outputs: Sequence[str] = (),
) -> PolynomialFlow:
    """
    Least-squares fit of every column of `y` on the monomials of `x`, with a ridge penalty
    on every coefficient but the intercept (solved as an augmented least-squares problem).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    x = x.reshape(-1, 1) if x.ndim == 1 else x
    y = y.reshape(-1, 1) if y.ndim == 1 else y

    if len(x) != len(y):
        raise DimensionMismatch(f"{len(x)} input samples for {len(y)} output samples.")

    inputs = list(inputs) or [f"x{k}" for k in range(x.shape[1])]
    outputs = list(outputs) or [f"y{k}" for k in range(y.shape[1])]
    if len(inputs) != x.shape[1] or len(outputs) != y.shape[1]:
        raise DimensionMismatch("Channel names do not match the sample columns.")

    exponents = monomial_exponents(x.shape[1], degree)
    a = design_matrix(x, exponents)
    n_samples, n_terms = a.shape

    if ridge == 0:
        if n_samples < n_terms:
            raise Underdetermined(
                f"{n_samples} samples cannot determine {n_terms} coefficients."
            )
        if np.linalg.matrix_rank(a) < n_terms:
            raise DegenerateDesign(
                f"The design matrix has rank {np.linalg.matrix_rank(a)} for {n_terms} monomials."
            )
        coef = np.linalg.lstsq(a, y, rcond=None)[0]
    else:
        penalty = np.sqrt(ridge) * np.eye(n_terms)[1:]
        a_aug = np.vstack([a, penalty])
        y_aug = np.vstack([y, np.zeros((n_terms - 1, y.shape[1]))])
        coef = np.linalg.lstsq(a_aug, y_aug, rcond=None)[0]

    residuals = np.sqrt(np.mean((a @ coef - y) ** 2, axis=0))

    return PolynomialFlow(
        degree=degree,
        inputs=inputs,
        outputs={
            name: [
                Term(exponents=list(e), coef=float(c)) for e, c in zip(exponents, coef[:, k])
            ]
            for k, name in enumerate(outputs)
        },
        residuals={name: float(r) for name, r in zip(outputs, residuals)},
    )


def state_samples(state: "StateRecord", schema: ChannelSchema) -> Tuple[FloatArray, FloatArray]:
    """
    Pooled `(inputs, outputs)` of the segments stored in a state. Clock inputs are
    re-based to the first sample of each segment, so they measure the time spent in the mode.
    """
    clocks = schema.clock_input_positions
    xs, ys = [], []

    for seg in state.segments:
        x = seg.values[:, schema.input_positions].copy()
        x[:, clocks] -= x[0, clocks]
        xs.append(x)
        ys.append(seg.values[:, schema.output_positions])

    return np.vstack(xs), np.vstack(ys)


def fit_flow(
    state: "StateRecord", schema: ChannelSchema, degree: int, ridge: float
) -> PolynomialFlow:
    """
    Flow condition of a state from its pooled segments, in normalized units.
    """
    x, y = state_samples(state, schema)
    flow = fit_polynomial(x, y, degree, ridge, schema.input_names, schema.output_names)
    log.debug("State %d flow fitted on %d samples, rmse %s", state.id, len(x), flow.residuals)
    return flow


def _collect(terms: Dict[Exponents, float], n_inputs: int, degree: int) -> List[Term]:
    """Every monomial up to `degree` in graded lexicographic order, zeros included."""
    return [
        Term(exponents=list(e), coef=terms.get(e, 0.0))
        for e in monomial_exponents(n_inputs, degree)
        if e in terms or sum(e) == 0
    ]


def partial_derivatives(flow: PolynomialFlow) -> List[PolynomialFlow]:
    """
    Exact partial derivative of the flow with respect to each input, in input order.
    """
    n = len(flow.inputs)
    degree = max(1, flow.degree - 1)
    derivatives = []

    for k in range(n):
        outputs = {}
        for name, terms in flow.outputs.items():
            derived: Dict[Exponents, float] = defaultdict(float)
            for term in terms:
                power = term.exponents[k]
                if power == 0:
                    continue
                exponents = list(term.exponents)
                exponents[k] -= 1
                derived[tuple(exponents)] += term.coef * power
            outputs[name] = _collect(derived, n, degree)

        derivatives.append(PolynomialFlow(degree=degree, inputs=flow.inputs, outputs=outputs))

    return derivatives


def coefficient_matrix(flow: PolynomialFlow) -> Tuple[List[Exponents], FloatArray]:
    """Union of the flow's monomials and the `(monomials, outputs)` coefficients."""
    exponents = sorted(
        {tuple(t.exponents) for terms in flow.outputs.values() for t in terms},
        key=lambda e: (sum(e), [-p for p in e]),
    )
    index = {e: i for i, e in enumerate(exponents)}
    coef = np.zeros((len(exponents), len(flow.outputs)))

    for k, terms in enumerate(flow.outputs.values()):
        for term in terms:
            coef[index[tuple(term.exponents)], k] += term.coef

    return exponents, coef


def evaluate_flow(flow: PolynomialFlow, x: npt.ArrayLike) -> FloatArray:
    """
    Outputs of the flow for one input vector `(n,)` or a batch `(samples, n)`, by direct
    monomial evaluation. Columns follow `flow.outputs`.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = x.reshape(1, -1) if single else x

    if batch.shape[1] != len(flow.inputs):
        raise DimensionMismatch(
            f"The flow takes {len(flow.inputs)} inputs, got {batch.shape[1]}."
        )

    exponents, coef = coefficient_matrix(flow)
    y = design_matrix(batch, exponents) @ coef
    return y[0] if single else y


def render_flow(flow: PolynomialFlow, precision: int = 3) -> str:
    """
    Human readable form, one `output = ...` line per output. Terms that round to zero
    are left out, the constant is always shown.
    """
    lines = []
    for name, terms in flow.outputs.items():
        parts = []
        for term in terms:
            coef = round(term.coef, precision) + 0.0
            if coef == 0 and term.degree > 0:
                continue
            factors = [
                var if power == 1 else f"{var}^{power}"
                for var, power in zip(flow.inputs, term.exponents)
                if power
            ]
            parts.append(" ".join([f"{coef:g}", *factors]) if factors else f"{coef:g}")
        lines.append(f"{name} = " + " + ".join(parts).replace("+ -", "- "))
    return "\n".join(lines)
