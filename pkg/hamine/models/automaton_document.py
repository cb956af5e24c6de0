#!/usr/bin/env python3

"""
Module that exposes the models of a finalized hybrid automaton: polynomial flows on the
modes, jump conditions on the switches and the versioned model document that wraps them.
"""

from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import Field, model_validator

from .. import MODEL_VERSION
from .base_document import DocumentModel
from .channel_schema import ChannelSchema, NormalizationParams
from .learner_config import LearnerConfig
from .store_document import StoreDocument


class Term(DocumentModel):
    """
    A monomial `coef * x0^e0 * x1^e1 * ...` over the input channels of a flow.
    """

    exponents: List[int]
    coef: float

    @property
    def degree(self) -> int:
        return sum(self.exponents)


class PolynomialFlow(DocumentModel):
    """
    Polynomial relation between the inputs and each output channel of a mode.
    `outputs` maps every output channel to its terms in graded lexicographic order.
    """

    degree: int = Field(ge=1)
    inputs: List[str]
    outputs: Dict[str, List[Term]]
    residuals: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_terms(self) -> "PolynomialFlow":
        width = len(self.inputs)
        for name, terms in self.outputs.items():
            if not any(t.degree == 0 for t in terms):
                raise ValueError(f"flow of '{name}' lacks a constant term")

            for term in terms:
                if len(term.exponents) != width:
                    raise ValueError(
                        f"term {term.exponents} of '{name}' does not match {width} inputs"
                    )
                if any(e < 0 for e in term.exponents) or term.degree > self.degree:
                    raise ValueError(f"invalid exponents {term.exponents} for '{name}'")

        return self


class DwellStats(DocumentModel):
    """Dwell time statistics of a mode, in normalized time units."""

    count: int = Field(ge=0)
    mean: float = Field(ge=0)
    variance: float = Field(ge=0)


class ModeDocument(DocumentModel):
    id: int = Field(ge=0)
    flow: Optional[PolynomialFlow] = None
    fit_error: Optional[str] = None
    mean_outputs: Dict[str, float]
    dwell: DwellStats
    visits: int = Field(ge=0)


class Clause(DocumentModel):
    """Input event `channel: before -> after`, values in normalized units."""

    channel: str
    before: float
    after: float

    @property
    def step(self) -> float:
        return self.after - self.before


class JumpCondition(DocumentModel):
    """
    Event clauses (joined by AND) plus an optional dwell time condition.
    """

    clauses: List[Clause] = Field(default_factory=list)
    time: Optional[float] = Field(default=None, ge=0)
    support: int = Field(ge=1)
    ambiguous: bool = False


class SwitchDocument(JumpCondition):
    """
    A control switch. A `None` source marks the entry into an initial mode.
    """

    src: Optional[int] = None
    dst: int = Field(ge=0)
    confidence: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_label(self) -> "SwitchDocument":
        if self.src is not None and not self.clauses and self.time is None:
            raise ValueError(
                f"switch {self.src}->{self.dst} needs a clause or a time condition"
            )
        return self


class HybridAutomaton(DocumentModel):
    """
    Finalized model document. `store` keeps the learning state so a later session can
    resume online learning from this file.
    """

    version: int = MODEL_VERSION
    channels: ChannelSchema = Field(alias="schema")
    normalization: NormalizationParams
    modes: List[ModeDocument]
    switches: List[SwitchDocument]
    initial_modes: List[int]
    config: LearnerConfig
    store: Optional[StoreDocument] = None

    @model_validator(mode="after")
    def _check_graph(self) -> "HybridAutomaton":
        ids = {m.id for m in self.modes}

        if not self.initial_modes:
            raise ValueError("at least one initial mode is required")

        unknown = set(self.initial_modes) - ids
        for switch in self.switches:
            if switch.dst not in ids:
                unknown.add(switch.dst)
            if switch.src is not None and switch.src not in ids:
                unknown.add(switch.src)

        if unknown:
            raise ValueError(f"switches reference unknown modes: {sorted(unknown)}")

        return self

    def mode(self, mode_id: int) -> ModeDocument:
        return next(m for m in self.modes if m.id == mode_id)

    def outgoing(self, mode_id: int) -> List[SwitchDocument]:
        return [s for s in self.switches if s.src == mode_id]
