#!/usr/bin/env python3

"""
Pydantic models of the documents read and written by the CLI.
"""

from .automaton_document import (
    Clause,
    DwellStats,
    HybridAutomaton,
    JumpCondition,
    ModeDocument,
    PolynomialFlow,
    SwitchDocument,
    Term,
)
from .base_document import DocumentModel
from .channel_schema import Channel, ChannelRange, ChannelSchema, NormalizationParams
from .learner_config import LearnerConfig
from .plant_spec import GuardSpec, InputSpec, ModeSpec, PlantSpec
from .store_document import (
    NeighborhoodDocument,
    SegmentDocument,
    StateDocument,
    StoreDocument,
    TransitionDocument,
)

__all__ = [
    "Channel",
    "ChannelRange",
    "ChannelSchema",
    "Clause",
    "DocumentModel",
    "DwellStats",
    "GuardSpec",
    "HybridAutomaton",
    "InputSpec",
    "JumpCondition",
    "LearnerConfig",
    "ModeDocument",
    "ModeSpec",
    "NeighborhoodDocument",
    "NormalizationParams",
    "PlantSpec",
    "PolynomialFlow",
    "SegmentDocument",
    "StateDocument",
    "StoreDocument",
    "SwitchDocument",
    "Term",
    "TransitionDocument",
]
