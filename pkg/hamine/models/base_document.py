#!/usr/bin/env python3

"""
Module that exposes the base model used to build the rest of the document models.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict


class DocumentModel(BaseModel):
    """
    Base model for every persisted document. Unknown keys are rejected so a malformed
    model file fails loudly instead of being silently truncated.
    """

    model_config = ConfigDict(extra="forbid", validate_by_name=True)
