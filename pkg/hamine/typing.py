#!/usr/bin/env python3

"""
Type aliases used across the project.
"""

from typing import Any, Callable, Dict, List, Literal, Optional, Tuple, TypeVar

import numpy as np
import numpy.typing as npt

__all__ = [
    "FloatArray",
    "Exponents",
    "SwitchKey",
    "SerializedOptions",
    "SerializedConfig",
    "CostModel",
    "PanelType",
    "ColumnHeaders",
    "GenericFunction",
]

_BaseDict = Dict[str, Any]
"""Generic dictionary with string keys and values of any type."""

FloatArray = npt.NDArray[np.float64]
"""Numpy array of 64-bit floats. Traces are stored as (samples,) or (samples, channels)."""

Exponents = Tuple[int, ...]
"""Exponent of each input variable in a monomial."""

SwitchKey = Tuple[Optional[int], int]
"""`(source, target)` of a control switch. A `None` source marks an initial switch."""

SerializedOptions = _BaseDict
"""Serialized options in the configuration file. Each section will define the options of an subcommand."""

SerializedConfig = Dict[str, SerializedOptions]
"""Type alias representing the entire configuration file with all the options in serialized format."""

PanelType = Literal["info", "warning", "error"]
"""String literals representing valid panel types for rich panels."""

ColumnHeaders = List[_BaseDict]
"""List of dictionaries defining the parameters for each column in a Rich Table."""

GenericFunction = TypeVar("GenericFunction", bound=Callable[..., Any])
"""Callable object that get any number of args and return any type."""

CostModel = Literal["l2", "linear"]
"""Segment cost used by change-point detection: mean shift (`l2`) or residual of a linear trend."""
