#!/usr/bin/env python3

"""
Custom exception classes used across the project.

Every error carries the exit code the CLI terminates with: validation problems exit
with 1 and I/O problems with 2.
"""

from functools import wraps
from typing import Any, Callable, Optional

import typer
from rich.console import Console
from typer import Exit

from .typing import GenericFunction
from .utils import print_error

__all__ = [
    "HandledException",
    "ValidationError",
    "InputOutputError",
    "MissingColumn",
    "NonUniformSampling",
    "NonMonotonicTime",
    "EmptyTrace",
    "SchemaMismatch",
    "NonBinaryChannel",
    "TraceTooShort",
    "DimensionMismatch",
    "EmptySequence",
    "EmptyState",
    "LengthMismatch",
    "Underdetermined",
    "DegenerateDesign",
    "IndistinguishableTransitions",
    "EmptyTestSet",
    "SchemaVersionMismatch",
    "MalformedDocument",
    "InvalidSpec",
    "TraceNotFound",
    "UnableToReadFile",
    "UnableToWriteFile",
    "handle_exceptions",
    "ERR_VALIDATION",
    "ERR_IO",
    "ERR_UNEXPECTED",
    "ERR_KEYBOARD_INTERRUPT",
]

ERR_VALIDATION = 1
ERR_IO = 2
ERR_UNEXPECTED = -1
ERR_KEYBOARD_INTERRUPT = 130


class HandledException(Exception):
    """
    Base class for all application-specific exceptions.

    Provides a standard message and exit code for controlled termination
    of the CLI program when an expected error occurs.
    """

    exit_code = 99
    default_msg = "An error occurred"

    def __init__(self, msg: Optional[str] = None) -> None:
        self.msg = msg or getattr(self, "default_msg", type(self).default_msg)
        super().__init__(self.msg)

        if not hasattr(self, "exit_code"):
            self.exit_code = type(self).exit_code

    def __repr__(self) -> str:
        """
        String representation of the exception.
        """
        return f"[{self.__class__.__name__}] {self.msg}"

    def exit(self) -> None:
        """
        Gracefully terminate the program using the exception's `exit_code`.
        """
        raise Exit(code=self.exit_code)


class ValidationError(HandledException):
    """Base class for invalid data, parameters or documents."""

    exit_code = ERR_VALIDATION
    default_msg = "Validation failed."


class InputOutputError(HandledException):
    """Base class for file system errors."""

    exit_code = ERR_IO
    default_msg = "An I/O error occurred."


# Traces


class MissingColumn(ValidationError):
    """Raised when a CSV header lacks a column of the schema."""

    default_msg = "A column required by the channel schema is missing."


class NonUniformSampling(ValidationError):
    """Raised when a timestamp gap violates the sampling tolerance."""

    default_msg = "The trace is not uniformly sampled."

    def __init__(self, msg: Optional[str] = None, row: Optional[int] = None) -> None:
        self.row = row
        super().__init__(msg)


class NonMonotonicTime(ValidationError):
    """Raised when timestamps are not strictly increasing."""

    default_msg = "Timestamps are not strictly increasing."


class EmptyTrace(ValidationError):
    """Raised when a trace has fewer than two samples."""

    default_msg = "The trace needs at least two samples."


class SchemaMismatch(ValidationError):
    """Raised when a trace does not match the expected channel schema."""

    default_msg = "The trace channels do not match the expected schema."


class NonBinaryChannel(ValidationError):
    """Raised when a frequency conversion is requested on a non 0/1 channel."""

    default_msg = "Only channels with values in {0, 1} can be converted to frequency."


# Segmentation and similarity


class TraceTooShort(ValidationError):
    """Raised when a trace is shorter than two detection windows."""

    default_msg = "The trace is too short for the detection window."


class DimensionMismatch(ValidationError):
    """Raised when two sequences or vectors have incompatible channel counts."""

    default_msg = "Dimension mismatch."


class EmptySequence(ValidationError):
    """Raised when DTW receives an empty sequence."""

    default_msg = "Cannot align an empty sequence."


class EmptyState(ValidationError):
    """Raised when a state holds no stored segment to compare against."""

    default_msg = "The state has no stored segments."


class LengthMismatch(ValidationError):
    """Raised when a neighborhood length differs from the transition's ones."""

    default_msg = "Neighborhood length differs from the stored transition segments."


# Flows and jumps


class Underdetermined(ValidationError):
    """Raised when a flow fit has fewer samples than monomials."""

    default_msg = "Not enough samples to fit the polynomial flow."


class DegenerateDesign(ValidationError):
    """Raised when the regression design matrix is rank deficient."""

    default_msg = "The regression design matrix is rank deficient."


class IndistinguishableTransitions(ValidationError):
    """Reported (not raised) when outgoing jump labels cannot be told apart."""

    default_msg = "Outgoing transitions of a state cannot be distinguished."


# Model documents


class EmptyTestSet(ValidationError):
    """Raised when the cost is requested over no test trace."""

    default_msg = "The test set is empty."


class SchemaVersionMismatch(ValidationError):
    """Raised when a model document was written by another format version."""

    default_msg = "Unsupported model document version."


class MalformedDocument(ValidationError):
    """Raised when a model document cannot be parsed or validated."""

    default_msg = "The model document is malformed."


class InvalidSpec(ValidationError):
    """Raised when a plant specification is inconsistent."""

    default_msg = "The plant specification is invalid."


# I/O


class TraceNotFound(InputOutputError):
    """Raised when an input file or directory does not exist."""

    default_msg = "The requested file could not be found."


class UnableToReadFile(InputOutputError):
    """Raised when an input file exists but cannot be read."""

    default_msg = "Unable to read the file."


class UnableToWriteFile(InputOutputError):
    """Raised when an output file cannot be written."""

    default_msg = "Unable to write the file."


def handle_exceptions(
    console: Optional[Console] = None,
) -> Callable[[GenericFunction], GenericFunction]:
    """
    Decorator to handle the common exceptions. It will obtain console from `typer.Context` if not passed.
    """

    def decorator(func: GenericFunction) -> GenericFunction:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> None:
            # Make a console copy since it cannot be re-assigned inside wrapper
            _console = console
            if _console is None:
                ctx = kwargs.get("ctx")
                _console = ctx.obj.console_stderr  # type: ignore

            try:
                func(*args, **kwargs)

            except HandledException as e:
                print_error(_console, e.msg)
                e.exit()

            except KeyboardInterrupt:
                print_error(_console, "Operation cancelled by user.")
                raise typer.Exit(ERR_KEYBOARD_INTERRUPT)

            except typer.Exit:
                raise

            except Exception as e:
                print_error(_console, f"Unexpected error: {e}")
                raise typer.Exit(code=ERR_UNEXPECTED)

        return wrapper  # type: ignore

    return decorator
