#!/usr/bin/env python3

"""
Tool to convert square-wave channels to frequency and back.
"""

from pathlib import Path
from typing import List, Optional

import typer
from typing_extensions import Annotated

from ..config import MIN_WINDOW, Config
from ..exceptions import ValidationError, handle_exceptions
from ..traces import from_frequency, load_trace, serialize_trace, to_frequency
from ._common import emit

_COMMAND_NAME = "freq"

app = typer.Typer()
config = Config().freq


@app.command(name=_COMMAND_NAME)
@handle_exceptions()
def freq(
    ctx: typer.Context,
    trace: Annotated[Path, typer.Argument(help="CSV trace with role-prefixed headers.")],
    window: Annotated[
        int, typer.Option(help="Counting window, in samples.", min=MIN_WINDOW)
    ] = config.window,
    stride: Annotated[
        int, typer.Option(help="Samples between two output points.", min=1)
    ] = config.stride,
    channel: Annotated[
        Optional[List[str]],
        typer.Option(help="Channel to convert, repeatable. [default: every non-clock input]"),
    ] = None,
    inverse: Annotated[
        bool,
        typer.Option(help="Rebuild square waves from frequency channels instead."),
    ] = False,
    period: Annotated[
        Optional[float],
        typer.Option(help="Sampling period of the rebuilt trace, with `--inverse`.", min=0),
    ] = None,
    out: Annotated[
        Optional[Path],
        typer.Option(help="Write the converted trace to a file instead of standard output."),
    ] = None,
) -> None:
    """
    Replace 0/1 channels by their rising-edge rate (Hz) over a sliding window, or with
    `--inverse` turn frequency channels back into square waves.
    """
    if inverse and period is None:
        raise ValidationError("`--inverse` needs the `--period` of the rebuilt trace.")

    source = load_trace(trace)
    if inverse:
        converted = from_frequency(source, period, channel)  # type: ignore[arg-type]
    else:
        converted = to_frequency(source, window, channel, stride)

    emit(serialize_trace(converted), out)
