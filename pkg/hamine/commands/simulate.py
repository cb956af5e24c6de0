#!/usr/bin/env python3

"""
Tool to predict the outputs of a trace with a learned model.
"""

from pathlib import Path
from typing import Optional

import typer
from typing_extensions import Annotated

from ..automaton import mode_sequence, normalize_for, predict
from ..exceptions import handle_exceptions
from ..traces import load_trace, serialize_trace
from ..utils import create_table
from ._common import common_args, emit, read_model

_COMMAND_NAME = "simulate"

_COLUMNS_HEADERS = [
    {"header": "Sample", "justify": "right"},
    {"header": "Time", "justify": "right"},
    {"header": "Mode", "justify": "right", "style": "bold magenta"},
]

app = typer.Typer()


@app.command(name=_COMMAND_NAME)
@handle_exceptions()
@common_args
def simulate(
    ctx: typer.Context,
    model: Annotated[Path, typer.Option(help="Model file written by `learn`.")],
    input: Annotated[
        Path, typer.Option(help="CSV trace with the model inputs; outputs are optional.")
    ],
    out: Annotated[
        Optional[Path],
        typer.Option(help="Write the predicted trace to a file instead of standard output."),
    ] = None,
) -> None:
    """
    Run the model on the inputs of a trace and print the predicted trace as CSV.
    """
    h = read_model(model)
    trace = load_trace(input, schema=h.channels, require_outputs=False)
    predicted = predict(h, trace)
    emit(serialize_trace(predicted), out)

    if ctx.params.get("table"):
        modes, entries = mode_sequence(h, normalize_for(h, predicted))
        table = create_table(columns=_COLUMNS_HEADERS, caption="Mode entries")
        for j in entries:
            table.add_row(str(j), f"{trace.times[j]:.4g}", str(modes[j]))
        ctx.obj.console_stderr.print(table, new_line_start=True)
