#!/usr/bin/env python3

"""
Debug tool to align two trace segments with DTW.
"""

import json
from pathlib import Path

import typer
from typing_extensions import Annotated

from ..dtw import diagonality, dtw_align
from ..exceptions import handle_exceptions
from ..traces import load_trace
from ..utils import create_table
from ._common import common_args

_COMMAND_NAME = "dtw"

_COLUMNS_HEADERS = [
    {"header": "Distance", "justify": "right", "style": "bold magenta"},
    {"header": "Diagonality", "justify": "right", "style": "bold magenta"},
    {"header": "Path length", "justify": "right"},
]

app = typer.Typer()


@app.command(name=_COMMAND_NAME)
@handle_exceptions()
@common_args
def dtw(
    ctx: typer.Context,
    first: Annotated[Path, typer.Argument(help="First CSV segment.")],
    second: Annotated[Path, typer.Argument(help="Second CSV segment.")],
) -> None:
    """
    Print the DTW distance and the diagonality of the warping path between the non-clock
    channels of two segments, as JSON.
    """
    x = load_trace(first)
    y = load_trace(second)
    distance, path = dtw_align(x.features, y.features)
    diag = diagonality(path)

    typer.echo(json.dumps({"distance": distance, "diagonality": diag}, indent=2))

    if ctx.params.get("table"):
        table = create_table(columns=_COLUMNS_HEADERS, caption=f"{first.name} vs {second.name}")
        table.add_row(f"{distance:.6g}", f"{diag:.6g}", str(len(path)))
        ctx.obj.console_stderr.print(table, new_line_start=True)
