#!/usr/bin/env python3

"""
Tool to export a learned model as Graphviz DOT, JSON or summary tables.
"""

from enum import Enum
from pathlib import Path
from typing import Optional

import typer
from typing_extensions import Annotated

from ..automaton import serialize_json, to_dot
from ..exceptions import handle_exceptions
from ._common import automaton_tables, emit, read_model

_COMMAND_NAME = "export"

app = typer.Typer()


class _ExportFormat(str, Enum):
    """
    Supported export formats.
    """

    DOT = "dot"
    JSON = "json"
    TABLE = "table"


@app.command(name=_COMMAND_NAME)
@handle_exceptions()
def export(
    ctx: typer.Context,
    model: Annotated[Path, typer.Option(help="Model file written by `learn`.")],
    format: Annotated[
        _ExportFormat, typer.Option("--format", help="Output format.")
    ] = _ExportFormat.DOT,
    out: Annotated[
        Optional[Path],
        typer.Option(help="Write to a file instead of standard output."),
    ] = None,
) -> None:
    """
    Export a model. `json` rewrites the canonical model document.
    """
    h = read_model(model)

    if format is _ExportFormat.TABLE:
        for table in automaton_tables(h):
            ctx.obj.console.print(table, new_line_start=True)
        return

    emit(to_dot(h) if format is _ExportFormat.DOT else serialize_json(h), out)
