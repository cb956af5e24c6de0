#!/usr/bin/env python3

"""
Tool to score a model on held-out traces.
"""

from pathlib import Path

import typer
from typing_extensions import Annotated

from ..automaton import normalize_for, trace_costs
from ..exceptions import EmptyTestSet, handle_exceptions
from ..traces import load_trace
from ..utils import create_table
from ._common import common_args, list_traces, read_model

_COMMAND_NAME = "eval"

_COLUMNS_HEADERS = [
    {"header": "Trace"},
    {"header": "RMSE", "justify": "right", "style": "bold magenta"},
]

app = typer.Typer()


@app.command(name=_COMMAND_NAME)
@handle_exceptions()
@common_args
def evaluate(
    ctx: typer.Context,
    model: Annotated[Path, typer.Option(help="Model file written by `learn`.")],
    traces: Annotated[Path, typer.Option(help="Directory of held-out CSV traces.")],
    per_trace: Annotated[
        bool, typer.Option(help="Also print the RMSE of every trace.")
    ] = False,
) -> None:
    """
    Print the prediction cost of a model: the mean over the test traces of the RMSE
    between predicted and actual outputs, in normalized units.
    """
    h = read_model(model)
    paths = list_traces(traces)
    if not paths:
        raise EmptyTestSet(f"No CSV traces found in {traces}.")

    tests = [normalize_for(h, load_trace(path, schema=h.channels)) for path in paths]
    costs = trace_costs(h, tests)
    cost = sum(costs) / len(costs)

    if per_trace:
        for path, value in zip(paths, costs):
            typer.echo(f"{path.name} {value:.6f}")
    typer.echo(f"{cost:.6f}")

    if ctx.params.get("table"):
        table = create_table(columns=_COLUMNS_HEADERS, caption=f"Cost: {cost:.6f}")
        for path, value in zip(paths, costs):
            table.add_row(path.name, f"{value:.6f}")
        ctx.obj.console_stderr.print(table, new_line_start=True)
