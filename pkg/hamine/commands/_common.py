#!/usr/bin/env python3

"""
Common command arguments and options, and the file helpers shared by the subcommands.
"""

from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple, Union

import typer
from merge_args import merge_args
from rich.markup import escape
from rich.table import Table
from typing_extensions import Annotated

from ..automaton import deserialize_json
from ..exceptions import TraceNotFound, UnableToReadFile, UnableToWriteFile
from ..flows import render_flow
from ..jumps import render_label
from ..models import HybridAutomaton
from ..typing import GenericFunction
from ..utils import atomic_write, create_table

_MODES_COLUMNS = [
    {"header": "Mode", "justify": "right", "style": "bold"},
    {"header": "Flow", "style": "magenta"},
    {"header": "Dwell", "justify": "right"},
    {"header": "Visits", "justify": "right"},
]

_SWITCHES_COLUMNS = [
    {"header": "Source", "justify": "right"},
    {"header": "Target", "justify": "right"},
    {"header": "Jump condition", "style": "magenta"},
    {"header": "Confidence"},
]


class CostModelOption(str, Enum):
    """
    Segment model of the change-point detector.
    """

    L2 = "l2"
    LINEAR = "linear"


def common_args(
    func: GenericFunction,
) -> GenericFunction:
    """
    Decorator to add common arguments to multiple commands.
    Source: https://github.com/fastapi/typer/issues/296
    """

    @merge_args(func)
    def wrapper(
        ctx: typer.Context,
        table: Annotated[
            Optional[bool],
            typer.Option("--table", help="Print a summary table on standard error."),
        ] = None,
        **kwargs,
    ) -> None:
        return func(ctx=ctx, **kwargs)

    return wrapper  # type: ignore


def emit(data: Union[str, bytes], out: Optional[Path] = None) -> None:
    """
    Write a result to `out` atomically, or to standard output when `out` is not given.
    """
    if out is None:
        typer.echo(data.decode("utf-8") if isinstance(data, bytes) else data, nl=False)
        return

    try:
        atomic_write(out, data)
    except OSError as e:
        raise UnableToWriteFile(f"Unable to write {out}: {e}") from e


def read_model(path: Path) -> HybridAutomaton:
    try:
        data = path.read_bytes()
    except FileNotFoundError as e:
        raise TraceNotFound(f"Model file not found: {path}") from e
    except OSError as e:
        raise UnableToReadFile(f"Unable to read {path}: {e}") from e

    return deserialize_json(data)


def list_traces(directory: Path) -> List[Path]:
    """
    CSV files of a directory in lexicographic filename order, the order online learning
    consumes them in.
    """
    if not directory.is_dir():
        raise TraceNotFound(f"Trace directory not found: {directory}")

    return sorted(directory.glob("*.csv"), key=lambda p: p.name)


def automaton_tables(h: HybridAutomaton) -> Tuple[Table, Table]:
    """Summary tables of the modes and switches of an automaton."""
    modes = create_table(title="Modes", columns=_MODES_COLUMNS, show_lines=True)
    for mode in h.modes:
        flow = (
            escape(render_flow(mode.flow))
            if mode.flow is not None
            else f"[red]{escape(str(mode.fit_error))}[/red]"
        )
        modes.add_row(str(mode.id), flow, f"{mode.dwell.mean:.4g}", str(mode.visits))

    switches = create_table(
        title="Switches",
        columns=_SWITCHES_COLUMNS,
        caption=f"Initial modes: {', '.join(map(str, h.initial_modes))}",
    )
    for switch in h.switches:
        label = escape(render_label(switch))
        confidence = ", ".join(f"{k}={v:.3f}" for k, v in switch.confidence.items())
        switches.add_row(
            "-" if switch.src is None else str(switch.src),
            str(switch.dst),
            f"[yellow]{label}[/yellow]" if switch.ambiguous else label,
            confidence,
        )

    return modes, switches
