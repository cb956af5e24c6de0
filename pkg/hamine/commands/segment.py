#!/usr/bin/env python3

"""
Tool to detect the change points of a trace.
"""

import json
from pathlib import Path
from typing import Optional

import typer
from typing_extensions import Annotated

from ..config import MIN_WINDOW, Config
from ..exceptions import UnableToWriteFile, handle_exceptions
from ..segmentation import detect_change_points, segment as split
from ..traces import load_trace, normalize, write_trace
from ..utils import create_table, highlight, print_info
from ._common import CostModelOption, common_args, emit

_COMMAND_NAME = "segment"

_COLUMNS_HEADERS = [
    {"header": "Index", "justify": "right"},
    {"header": "Time", "justify": "right"},
    {"header": "Discrepancy", "justify": "right", "style": "bold magenta"},
]

app = typer.Typer()
config = Config().segment


@app.command(name=_COMMAND_NAME)
@handle_exceptions()
@common_args
def segment(
    ctx: typer.Context,
    trace: Annotated[Path, typer.Argument(help="CSV trace with role-prefixed headers.")],
    window: Annotated[
        int, typer.Option(help="Detection window, in samples.", min=MIN_WINDOW)
    ] = config.window,
    cost: Annotated[
        CostModelOption,
        typer.Option(help="Segment model: l2 for level shifts, linear for slope changes."),
    ] = CostModelOption(config.cost),
    min_size: Annotated[
        Optional[int],
        typer.Option(help="Minimum segment length. [default: window]", min=1),
    ] = config.min_size,
    penalty: Annotated[
        Optional[float],
        typer.Option(
            help="Minimum discrepancy of a change point. [default: from the median discrepancy and the noise level]",
            min=0,
        ),
    ] = config.penalty,
    out: Annotated[
        Optional[Path], typer.Option(help="Write the change points to a file.")
    ] = None,
    segments_dir: Annotated[
        Optional[Path],
        typer.Option(help="Write every segment as a CSV file in this directory."),
    ] = None,
) -> None:
    """
    Detect the change points of a trace and print them as a JSON array of
    `{index, time, discrepancy}` (0-based index of the first sample of each new segment).
    """
    raw = load_trace(trace)
    normalized, _ = normalize(raw)
    cps = detect_change_points(normalized, window, min_size, penalty, cost.value)

    points = [
        {"index": i, "time": float(raw.times[i]), "discrepancy": score}
        for i, score in zip(cps.indices, cps.scores)
    ]
    emit(json.dumps(points, indent=2) + "\n", out)

    if segments_dir is not None:
        for k, seg in enumerate(split(raw, cps)):
            part = raw.replace(
                times=raw.times[seg.start : seg.end + 1],
                values=raw.values[seg.start : seg.end + 1],
            )
            try:
                write_trace(segments_dir / f"segment_{k:03d}.csv", part)
            except OSError as e:
                raise UnableToWriteFile(f"Unable to write to {segments_dir}: {e}") from e

        print_info(
            ctx.obj.console_stderr,
            f"Wrote {len(cps) + 1} segments to {highlight(str(segments_dir))}",
        )

    if ctx.params.get("table"):
        table = create_table(
            columns=_COLUMNS_HEADERS,
            caption=f"Change points of {trace.name} (penalty {cps.penalty:.4g})",
        )
        for point in points:
            table.add_row(
                str(point["index"]), f"{point['time']:.4g}", f"{point['discrepancy']:.4g}"
            )
        ctx.obj.console_stderr.print(table, new_line_start=True)
