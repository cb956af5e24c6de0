#!/usr/bin/env python3

"""
Tool to generate ground-truth traces.
"""

from enum import Enum
from pathlib import Path
from typing import Optional

import typer
from pydantic import ValidationError as PydanticValidationError
from typing_extensions import Annotated

from ..config import Config
from ..datagen import default_plant_spec, gen_polyplant, gen_thermostat, load_plant_spec
from ..exceptions import InvalidSpec, UnableToWriteFile, handle_exceptions
from ..models import PlantSpec
from ..traces import write_trace
from ..utils import create_table, highlight, print_info
from ._common import common_args

_COMMAND_NAME = "gen"

_COLUMNS_HEADERS = [
    {"header": "File"},
    {"header": "Samples", "justify": "right"},
    {"header": "Channels", "style": "magenta"},
]

app = typer.Typer()
config = Config().gen


class _System(str, Enum):
    """
    Available ground-truth systems.
    """

    THERMOSTAT = "thermostat"
    POLYPLANT = "polyplant"


@app.command(name=_COMMAND_NAME)
@handle_exceptions()
@common_args
def gen(
    ctx: typer.Context,
    system: Annotated[_System, typer.Argument(help="System to simulate.")],
    out: Annotated[Path, typer.Option(help="Directory the traces are written to.")],
    n: Annotated[
        Optional[int],
        typer.Option("--n", help=f"Number of traces. [default: {config.traces}]", min=1),
    ] = None,
    seed: Annotated[
        Optional[int], typer.Option(help=f"Random seed. [default: {config.seed}]")
    ] = None,
    period: Annotated[
        Optional[float],
        typer.Option(help=f"Sampling period, in seconds. [default: {config.period}]", min=0),
    ] = None,
    duration: Annotated[
        Optional[float],
        typer.Option(help=f"Trace duration, in seconds. [default: {config.duration}]", min=0),
    ] = None,
    jitter: Annotated[
        Optional[float],
        typer.Option(
            help=f"Spread of the thermostat start around 20, in degrees. [default: {config.jitter}]",
            min=0,
        ),
    ] = None,
    spec: Annotated[
        Optional[Path],
        typer.Option(help="Plant specification (JSON or TOML) for `polyplant`."),
    ] = None,
) -> None:
    """
    Generate traces named `trace_000.csv`, `trace_001.csv`... Identical arguments give
    byte-identical files.
    """
    settings = {"traces": n, "seed": seed, "period": period, "duration": duration}
    flags = {k: v for k, v in settings.items() if v is not None}

    if system is _System.THERMOSTAT:
        resolved = {**dict(config), **flags}
        if jitter is not None:
            resolved["jitter"] = jitter
        traces = gen_thermostat(
            resolved["traces"],
            resolved["seed"],
            resolved["period"],
            resolved["duration"],
            resolved["jitter"],
        )
    else:
        plant = load_plant_spec(spec) if spec is not None else default_plant_spec()
        defaults = {} if spec is not None else {k: v for k, v in config if k != "jitter"}
        try:
            plant = PlantSpec.model_validate({**plant.model_dump(), **defaults, **flags})
        except PydanticValidationError as e:
            raise InvalidSpec(f"Invalid plant settings: {e}") from e
        traces = gen_polyplant(plant)

    written = []
    for trace in traces:
        path = out / f"{trace.name}.csv"
        try:
            write_trace(path, trace)
        except OSError as e:
            raise UnableToWriteFile(f"Unable to write {path}: {e}") from e
        written.append(path)
        typer.echo(str(path))

    print_info(
        ctx.obj.console_stderr,
        f"Wrote {len(written)} {system.value} traces to {highlight(str(out))}",
    )

    if ctx.params.get("table"):
        table = create_table(columns=_COLUMNS_HEADERS)
        for path, trace in zip(written, traces):
            table.add_row(path.name, str(trace.p), ", ".join(trace.schema.header[1:]))
        ctx.obj.console_stderr.print(table, new_line_start=True)
