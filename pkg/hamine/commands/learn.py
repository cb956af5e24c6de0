#!/usr/bin/env python3

"""
Tool to learn, or keep refining, a hybrid automaton from a directory of traces.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional

import typer
from pydantic import ValidationError as PydanticValidationError
from typing_extensions import Annotated

from ..automaton import finalize, load_store, serialize_json
from ..config import MAX_DEGREE, MIN_WINDOW, Config, _LearnOptions
from ..exceptions import ValidationError, handle_exceptions
from ..models import LearnerConfig
from ..synthesis import learn_trace
from ..traces import load_trace, select_outputs
from ..utils import highlight, print_info
from ._common import (
    CostModelOption,
    automaton_tables,
    common_args,
    emit,
    list_traces,
    read_model,
)

_COMMAND_NAME = "learn"

_HELP_PANEL_SEGMENTATION = "Segmentation Options"
_HELP_PANEL_CLUSTERING = "Clustering Options"
_HELP_PANEL_MINING = "Flow and Jump Options"

app = typer.Typer()
config = Config().learn
log = logging.getLogger(__name__)


def resolve_learner_config(
    overrides: Dict[str, Any],
    stored: Optional[LearnerConfig] = None,
    options: Optional[_LearnOptions] = None,
) -> LearnerConfig:
    """
    Learner settings by precedence: explicit flags, then the settings stored in a resumed
    model, then the config file and finally the built-in defaults.
    """
    flags = {k: v for k, v in overrides.items() if v is not None}

    if stored is not None:
        for name, value in flags.items():
            if getattr(stored, name) != value:
                log.warning(
                    "Overriding the stored %s=%s with %s; the resumed model was learned "
                    "with different settings.",
                    name, getattr(stored, name), value,
                )
        base = stored.model_dump()
    else:
        base = {k: v for k, v in (options or _LearnOptions()) if v is not None}

    try:
        return LearnerConfig.model_validate({**base, **flags})
    except PydanticValidationError as e:
        raise ValidationError(f"Invalid learner settings: {e}") from e


@app.command(name=_COMMAND_NAME)
@handle_exceptions()
@common_args
def learn(
    ctx: typer.Context,
    traces: Annotated[
        Path,
        typer.Option(help="Directory of CSV traces, processed in filename order."),
    ],
    resume: Annotated[
        Optional[Path],
        typer.Option(help="Model file to keep learning from (online refinement)."),
    ] = None,
    out: Annotated[
        Optional[Path],
        typer.Option(help="Write the model to a file instead of standard output."),
    ] = None,
    output: Annotated[
        Optional[str],
        typer.Option(help="Learn only this output channel."),
    ] = None,
    window: Annotated[
        Optional[int],
        typer.Option(
            help=f"Detection window, in samples. [default: {config.window}]",
            min=MIN_WINDOW,
            rich_help_panel=_HELP_PANEL_SEGMENTATION,
        ),
    ] = None,
    cost: Annotated[
        Optional[CostModelOption],
        typer.Option(
            help=f"Segment model: l2 for level shifts, linear for slope changes. [default: {config.cost}]",
            rich_help_panel=_HELP_PANEL_SEGMENTATION,
        ),
    ] = None,
    min_size: Annotated[
        Optional[int],
        typer.Option(
            help="Minimum segment length. [default: window]",
            min=1,
            rich_help_panel=_HELP_PANEL_SEGMENTATION,
        ),
    ] = None,
    penalty: Annotated[
        Optional[float],
        typer.Option(
            help="Minimum discrepancy of a change point. [default: from the median discrepancy and the noise level]",
            min=0,
            rich_help_panel=_HELP_PANEL_SEGMENTATION,
        ),
    ] = None,
    neighborhood: Annotated[
        Optional[int],
        typer.Option(
            help="Half-width of the change-point neighborhoods. [default: window/2]",
            min=1,
            rich_help_panel=_HELP_PANEL_SEGMENTATION,
        ),
    ] = None,
    dist_threshold: Annotated[
        Optional[float],
        typer.Option(
            help=f"DTW distance below which a segment joins a state. [default: {config.dist_threshold}]",
            rich_help_panel=_HELP_PANEL_CLUSTERING,
        ),
    ] = None,
    diag_threshold: Annotated[
        Optional[float],
        typer.Option(
            help=f"Diagonality above which a segment joins a state. [default: {config.diag_threshold}]",
            rich_help_panel=_HELP_PANEL_CLUSTERING,
        ),
    ] = None,
    max_segments: Annotated[
        Optional[int],
        typer.Option(
            help=f"Segments kept per state. [default: {config.max_segments}]",
            min=1,
            rich_help_panel=_HELP_PANEL_CLUSTERING,
        ),
    ] = None,
    degree: Annotated[
        Optional[int],
        typer.Option(
            help=f"Degree of the flow polynomials. [default: {config.degree}]",
            min=1,
            max=MAX_DEGREE,
            rich_help_panel=_HELP_PANEL_MINING,
        ),
    ] = None,
    ridge: Annotated[
        Optional[float],
        typer.Option(
            help=f"Ridge penalty of the flow fit. [default: {config.ridge}]",
            min=0,
            rich_help_panel=_HELP_PANEL_MINING,
        ),
    ] = None,
    confidence_decay: Annotated[
        Optional[float],
        typer.Option(
            help=f"Decay of the input confidence levels. [default: {config.confidence_decay}]",
            rich_help_panel=_HELP_PANEL_MINING,
        ),
    ] = None,
    time_variance: Annotated[
        Optional[float],
        typer.Option(
            help=f"Dwell-time variance below which a time condition is mined. [default: {config.time_variance}]",
            rich_help_panel=_HELP_PANEL_MINING,
        ),
    ] = None,
    epsilon: Annotated[
        Optional[float],
        typer.Option(
            help=f"Tolerance of the jump clauses. [default: {config.epsilon}]",
            rich_help_panel=_HELP_PANEL_MINING,
        ),
    ] = None,
) -> None:
    """
    Learn a hybrid automaton from a directory of traces and print the model JSON.
    With `--resume` the traces refine an existing model.
    """
    paths = list_traces(traces)
    if not paths:
        raise ValidationError(f"No CSV traces found in {traces}.")

    overrides = {
        "window": window,
        "cost": cost.value if cost is not None else None,
        "min_size": min_size,
        "penalty": penalty,
        "neighborhood": neighborhood,
        "dist_threshold": dist_threshold,
        "diag_threshold": diag_threshold,
        "max_segments": max_segments,
        "degree": degree,
        "ridge": ridge,
        "confidence_decay": confidence_decay,
        "time_variance": time_variance,
        "epsilon": epsilon,
    }

    store = None
    outputs = [output] if output else None
    if resume is not None:
        model = read_model(resume)
        learner = resolve_learner_config(overrides, stored=model.config)
        store = load_store(model)
        store.config = learner
        outputs = outputs or store.schema.output_names
    else:
        learner = resolve_learner_config(overrides, options=config)

    for path in paths:
        trace = load_trace(path)
        if outputs is not None:
            trace = select_outputs(trace, outputs)
        store = learn_trace(store, trace, learner)

    automaton = finalize(store)
    emit(serialize_json(automaton), out)

    print_info(
        ctx.obj.console_stderr,
        f"Learned {len(automaton.modes)} modes and {len(automaton.switches)} switches "
        f"from {len(paths)} traces"
        + (f", model written to {highlight(str(out))}" if out else ""),
    )

    if ctx.params.get("table"):
        for table in automaton_tables(automaton):
            ctx.obj.console_stderr.print(table, new_line_start=True)
