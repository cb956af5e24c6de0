#!/usr/bin/env python3

"""
Main entry point for the CLI application.
"""

from __future__ import annotations

import importlib
import sys
from dataclasses import dataclass
from types import ModuleType
from typing import Any, Optional, Sequence

import typer
from rich.console import Console
from typing_extensions import Annotated

from . import __epilog__, __title__, __version__
from .commands import app as commands_app
from .config import init_config_file
from .exceptions import ERR_KEYBOARD_INTERRUPT, ERR_VALIDATION
from .utils import setup_logging

app = typer.Typer(rich_markup_mode="rich", no_args_is_help=True, epilog=__epilog__)
console = Console()
console_stderr = Console(stderr=True)


@dataclass
class _AppContext:
    """
    Dataclass object that contains all the instances needed for the subcommands.
    """

    console: Console
    console_stderr: Console


def _version_callback(value: Optional[bool], ctx: typer.Context) -> None:
    """
    Callback function to show the program's version and exit.
    """
    if value:
        console.print(f"{ctx.info_name} {__version__}", highlight=False)
        raise typer.Exit()


@app.callback()
def main(
    ctx: typer.Context,
    verbose: Annotated[
        int,
        typer.Option(
            "--verbose",
            "-v",
            count=True,
            help="Log progress on standard error, -vv for debug messages.",
        ),
    ] = 0,
    init_config_file: Annotated[
        Optional[bool],
        typer.Option(
            "--init-config-file",
            help="Generate configuration file with default values and exit.",
            callback=lambda value: init_config_file(value, console),
            is_eager=True,
        ),
    ] = None,
    version: Annotated[
        Optional[bool],
        typer.Option(
            "--version",
            help="Show program version and exit.",
            callback=_version_callback,
            is_eager=True,
        ),
    ] = None,
) -> None:
    """
    Learn hybrid automata from input/output traces, simulate and score them.
    """
    setup_logging(verbose, console_stderr)

    # Pass the consoles to subcommands using context object
    ctx.obj = _AppContext(console=console, console_stderr=console_stderr)


app.add_typer(commands_app)


def _click_exceptions(command: Any) -> ModuleType:
    """
    Exceptions module of the click package behind `command`, which typer may vendor.
    """
    base = next(c for c in type(command).__mro__ if c.__name__ == "Command")
    return importlib.import_module(f"{base.__module__.rsplit('.', 1)[0]}.exceptions")


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the CLI with `argv` and return its exit code: 0 on success, 1 on validation and
    usage errors, 2 on I/O errors.
    """
    command = typer.main.get_command(app)
    errors = _click_exceptions(command)
    try:
        code = command.main(
            args=list(argv) if argv is not None else None,
            prog_name=__title__,
            standalone_mode=False,
        )

    except errors.UsageError as e:
        e.show()
        return ERR_VALIDATION

    except errors.ClickException as e:
        e.show()
        return e.exit_code

    except errors.Abort:
        return ERR_KEYBOARD_INTERRUPT

    return code if isinstance(code, int) else 0


def cli() -> None:
    sys.exit(run())


if __name__ == "__main__":
    cli()
