#!/usr/bin/env python3

"""
CLI subcommands.
"""

import typer

from .dtw import app as dtw_app
from .eval import app as eval_app
from .export import app as export_app
from .freq import app as freq_app
from .gen import app as gen_app
from .learn import app as learn_app
from .segment import app as segment_app
from .simulate import app as simulate_app

app = typer.Typer()

app.add_typer(segment_app)
app.add_typer(learn_app)
app.add_typer(eval_app)
app.add_typer(simulate_app)
app.add_typer(export_app)
app.add_typer(gen_app)
app.add_typer(freq_app)
app.add_typer(dtw_app)
