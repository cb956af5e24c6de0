#!/usr/bin/env python3

"""
Command-line hybrid automaton miner for input/output traces.
"""

__title__ = "hamine"
__description__ = "Learn hybrid automata online from input/output traces of black-box systems."
__epilog__ = "Run [bold]hamine COMMAND --help[/bold] for the options of each command."
__version__ = "v0.1.0"
__author__ = "Javi C. Guerrero"
__author_email__ = "jcorreag@pm.me"
__license__ = "MIT"

MODEL_VERSION = 1
"""Version of the model JSON document written by `learn`."""
