import io
import logging

import pytest
import tomllib
import typer
from rich.console import Console

from hamine.commands.learn import resolve_learner_config
from hamine.config import DEFAULT_WINDOW, Config, _LearnOptions, init_config_file
from hamine.exceptions import ValidationError
from hamine.models import LearnerConfig


def _console():
    return Console(file=io.StringIO(), width=200)


def test_defaults_without_file():
    config = Config()
    assert config.learn.window == DEFAULT_WINDOW
    assert config.learn.penalty is None
    assert config.gen.traces == 10


def test_values_from_file(config_file):
    config_file.write_text("[learn]\nwindow = 30\npenalty = 0.5\n\n[freq]\nstride = 4\n")
    config = Config()

    assert config.learn.window == 30
    assert config.learn.penalty == 0.5
    assert config.freq.stride == 4
    assert config.segment.window == DEFAULT_WINDOW


def test_invalid_entries_are_ignored(config_file):
    config_file.write_text("[bogus]\nx = 1\n\n[learn]\nwindow = 30\ncolour = 'red'\n")
    console = _console()
    config = Config(console=console)
    output = console.file.getvalue()

    assert "Ignoring invalid config section 'bogus'" in output
    assert "Ignoring invalid config option 'colour' in 'learn'" in output
    assert config.learn.window == 30


def test_unparsable_file(config_file):
    config_file.write_text("[learn\n")
    console = _console()
    config = Config(console=console)

    assert "Error parsing config file" in console.file.getvalue()
    assert config.learn.window == DEFAULT_WINDOW


def test_config_is_a_singleton():
    assert Config() is Config()


def test_init_config_file(config_file):
    with pytest.raises(typer.Exit):
        init_config_file(True, _console())

    data = tomllib.loads(config_file.read_text())
    assert set(data) == {"learn", "segment", "gen", "freq"}
    assert data["learn"]["window"] == DEFAULT_WINDOW
    assert "penalty" not in data["learn"]
    assert data["learn"]["cost"] == data["segment"]["cost"] == "l2"
    assert data["gen"]["jitter"] == 0.0


def test_init_config_file_without_flag(config_file):
    init_config_file(None, _console())
    assert not config_file.exists()


def test_learner_config_derived_defaults():
    config = LearnerConfig(window=12)
    assert config.min_size == 12
    assert config.v == 6


def test_flags_override_config_file():
    options = _LearnOptions(window=30, epsilon=0.2)
    config = resolve_learner_config({"window": 16, "degree": None}, options=options)

    assert config.window == 16
    assert config.epsilon == 0.2
    assert config.degree == 2


def test_stored_settings_win_over_config_file(caplog, monkeypatch):
    # the CLI stops propagation once it has configured logging
    monkeypatch.setattr(logging.getLogger("hamine"), "propagate", True)
    stored = LearnerConfig(window=12, epsilon=0.3)
    with caplog.at_level(logging.WARNING, logger="hamine"):
        config = resolve_learner_config(
            {"window": None, "epsilon": 0.1}, stored=stored, options=_LearnOptions(window=40)
        )

    assert config.window == 12
    assert config.epsilon == 0.1
    assert "Overriding the stored epsilon" in caplog.text


def test_invalid_learner_settings():
    with pytest.raises(ValidationError):
        resolve_learner_config({"diag_threshold": 2.0}, options=_LearnOptions())
