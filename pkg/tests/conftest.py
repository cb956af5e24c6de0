"""
Shared fixtures: an isolated config file and small synthetic traces.
"""

import os
import tempfile
from pathlib import Path
from typing import Dict, Sequence

import numpy as np
import pytest

# Command modules read the config file when imported, before any fixture runs
os.environ["HAMINE_CONFIG_FILE"] = str(Path(tempfile.mkdtemp()) / "config.toml")

from hamine.config import Config  # noqa: E402
from hamine.models import ChannelSchema  # noqa: E402
from hamine.traces import IOTrace, detect_clocks  # noqa: E402


@pytest.fixture(autouse=True)
def config_file(tmp_path, monkeypatch):
    path = tmp_path / "config.toml"
    monkeypatch.setenv("HAMINE_CONFIG_FILE", str(path))
    Config.reset()
    yield path
    Config.reset()


@pytest.fixture
def make_trace():
    """
    Build a trace from role-prefixed columns, e.g. `{"i:u": [...], "o:y": [...]}`.
    """

    def _make(
        columns: Dict[str, Sequence[float]], period: float = 0.1, name: str = "trace"
    ) -> IOTrace:
        schema = ChannelSchema.from_header(["t", *columns])
        values = np.column_stack([np.asarray(c, dtype=np.float64) for c in columns.values()])
        times = np.arange(len(values)) * period
        return IOTrace(times, values, detect_clocks(times, values, schema), period, name=name)

    return _make


@pytest.fixture
def write_csv(tmp_path):
    def _write(text: str, name: str = "trace.csv") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write


@pytest.fixture
def step_trace(make_trace):
    """One input that steps 0 -> 1 -> 0 and an output that follows it."""
    u = np.r_[np.zeros(50), np.ones(50), np.zeros(50)]
    return make_trace({"i:u": u, "o:y": 1 + 2 * u}, name="step.csv")
