#!/usr/bin/env python3

"""
Loads the configuration file and defines the default values of the learner and of every
command option.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Tuple, Type, get_type_hints

import tomli_w
import tomllib
from platformdirs import user_config_dir
from rich.console import Console
from typer import Exit

from . import __title__
from .typing import SerializedConfig, SerializedOptions
from .utils import highlight, print_info, print_warning

_CONFIG_FILE_ENV = "HAMINE_CONFIG_FILE"
_DEFAULT_CONFIG_FILE_PATH = Path(user_config_dir()) / __title__ / "config.toml"

# Learner
DEFAULT_DIST_THRESHOLD = 0.1
DEFAULT_DIAG_THRESHOLD = 0.8
DEFAULT_WINDOW = 20
DEFAULT_COST = "l2"
DEFAULT_MAX_SEGMENTS = 8
DEFAULT_DEGREE = 2
DEFAULT_RIDGE = 1e-8
DEFAULT_CONFIDENCE_DECAY = 5.0
DEFAULT_TIME_VARIANCE = 1e-3
DEFAULT_EPSILON = 0.05

# Traces
SAMPLING_TOLERANCE = 1e-6
"""Relative tolerance on `t_i - t_{i-1}` against the sampling period."""

# Generators
_DEFAULT_GEN_TRACES = 10
_DEFAULT_GEN_SEED = 0
_DEFAULT_GEN_PERIOD = 0.01
_DEFAULT_GEN_DURATION = 10.0
_DEFAULT_GEN_JITTER = 0.0

_DEFAULT_FREQ_WINDOW = 100
_DEFAULT_FREQ_STRIDE = 1

MIN_WINDOW = 2
MAX_DEGREE = 6


def config_file_path() -> Path:
    """
    Path of the configuration file, `$HAMINE_CONFIG_FILE` when set.
    """
    custom = os.environ.get(_CONFIG_FILE_ENV)
    return Path(custom).expanduser() if custom else _DEFAULT_CONFIG_FILE_PATH


@dataclass
class _OptionsBase:
    """
    Base of the per-command options read from the config file.
    """

    def __iter__(self) -> Iterator[Tuple[str, Any]]:
        for field in fields(self):
            yield field.name, getattr(self, field.name)


@dataclass
class _LearnOptions(_OptionsBase):
    """
    Options of `hamine learn`. `min_size`, `neighborhood` and `penalty` are derived from
    `window` when unset.
    """

    dist_threshold: float = DEFAULT_DIST_THRESHOLD
    diag_threshold: float = DEFAULT_DIAG_THRESHOLD
    window: int = DEFAULT_WINDOW
    cost: str = DEFAULT_COST
    min_size: Optional[int] = None
    neighborhood: Optional[int] = None
    penalty: Optional[float] = None
    max_segments: int = DEFAULT_MAX_SEGMENTS
    degree: int = DEFAULT_DEGREE
    ridge: float = DEFAULT_RIDGE
    confidence_decay: float = DEFAULT_CONFIDENCE_DECAY
    time_variance: float = DEFAULT_TIME_VARIANCE
    epsilon: float = DEFAULT_EPSILON


@dataclass
class _SegmentOptions(_OptionsBase):
    """
    Options of `hamine segment`.
    """

    window: int = DEFAULT_WINDOW
    cost: str = DEFAULT_COST
    min_size: Optional[int] = None
    penalty: Optional[float] = None


@dataclass
class _GenOptions(_OptionsBase):
    """
    Options of `hamine gen`.
    """

    traces: int = _DEFAULT_GEN_TRACES
    seed: int = _DEFAULT_GEN_SEED
    period: float = _DEFAULT_GEN_PERIOD
    duration: float = _DEFAULT_GEN_DURATION
    jitter: float = _DEFAULT_GEN_JITTER


@dataclass
class _FreqOptions(_OptionsBase):
    """
    Options of `hamine freq`.
    """

    window: int = _DEFAULT_FREQ_WINDOW
    stride: int = _DEFAULT_FREQ_STRIDE


class Config:
    """
    Options of every command, read once from the config file. Each section of the file
    matches a command; missing options keep their defaults.
    """

    _instance = None

    # Sections are discovered from these annotations
    learn: _LearnOptions
    segment: _SegmentOptions
    gen: _GenOptions
    freq: _FreqOptions

    def __new__(cls, *args: Any, **kwargs: Any) -> "Config":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self, console: Optional[Console] = None) -> None:
        if getattr(self, "_initialized", False):
            return

        self._initialized = True

        self._path = config_file_path()
        self._console = console or Console(stderr=True)
        self._data = self._load_config()

        self._valid_sections()
        self._init_options()

    @classmethod
    def reset(cls) -> None:
        """
        Drop the singleton so the next `Config()` re-reads the file.
        """
        cls._instance = None

    def _load_config(self) -> SerializedConfig:
        try:
            with self._path.open("rb") as f:
                return tomllib.load(f)

        except FileNotFoundError:
            return {}

        except tomllib.TOMLDecodeError as e:
            print_warning(self._console, f"Error parsing config file: {e}")
            return {}

    def _valid_sections(self) -> None:
        for section in self._data:
            if section not in self.commands_name_class_map:
                print_warning(
                    self._console, f"Ignoring invalid config section '{section}'."
                )

    def _extract_invalid_key(self, e: TypeError) -> str:
        """
        Key named in a `TypeError` such as "__init__() got an unexpected keyword argument 'foo'".
        """
        try:
            return str(e).split("'")[1]
        except IndexError:
            return "<unknown>"

    @cached_property
    def commands_name_class_map(self) -> Dict[str, Type[_OptionsBase]]:
        hints = get_type_hints(self.__class__)
        return {
            name: typ
            for name, typ in hints.items()
            if isinstance(typ, type) and issubclass(typ, _OptionsBase)
        }

    def _init_single_command_opts(
        self, name: str, cls: Type[_OptionsBase], data: SerializedOptions
    ) -> _OptionsBase:
        """
        Build the options of one command, dropping the keys it does not know with a warning.
        """
        data_copy = data.copy()
        while True:
            try:
                return cls(**data_copy)
            except TypeError as e:
                key = self._extract_invalid_key(e)
                print_warning(
                    self._console,
                    f"Ignoring invalid config option '{key}' in '{name}'.",
                )
                if key not in data_copy:
                    return cls()
                data_copy.pop(key)

    def _init_options(self) -> None:
        for cmd_name, cmd_class in self.commands_name_class_map.items():
            setattr(
                self,
                cmd_name,
                self._init_single_command_opts(cmd_name, cmd_class, self._data.get(cmd_name, {})),
            )


def _to_serializable_dict(obj: _OptionsBase) -> SerializedOptions:
    """
    Options as a TOML table; unset (`None`) options are left out.
    """
    return {k: v for k, v in asdict(obj).items() if v is not None}


def init_config_file(value: Optional[bool], console: Console) -> None:
    """
    Generate a default configuration file and exit program.
    """
    if value is None:
        return

    path = config_file_path()
    highlighted_path = highlight(str(path))

    config = Config()
    default_config = {
        name: _to_serializable_dict(cls())
        for name, cls in config.commands_name_class_map.items()
    }

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as f:
            tomli_w.dump(default_config, f)

        print_info(console, f"Successfully generated config file at {highlighted_path}")

    except OSError as e:
        print_warning(
            console,
            f"Unable to generate config file at {highlighted_path}: {e}",
        )

    raise Exit()
