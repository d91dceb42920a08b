"""Minimum-norm interpolation, random features and implicit-bias experiments."""

from ._core import *  # noqa: F401,F403
from ._core import (  # noqa: F401
    ConfigError,
    DivergenceError,
    Error,
    FormatError,
    InvalidInput,
    NotSeparableError,
    NumericalFailure,
)
