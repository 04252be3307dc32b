"""First detected return statistics of quantum systems monitored at random times."""

from ._monret import *  # noqa: F401,F403
from ._monret import (
    InvalidInput,
    MonretError,
    NumericalHealthError,
    ResonanceError,
    SpectralModel,
    TimeDistribution,
    UndefinedWinding,
)

__all__ = [name for name in dir() if not name.startswith("_")]
