"""Pick-and-drop sampling: heavy elements and large frequency moments from a
single pass over an insertion-only stream."""

from .core import (
    KERNEL_NAME,
    Estimate,
    PickDropConfig,
    PickDropState,
    run,
    run_streaming,
)
from .fkest import estimate_fk, level_substream
from .heavy import HeavyHitterConfig, aggregate, find_heavy, find_heavy_doubling
from .params import ParamSet, delta_grid, derive_params, repetitions
from .stream import ExactStats, MatrixOverlay, StreamView, frequency_vector

__all__ = [
    "KERNEL_NAME",
    "Estimate",
    "PickDropConfig",
    "PickDropState",
    "run",
    "run_streaming",
    "estimate_fk",
    "level_substream",
    "HeavyHitterConfig",
    "aggregate",
    "find_heavy",
    "find_heavy_doubling",
    "ParamSet",
    "delta_grid",
    "derive_params",
    "repetitions",
    "ExactStats",
    "MatrixOverlay",
    "StreamView",
    "frequency_vector",
]

__version__ = "0.1.0"
