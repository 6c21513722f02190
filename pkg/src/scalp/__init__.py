"""SCALP superpixels and the superpixel evaluation metrics."""

from .clustering import (
    DEFAULT_BACKEND,
    available_backends,
    decompose,
    decompose_lab,
    enforce_connectivity,
    init_grid,
)
from .colorspace import srgb_to_lab
from .core import Cluster, GroundTruth, LabelMap, ScalpParams, ScalpError, validate_params

__all__ = [
    "Cluster",
    "DEFAULT_BACKEND",
    "GroundTruth",
    "LabelMap",
    "ScalpError",
    "ScalpParams",
    "available_backends",
    "decompose",
    "decompose_lab",
    "enforce_connectivity",
    "init_grid",
    "srgb_to_lab",
    "validate_params",
]
