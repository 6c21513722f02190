"""Shared domain types, validation helpers and exceptions.

Images are plain numpy arrays indexed ``[row, col]``:

* RGB image: ``(H, W, 3)`` ``uint8`` sRGB
* Lab image: ``(H, W, 3)`` ``float64`` CIELab
* contour map: ``(H, W)`` ``float64`` in ``[0, 1]``

Positions are ``(x, y)`` with ``x`` the column and ``y`` the row, both 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ScalpError(Exception):
    """Base class for every error raised by this package."""


class OutOfRange(ScalpError, ValueError):
    def __init__(self, field_name: str, message: str = ""):
        self.field = field_name
        super().__init__(f"{field_name} out of range" + (f": {message}" if message else ""))


class DimensionMismatch(ScalpError, ValueError):
    pass


class OutOfBounds(ScalpError, IndexError):
    pass


class EmptyCluster(ScalpError, ValueError):
    pass


class EmptyGroundTruthBoundary(ScalpError, ValueError):
    pass


class IoError(ScalpError, OSError):
    pass


class UnsupportedFormat(ScalpError, ValueError):
    pass


class CorruptFile(ScalpError, ValueError):
    pass


class RaggedCsv(ScalpError, ValueError):
    pass


@dataclass(frozen=True)
class PixelPos:
    x: int
    y: int

    def in_bounds(self, width: int, height: int) -> bool:
        return 0 <= self.x < width and 0 <= self.y < height


@dataclass
class Cluster:
    """Running state of one superpixel: mean CIELab color and barycenter."""

    id: int
    l: float
    a: float
    b: float
    cx: float
    cy: float
    size: int = 0

    @property
    def color(self) -> tuple[float, float, float]:
        return (self.l, self.a, self.b)

    @property
    def center(self) -> tuple[float, float]:
        return (self.cx, self.cy)


@dataclass
class LabelMap:
    """Per-pixel superpixel ids, row-major ``(H, W)``, every id in ``[0, k)``."""

    labels: np.ndarray
    k: int

    def __post_init__(self):
        self.labels = np.asarray(self.labels)
        if self.labels.ndim != 2 or self.labels.size == 0:
            raise DimensionMismatch(f"label map must be a non-empty 2-D array, got shape {self.labels.shape}")
        if not np.issubdtype(self.labels.dtype, np.integer):
            raise TypeError("label map must hold integers")
        if self.k < 1:
            raise OutOfRange("k", "label map needs at least one label")
        lo, hi = int(self.labels.min()), int(self.labels.max())
        if lo < 0 or hi >= self.k:
            raise OutOfRange("labels", f"ids must lie in [0, {self.k}), found [{lo}, {hi}]")

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape

    @classmethod
    def from_array(cls, labels) -> "LabelMap":
        """Wrap an integer array, compacting its ids to ``[0, k)`` by first appearance."""
        return cls(*compact_labels(labels))


# A ground truth is a full-coverage partition with the same contract.
GroundTruth = LabelMap


def compact_labels(labels) -> tuple[np.ndarray, int]:
    """Renumber ids to ``0..k-1`` in order of first (row-major) appearance."""
    arr = np.asarray(labels)
    uniq, first, inverse = np.unique(arr.ravel(), return_index=True, return_inverse=True)
    rank = np.empty(len(uniq), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(uniq))
    return rank[inverse].reshape(arr.shape).astype(np.int32), len(uniq)


@dataclass(frozen=True)
class ScalpParams:
    k: int
    iterations: int = 5
    lambda_: float = 0.5
    sigma: float = 0.25
    gamma_factor: float = 2.0
    m: float = 10.0

    def radius(self, n_pixels: int) -> float:
        """Grid step ``sqrt(N / k)``."""
        return math.sqrt(n_pixels / self.k)

    def gamma(self, n_pixels: int) -> float:
        return self.gamma_factor * self.radius(n_pixels)


def validate_params(params: ScalpParams, image_dims: tuple[int, int]) -> ScalpParams:
    """Check ``params`` against an image of ``(width, height)`` pixels.

    Returns the params unchanged, or raises :class:`OutOfRange` naming the
    first offending field (:class:`DimensionMismatch` if ``k`` exceeds the
    pixel count).
    """
    width, height = image_dims
    if width < 1 or height < 1:
        raise OutOfRange("image_dims", f"{width}x{height}")
    n = width * height
    if not isinstance(params.k, (int, np.integer)) or params.k < 1:
        raise OutOfRange("k", f"{params.k!r} < 1")
    if params.k > n:
        raise DimensionMismatch(f"k={params.k} exceeds the {n} pixels of a {width}x{height} image")
    if not isinstance(params.iterations, (int, np.integer)) or params.iterations < 0:
        raise OutOfRange("iterations", repr(params.iterations))
    if not (0.0 <= params.lambda_ <= 1.0):
        raise OutOfRange("lambda", repr(params.lambda_))
    if not (params.sigma > 0.0 and math.isfinite(params.sigma)):
        raise OutOfRange("sigma", repr(params.sigma))
    if not (params.gamma_factor >= 0.0 and math.isfinite(params.gamma_factor)):
        raise OutOfRange("gamma_factor", repr(params.gamma_factor))
    if not (params.m >= 0.0 and math.isfinite(params.m)):
        raise OutOfRange("m", repr(params.m))
    return params


def check_rgb(rgb) -> np.ndarray:
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.shape[0] < 1 or rgb.shape[1] < 1:
        raise DimensionMismatch(f"RGB image must be (H, W, 3), got {rgb.shape}")
    if rgb.dtype != np.uint8:
        raise TypeError(f"RGB image must be uint8, got {rgb.dtype}")
    return rgb


def check_lab(lab) -> np.ndarray:
    lab = np.asarray(lab, dtype=np.float64)
    if lab.ndim != 3 or lab.shape[2] != 3 or lab.shape[0] < 1 or lab.shape[1] < 1:
        raise DimensionMismatch(f"Lab image must be (H, W, 3), got {lab.shape}")
    if not np.all(np.isfinite(lab)):
        raise OutOfRange("lab", "non-finite values")
    L = lab[..., 0]
    if L.min() < -1e-9 or L.max() > 100 + 1e-9:
        raise OutOfRange("L", "lightness outside [0, 100]")
    return lab


def check_contour(contour, shape: tuple[int, int] | None = None) -> np.ndarray:
    contour = np.asarray(contour, dtype=np.float64)
    if contour.ndim != 2:
        raise DimensionMismatch(f"contour map must be 2-D, got {contour.shape}")
    if shape is not None and contour.shape != tuple(shape):
        raise DimensionMismatch(f"contour map {contour.shape} does not match image {tuple(shape)}")
    if not np.all((contour >= 0.0) & (contour <= 1.0)):
        raise OutOfRange("contour", "values must lie in [0, 1]")
    return contour
