"""Visualisations of a decomposition, and the gradient fallback contour prior."""

import numpy as np

from .colorspace import srgb_to_lab
from .core import DimensionMismatch, LabelMap, check_rgb
from .metrics import extract_boundaries

MODES = ("boundaries", "mean_color", "overlay")
BOUNDARY_COLOR = np.array([255, 0, 0], dtype=np.uint8)


def render(labels, rgb, mode: str = "overlay") -> np.ndarray:
    """Draw ``labels`` over ``rgb``.

    ``mean_color`` fills each superpixel with its average sRGB color,
    ``boundaries`` draws boundary pixels on white, ``overlay`` draws them on
    the image itself.
    """
    rgb = check_rgb(rgb)
    arr = labels.labels if isinstance(labels, LabelMap) else np.asarray(labels)
    if arr.shape != rgb.shape[:2]:
        raise DimensionMismatch(f"labels {arr.shape} vs image {rgb.shape[:2]}")
    if mode == "mean_color":
        flat = arr.ravel()
        counts = np.bincount(flat)
        out = np.empty(rgb.shape, dtype=np.uint8)
        for c in range(3):
            sums = np.bincount(flat, weights=rgb[..., c].ravel().astype(np.float64))
            means = np.floor(sums / np.maximum(counts, 1) + 0.5)
            out[..., c] = means[arr].astype(np.uint8)
        return out
    if mode == "boundaries":
        out = np.full(rgb.shape, 255, dtype=np.uint8)
    elif mode == "overlay":
        out = rgb.copy()
    else:
        raise ValueError(f"unknown render mode {mode!r}; expected one of {MODES}")
    out[extract_boundaries(arr)] = BOUNDARY_COLOR
    return out


def fallback_prior(rgb) -> np.ndarray:
    """Normalised gradient magnitude of CIELab lightness.

    Central differences with replicated borders, divided by the maximum.
    A constant image gives an all-zero map. Stands in for a real contour
    detector only when none is available.
    """
    L = srgb_to_lab(rgb)[..., 0]
    p = np.pad(L, 1, mode="edge")
    gx = (p[1:-1, 2:] - p[1:-1, :-2]) / 2.0
    gy = (p[2:, 1:-1] - p[:-2, 1:-1]) / 2.0
    mag = np.hypot(gx, gy)
    top = mag.max()
    if top <= 0:
        return np.zeros(L.shape)
    return mag / top
