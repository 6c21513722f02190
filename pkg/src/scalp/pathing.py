"""Linear paths from a pixel to a cluster center, and center projection."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .core import Cluster, EmptyCluster, LabelMap, OutOfBounds, PixelPos


def round_half_away(v: float) -> int:
    """Round to the nearest integer, halves away from zero."""
    return int(math.floor(v + 0.5)) if v >= 0 else -int(math.floor(-v + 0.5))


def bresenham(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    """All-octant integer Bresenham from ``(x0, y0)`` to ``(x1, y1)``, both ends included."""
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    out = []
    x, y = x0, y0
    while True:
        out.append((x, y))
        if x == x1 and y == y1:
            return out
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy


def linear_path(p, center, shape: tuple[int, int] | None = None) -> list[PixelPos]:
    """Pixels on the line from ``p`` to the rounded ``center``.

    ``p`` itself is excluded and the center pixel included, so the path is
    never empty; when ``p`` is the center pixel the path is ``[p]``.
    ``shape`` is ``(height, width)``; when given both ends are bounds-checked.
    """
    px, py = (p.x, p.y) if isinstance(p, PixelPos) else (int(p[0]), int(p[1]))
    cx, cy = round_half_away(center[0]), round_half_away(center[1])
    if shape is not None:
        h, w = shape
        for name, (x, y) in (("pixel", (px, py)), ("center", (cx, cy))):
            if not (0 <= x < w and 0 <= y < h):
                raise OutOfBounds(f"{name} ({x}, {y}) outside {w}x{h} image")
    if (px, py) == (cx, cy):
        return [PixelPos(px, py)]
    return [PixelPos(x, y) for x, y in bresenham(px, py, cx, cy)[1:]]


@lru_cache(maxsize=16)
def path_offset_table(radius: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Precomputed paths for every pixel of a ``(2R+1)^2`` window around the center.

    Bresenham is translation invariant, so the path from ``p`` to ``c`` only
    depends on ``c - p``. Entry ``[j, i]`` describes the pixel at window
    offset ``(i - R, j - R)`` from the center.

    Returns ``(dx, dy, length)``: ``dx``/``dy`` are ``(2R+1, 2R+1, R+1)``
    int arrays of offsets relative to the *center* (zero-padded past
    ``length``), ``length`` is ``(2R+1, 2R+1)``.
    """
    n = 2 * radius + 1
    dx = np.zeros((n, n, radius + 1), dtype=np.intp)
    dy = np.zeros((n, n, radius + 1), dtype=np.intp)
    length = np.zeros((n, n), dtype=np.intp)
    for j in range(n):
        for i in range(n):
            ox, oy = i - radius, j - radius
            path = linear_path((ox, oy), (0, 0))
            length[j, i] = len(path)
            for t, q in enumerate(path):
                dx[j, i, t] = q.x
                dy[j, i, t] = q.y
    for arr in (dx, dy, length):
        arr.setflags(write=False)
    return dx, dy, length


def project_center(cluster: Cluster, labels: LabelMap | np.ndarray) -> tuple[float, float]:
    """Pull a barycenter that escaped its superpixel back onto its nearest member pixel.

    Returns the barycenter unchanged when its rounded pixel carries the
    cluster's label. Otherwise returns the member pixel closest to it in
    Euclidean distance, smallest row-major index on ties.
    """
    if cluster.size <= 0:
        raise EmptyCluster(f"cluster {cluster.id} has no pixels")
    arr = labels.labels if isinstance(labels, LabelMap) else np.asarray(labels)
    h, w = arr.shape
    rx, ry = round_half_away(cluster.cx), round_half_away(cluster.cy)
    if 0 <= rx < w and 0 <= ry < h and arr[ry, rx] == cluster.id:
        return (cluster.cx, cluster.cy)
    ys, xs = np.nonzero(arr == cluster.id)
    if len(xs) == 0:
        raise EmptyCluster(f"cluster {cluster.id} has no pixels in the label map")
    d = (xs - cluster.cx) ** 2 + (ys - cluster.cy) ** 2
    i = int(np.argmin(d))  # nonzero() is row-major; argmin keeps the first minimum
    return (float(xs[i]), float(ys[i]))
