"""Superpixel evaluation: BR, ASA, UE, CO, and boundary precision/recall.

Boundary matching uses Euclidean distance with a strict ``< epsilon`` test.
This is an epsilon-neighborhood approximation, not the bipartite
correspondence of the original BSDS benchmark.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import distance_transform_edt

from .core import DimensionMismatch, EmptyGroundTruthBoundary, LabelMap

DEFAULT_EPSILON = 2.0


def _arr(labels) -> np.ndarray:
    return labels.labels if isinstance(labels, LabelMap) else np.asarray(labels)


def _same_shape(*maps):
    shapes = {m.shape for m in maps}
    if len(shapes) != 1:
        raise DimensionMismatch(f"maps have different shapes: {sorted(shapes)}")


def extract_boundaries(labels) -> np.ndarray:
    """Boolean mask of pixels with a differently labeled 4-neighbor.

    The image frame does not count as a boundary.
    """
    a = _arr(labels)
    mask = np.zeros(a.shape, dtype=bool)
    dx = a[:, 1:] != a[:, :-1]
    dy = a[1:, :] != a[:-1, :]
    mask[:, 1:] |= dx
    mask[:, :-1] |= dx
    mask[1:, :] |= dy
    mask[:-1, :] |= dy
    return mask


def _distance_to(mask: np.ndarray) -> np.ndarray:
    """Euclidean distance from every pixel to the nearest True pixel of ``mask``."""
    if not mask.any():
        return np.full(mask.shape, np.inf)
    return distance_transform_edt(~mask)


def boundary_recall(s_boundary, g_boundary, epsilon: float = DEFAULT_EPSILON) -> float:
    """Fraction of ground-truth boundary pixels closer than ``epsilon`` to a superpixel boundary."""
    s = np.asarray(s_boundary, dtype=bool)
    g = np.asarray(g_boundary, dtype=bool)
    _same_shape(s, g)
    total = int(g.sum())
    if total == 0:
        raise EmptyGroundTruthBoundary("ground truth has no boundary pixels")
    return float(np.count_nonzero(_distance_to(s)[g] < epsilon)) / total


def _contingency(s: np.ndarray, g: np.ndarray) -> np.ndarray:
    _same_shape(s, g)
    _, si = np.unique(s.ravel(), return_inverse=True)
    _, gi = np.unique(g.ravel(), return_inverse=True)
    ns, ng = si.max() + 1, gi.max() + 1
    return np.bincount(si * ng + gi, minlength=ns * ng).reshape(ns, ng)


def asa(s, g) -> float:
    """Achievable segmentation accuracy: best-overlap pixel share when each superpixel is one object."""
    table = _contingency(_arr(s), _arr(g))
    return float(table.max(axis=1).sum()) / table.sum()


def undersegmentation_error(s, g) -> float:
    """Pixels of each touching superpixel lying outside the region, summed over regions, per image pixel."""
    table = _contingency(_arr(s), _arr(g))
    sizes = table.sum(axis=1)
    leak = (sizes[:, None] - table) * (table > 0)
    return float(leak.sum()) / table.sum()


def perimeters(labels) -> np.ndarray:
    """Unit-edge perimeter per label id: edges to a different label or to the frame."""
    a = _arr(labels)
    ids = a.ravel()
    k = int(ids.max()) + 1
    h, w = a.shape
    # every pixel starts with 4 edges; subtract the ones shared with a same-label neighbor
    inner = np.zeros(k, dtype=np.int64)
    same_x = a[:, 1:] == a[:, :-1]
    same_y = a[1:, :] == a[:-1, :]
    inner += 2 * np.bincount(a[:, 1:][same_x], minlength=k)
    inner += 2 * np.bincount(a[1:, :][same_y], minlength=k)
    return 4 * np.bincount(ids, minlength=k) - inner


def compactness(s) -> float:
    """Area-weighted isoperimetric quotient ``sum 4*pi*|S|^2 / P^2 / |I|`` (pi/4 for square superpixels)."""
    a = _arr(s)
    areas = np.bincount(a.ravel()).astype(np.float64)
    per = perimeters(a).astype(np.float64)
    present = areas > 0
    return float(np.sum(4.0 * math.pi * areas[present] ** 2 / per[present] ** 2)) / a.size


@dataclass
class MetricReport:
    br: float
    asa: float
    ue: float
    co: float
    per_ground_truth: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"br": self.br, "asa": self.asa, "ue": self.ue, "co": self.co}


def evaluate(s, gts, epsilon: float = DEFAULT_EPSILON) -> MetricReport:
    """BR, ASA and UE averaged over the ground truths, plus the (ground-truth free) CO."""
    s = _arr(s)
    gts = [_arr(g) for g in gts]
    if not gts:
        raise ValueError("need at least one ground truth")
    sb = extract_boundaries(s)
    rows = []
    for g in gts:
        _same_shape(s, g)
        rows.append({
            "br": boundary_recall(sb, extract_boundaries(g), epsilon),
            "asa": asa(s, g),
            "ue": undersegmentation_error(s, g),
        })
    mean = {key: float(np.mean([row[key] for row in rows])) for key in ("br", "asa", "ue")}
    return MetricReport(co=compactness(s), per_ground_truth=rows, **mean)


def average_boundary_map(label_maps) -> np.ndarray:
    """Per-pixel fraction of the decompositions that place a boundary there."""
    maps = [_arr(m) for m in label_maps]
    if not maps:
        raise ValueError("need at least one label map")
    _same_shape(*maps)
    acc = np.zeros(maps[0].shape)
    for m in maps:
        acc += extract_boundaries(m)
    return acc / len(maps)


def default_thresholds(n: int = 99) -> np.ndarray:
    return np.linspace(0.0, 1.0, n + 2)[1:-1]


def scale_ladder(lo: int = 6, hi: int = 600, n: int = 12) -> list[int]:
    """Geometrically spaced superpixel counts from ``lo`` to ``hi`` inclusive."""
    if n == 1:
        return [lo]
    return [int(round(lo * (hi / lo) ** (i / (n - 1)))) for i in range(n)]


@dataclass(frozen=True)
class PrPoint:
    threshold: float
    precision: float
    recall: float


def pr_curve(confidence, gts, thresholds=None, epsilon: float = DEFAULT_EPSILON) -> list[PrPoint]:
    """Boundary precision/recall of ``confidence >= t`` for each threshold.

    A predicted pixel is correct when it lies within ``epsilon`` of the
    boundary of any ground truth; recall is averaged over the ground truths.
    With no predicted pixels, precision is 1 and recall 0.
    """
    conf = np.asarray(confidence, dtype=np.float64)
    thresholds = default_thresholds() if thresholds is None else np.asarray(thresholds, dtype=np.float64)
    if np.any(np.diff(thresholds) < 0):
        raise ValueError("thresholds must be sorted ascending")
    gbs = [extract_boundaries(_arr(g)) for g in gts]
    if not gbs:
        raise ValueError("need at least one ground truth")
    _same_shape(conf, *gbs)
    near_any_gt = np.zeros(conf.shape, dtype=bool)
    for gb in gbs:
        near_any_gt |= _distance_to(gb) < epsilon
    out = []
    for t in thresholds:
        pred = conf >= t
        npred = int(pred.sum())
        if npred == 0:
            out.append(PrPoint(float(t), 1.0, 0.0))
            continue
        precision = np.count_nonzero(near_any_gt & pred) / npred
        near_pred = _distance_to(pred) < epsilon
        recalls = [np.count_nonzero(near_pred[gb]) / gb.sum() if gb.any() else 1.0 for gb in gbs]
        out.append(PrPoint(float(t), float(precision), float(np.mean(recalls))))
    return out


def f_measure(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def max_f_measure(points) -> tuple[float, PrPoint | None]:
    best, arg = 0.0, None
    for pt in points:
        f = f_measure(pt.precision, pt.recall)
        if arg is None or f > best:
            best, arg = f, pt
    return best, arg
