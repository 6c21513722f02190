"""SCALP clustering: grid init, path-aware windowed assignment, update, projection.

The assignment sweep is the hot loop. It runs in the compiled ``_kernels``
extension when that was built, else in the numpy port in ``_assign_py``; the
two produce bit-identical labels. ``SCALP_BACKEND=python`` forces the
fallback.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import _assign_py
from .colorspace import srgb_to_lab
from .core import (
    Cluster,
    LabelMap,
    OutOfRange,
    ScalpParams,
    check_contour,
    check_lab,
    validate_params,
)
from .pathing import project_center

try:
    from . import _kernels
except ImportError:  # extension not built
    _kernels = None

KERNELS = {"python": _assign_py.assign_band}
if _kernels is not None:
    KERNELS["cython"] = _kernels.assign_band

DEFAULT_BACKEND = "cython" if "cython" in KERNELS and os.environ.get("SCALP_BACKEND") != "python" else "python"


def available_backends() -> list[str]:
    return sorted(KERNELS)


def _kernel(backend: str | None):
    name = backend or DEFAULT_BACKEND
    try:
        return KERNELS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {available_backends()}") from None


# ---------------------------------------------------------------------------
# distance terms (scalar reference forms; the kernels inline the same algebra)


def point_color_dist(p, c) -> float:
    """Squared CIELab distance between a pixel color ``p`` and a cluster (or color)."""
    cl, ca, cb = c.color if isinstance(c, Cluster) else c
    dl, da, db = p[0] - cl, p[1] - ca, p[2] - cb
    return dl * dl + da * da + db * db


def spatial_dist(p, c) -> float:
    """Squared Euclidean distance from pixel position ``p`` to the cluster barycenter."""
    cx, cy = c.center if isinstance(c, Cluster) else c
    px, py = (p.x, p.y) if hasattr(p, "x") else p
    dx, dy = px - cx, py - cy
    return dx * dx + dy * dy


def path_color_dist(p_color, c, path, lab, lambda_: float) -> float:
    """Blend of the pixel's own color distance and the mean distance along ``path``."""
    if not path:
        raise ValueError("path must be non-empty")
    total = 0.0
    for q in path:
        total += point_color_dist(lab[q.y, q.x], c)
    return lambda_ * point_color_dist(p_color, c) + (1.0 - lambda_) * (total / len(path))


def contour_weight(path, contour, gamma: float, sigma: float) -> float:
    """Multiplicative penalty ``1 + gamma * mean(1 - exp(-C^2 / sigma^2))`` over the path."""
    if not path:
        raise ValueError("path must be non-empty")
    total = 0.0
    for q in path:
        v = float(contour[q.y, q.x])
        total += 1.0 - math.exp(-(v * v) / (sigma * sigma))
    return 1.0 + gamma * (total / len(path))


def total_dist(p, c: Cluster, path, lab, contour, params: ScalpParams, r: float) -> float:
    """Full assignment distance of pixel ``p`` to cluster ``c``.

    ``contour=None`` means no prior (C = 0 everywhere). The color part is
    weighted by the contour penalty; the spatial part is scaled by m^2/r^2.
    """
    px, py = (p.x, p.y) if hasattr(p, "x") else p
    color = path_color_dist(lab[py, px], c, path, lab, params.lambda_)
    gamma = params.gamma_factor * r
    weight = 1.0 if contour is None else contour_weight(path, contour, gamma, params.sigma)
    return color * weight + spatial_dist((px, py), c) * (params.m * params.m / (r * r))


# ---------------------------------------------------------------------------
# grid initialisation and cluster update


def _grid_edges(extent: int, r: float) -> np.ndarray:
    q = extent / r
    n = math.ceil(q - 1e-9)
    edges = [min(math.floor(i * r + 1e-9), extent) for i in range(n)] + [extent]
    return np.unique(np.array(edges, dtype=np.int64))


def init_grid(lab, k: int) -> tuple[list[Cluster], LabelMap]:
    """Tile the image with blocks of side ``r = sqrt(N / k)``; one cluster per block.

    Blocks start at ``floor(i * r)``, the last row/column of blocks takes the
    remainder. The actual cluster count ``ceil(W/r) * ceil(H/r)`` can differ
    from ``k``. Cluster ids run row-major over the blocks.
    """
    lab = np.asarray(lab, dtype=np.float64)
    h, w = lab.shape[:2]
    n = h * w
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= n):
        raise OutOfRange("k", f"{k!r} not in [1, {n}]")
    r = math.sqrt(n / k)
    xe = _grid_edges(w, r)
    ye = _grid_edges(h, r)
    nbx = len(xe) - 1
    col_block = np.repeat(np.arange(nbx), np.diff(xe))
    row_block = np.repeat(np.arange(len(ye) - 1), np.diff(ye))
    labels = (row_block[:, None] * nbx + col_block[None, :]).astype(np.int32)
    nclusters = (len(ye) - 1) * nbx
    colors, bary, sizes = _cluster_stats(labels, lab, nclusters)
    clusters = _to_clusters(colors, bary, sizes)
    return clusters, LabelMap(labels, nclusters)


def _cluster_stats(labels: np.ndarray, lab: np.ndarray, nclusters: int,
                   prev_colors=None, prev_bary=None):
    h, w = labels.shape
    flat = labels.ravel()
    sizes = np.bincount(flat, minlength=nclusters).astype(np.int64)
    ys, xs = np.indices((h, w))
    sums = np.empty((nclusters, 5))
    pix = lab.reshape(-1, 3)
    for j in range(3):
        sums[:, j] = np.bincount(flat, weights=pix[:, j], minlength=nclusters)
    sums[:, 3] = np.bincount(flat, weights=xs.ravel().astype(np.float64), minlength=nclusters)
    sums[:, 4] = np.bincount(flat, weights=ys.ravel().astype(np.float64), minlength=nclusters)
    filled = sizes > 0
    colors = np.zeros((nclusters, 3)) if prev_colors is None else prev_colors.copy()
    bary = np.zeros((nclusters, 2)) if prev_bary is None else prev_bary.copy()
    colors[filled] = sums[filled, :3] / sizes[filled, None]
    bary[filled] = sums[filled, 3:] / sizes[filled, None]
    return colors, bary, sizes


def _to_clusters(colors, bary, sizes) -> list[Cluster]:
    return [
        Cluster(id=i, l=float(c[0]), a=float(c[1]), b=float(c[2]),
                cx=float(xy[0]), cy=float(xy[1]), size=int(s))
        for i, (c, xy, s) in enumerate(zip(colors, bary, sizes))
    ]


def _from_clusters(clusters):
    colors = np.array([[c.l, c.a, c.b] for c in clusters], dtype=np.float64).reshape(-1, 3)
    bary = np.array([[c.cx, c.cy] for c in clusters], dtype=np.float64).reshape(-1, 2)
    sizes = np.array([c.size for c in clusters], dtype=np.int64)
    return colors, bary, sizes


def update_clusters(labels: LabelMap, lab, previous: list[Cluster] | None = None) -> list[Cluster]:
    """Recompute every cluster's mean color and barycenter from its member pixels.

    Clusters left without pixels keep their previous mean and center (taken
    from ``previous`` when given) and report ``size == 0``.
    """
    lab = np.asarray(lab, dtype=np.float64)
    prev_colors = prev_bary = None
    if previous is not None:
        prev_colors, prev_bary, _ = _from_clusters(previous)
    colors, bary, sizes = _cluster_stats(labels.labels, lab, labels.k, prev_colors, prev_bary)
    return _to_clusters(colors, bary, sizes)


def _effective_centers(labels: np.ndarray, colors, bary, sizes) -> np.ndarray:
    """Barycenters, projected onto their superpixel where they fell outside it."""
    eff = bary.copy()
    h, w = labels.shape
    rx = np.floor(bary[:, 0] + 0.5).astype(np.intp)
    ry = np.floor(bary[:, 1] + 0.5).astype(np.intp)
    inside = labels[np.clip(ry, 0, h - 1), np.clip(rx, 0, w - 1)] == np.arange(len(bary))
    for k in np.nonzero((sizes > 0) & ~inside)[0]:
        c = Cluster(id=int(k), l=0.0, a=0.0, b=0.0, cx=bary[k, 0], cy=bary[k, 1], size=int(sizes[k]))
        eff[k] = project_center(c, labels)
    return eff


# ---------------------------------------------------------------------------
# assignment


@dataclass
class AssignmentState:
    """Per-pixel best distance and label, with the clusters being assigned to.

    ``centers`` holds each cluster's effective center (the projected one when
    the barycenter escaped its superpixel); ``None`` means the barycenters.
    """

    best_dist: np.ndarray
    labels: LabelMap
    clusters: list[Cluster]
    centers: np.ndarray | None = field(default=None)


def _contour_summand(contour, shape, sigma: float) -> np.ndarray:
    if contour is None:
        return np.zeros(shape, dtype=np.float64)
    c = np.ascontiguousarray(contour, dtype=np.float64)
    return np.ascontiguousarray(1.0 - np.exp(-(c * c) / (sigma * sigma)))


def _row_bands(h: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(int(workers), h))
    edges = np.linspace(0, h, workers + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _assign(lab, wmap, colors, bary, eff, sizes, labels, dist, r, lam, gamma, m,
            workers=1, backend=None):
    """One sweep over all clusters; writes ``labels`` and ``dist`` in place.

    Rows are split into bands handled independently. Each pixel still sees
    the clusters in ascending id order with a strict-less update, so the
    result does not depend on ``workers``.
    """
    kernel = _kernel(backend)
    h = labels.shape[0]
    centers = np.ascontiguousarray(np.floor(eff + 0.5), dtype=np.intp)
    active = np.ascontiguousarray(sizes > 0, dtype=np.uint8)
    radius = int(math.ceil(r - 1e-12))
    mfactor = m * m / (r * r)
    use_path = not (lam == 1.0 and gamma == 0.0)
    args = (np.ascontiguousarray(lab), wmap, centers, np.ascontiguousarray(bary),
            np.ascontiguousarray(colors), active, labels, dist,
            radius, float(lam), float(gamma), float(mfactor))
    bands = _row_bands(h, workers)
    if len(bands) == 1:
        kernel(*args, 0, h, use_path)
        return
    with ThreadPoolExecutor(max_workers=len(bands)) as pool:
        list(pool.map(lambda band: kernel(*args, band[0], band[1], use_path), bands))


def assignment_pass(state: AssignmentState, lab, contour, params: ScalpParams,
                    workers: int = 1, backend: str | None = None) -> AssignmentState:
    """Assign every pixel covered by some cluster window to its closest cluster.

    Resets ``best_dist`` to +inf, then for each cluster (ascending id) tests
    the ``(2*ceil(r)+1)^2`` window around its rounded effective center.
    Pixels outside every window keep their label and an infinite distance.
    """
    lab = check_lab(lab)
    h, w = lab.shape[:2]
    r = params.radius(h * w)
    wmap = _contour_summand(contour, (h, w), params.sigma)
    colors, bary, sizes = _from_clusters(state.clusters)
    eff = bary if state.centers is None else np.asarray(state.centers, dtype=np.float64)
    labels = np.ascontiguousarray(state.labels.labels, dtype=np.int32).copy()
    dist = np.full((h, w), np.inf)
    _assign(lab, wmap, colors, bary, eff, sizes, labels, dist, r,
            params.lambda_, params.gamma_factor * r, params.m, workers, backend)
    return AssignmentState(dist, LabelMap(labels, state.labels.k), state.clusters, state.centers)


# ---------------------------------------------------------------------------
# connectivity


def _components(labels: np.ndarray) -> tuple[int, np.ndarray]:
    """4-connected components of equal-label pixels, numbered by first pixel (row-major)."""
    h, w = labels.shape
    idx = np.arange(h * w).reshape(h, w)
    right = labels[:, :-1] == labels[:, 1:]
    down = labels[:-1, :] == labels[1:, :]
    src = np.concatenate([idx[:, :-1][right], idx[:-1, :][down]])
    dst = np.concatenate([idx[:, 1:][right], idx[1:, :][down]])
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(h * w, h * w))
    return connected_components(graph, directed=False)


def _neighbor_pairs(h: int, w: int):
    idx = np.arange(h * w).reshape(h, w)
    a = np.concatenate([idx[:, :-1].ravel(), idx[:-1, :].ravel()])
    b = np.concatenate([idx[:, 1:].ravel(), idx[1:, :].ravel()])
    return np.concatenate([a, b]), np.concatenate([b, a])


def enforce_connectivity(labels: LabelMap) -> LabelMap:
    """Make every label's pixel set 4-connected.

    Each label keeps its largest component (earliest first pixel on ties).
    Every other fragment joins the neighboring label it shares the most
    pixel edges with, smallest id on ties. Fragments only count borders
    with pixels already settled, so merges proceed outward from the kept
    components in simultaneous rounds.
    """
    arr = np.asarray(labels.labels)
    h, w = arr.shape
    ncomp, comp = _components(arr)
    if ncomp == len(np.unique(arr)):
        return LabelMap(arr.copy(), labels.k)
    comp_flat = comp.ravel()
    flat = arr.ravel().astype(np.int64)
    comp_label = np.empty(ncomp, dtype=np.int64)
    comp_label[comp_flat] = flat
    comp_size = np.bincount(comp_flat, minlength=ncomp)
    # main component per label: largest, then smallest component id
    order = np.lexsort((np.arange(ncomp), -comp_size, comp_label))
    first_of_label = np.ones(ncomp, dtype=bool)
    first_of_label[1:] = comp_label[order][1:] != comp_label[order][:-1]
    settled_comp = np.zeros(ncomp, dtype=bool)
    settled_comp[order[first_of_label]] = True

    out = flat.copy()
    src, dst = _neighbor_pairs(h, w)
    k = labels.k
    while not settled_comp.all():
        settled_px = settled_comp[comp_flat]
        sel = ~settled_px[src] & settled_px[dst]
        oc = comp_flat[src[sel]]
        nl = out[dst[sel]]
        if len(oc) == 0:  # cannot happen on a connected pixel grid
            raise RuntimeError("orphan fragments without settled neighbors")
        keys, counts = np.unique(oc * k + nl, return_counts=True)
        kc, kl = keys // k, keys % k
        best = np.lexsort((kl, -counts, kc))
        first = np.ones(len(best), dtype=bool)
        first[1:] = kc[best][1:] != kc[best][:-1]
        winners_comp = kc[best][first]
        winners_label = kl[best][first]
        remap = np.full(ncomp, -1, dtype=np.int64)
        remap[winners_comp] = winners_label
        moved = remap[comp_flat] >= 0
        out[moved] = remap[comp_flat[moved]]
        settled_comp[winners_comp] = True
    return LabelMap(out.reshape(h, w).astype(np.int32), labels.k)


# ---------------------------------------------------------------------------
# full pipeline


def decompose_lab(lab, contour=None, params: ScalpParams | None = None, *,
                  workers: int = 1, backend: str | None = None) -> tuple[LabelMap, list[Cluster]]:
    """Run SCALP on a CIELab image. See :func:`decompose`."""
    if params is None:
        raise ValueError("params required")
    lab = np.ascontiguousarray(check_lab(lab))
    h, w = lab.shape[:2]
    validate_params(params, (w, h))
    if contour is not None:
        contour = check_contour(contour, (h, w))
    n = h * w
    r = params.radius(n)
    gamma = params.gamma_factor * r
    wmap = _contour_summand(contour, (h, w), params.sigma)

    clusters, init = init_grid(lab, params.k)
    nclusters = init.k
    labels = np.ascontiguousarray(init.labels, dtype=np.int32)
    colors, bary, sizes = _from_clusters(clusters)
    eff = bary.copy()
    dist = np.empty((h, w))
    for _ in range(params.iterations):
        dist.fill(np.inf)
        _assign(lab, wmap, colors, bary, eff, sizes, labels, dist, r,
                params.lambda_, gamma, params.m, workers, backend)
        colors, bary, sizes = _cluster_stats(labels, lab, nclusters, colors, bary)
        eff = _effective_centers(labels, colors, bary, sizes)

    final = enforce_connectivity(LabelMap(labels, nclusters))
    colors, bary, sizes = _cluster_stats(final.labels, lab, nclusters, colors, bary)
    return final, _to_clusters(colors, bary, sizes)


def decompose(rgb, contour=None, params: ScalpParams | None = None, *,
              workers: int = 1, backend: str | None = None) -> tuple[LabelMap, list[Cluster]]:
    """Decompose an sRGB image into superpixels.

    Starts from the regular grid, then runs ``params.iterations`` rounds of
    assignment, cluster update and center projection, enforces 4-connectivity
    and refreshes the clusters so they describe the returned map. ``contour``
    is an optional ``(H, W)`` prior in [0, 1]; omitted means no contours.

    The result is identical for any ``workers`` count and either backend.
    """
    return decompose_lab(srgb_to_lab(rgb), contour, params, workers=workers, backend=backend)
