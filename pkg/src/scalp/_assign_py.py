"""Pure numpy assignment kernel, used when the compiled extension is unavailable.

Mirrors ``_kernels.pyx`` operation for operation (same evaluation order,
same sequential path summation) so both backends return identical bits.
"""

import numpy as np

from .pathing import path_offset_table


def assign_band(lab, wmap, centers, bary, colors, active, labels, dist,
                radius, lam, gamma, mfactor, row0, row1, use_path):
    h, w = labels.shape
    R = int(radius)
    if use_path:
        tdx, tdy, tlen = path_offset_table(R)
    for k in range(len(centers)):
        if not active[k]:
            continue
        cx, cy = int(centers[k, 0]), int(centers[k, 1])
        # full window, clipped to the image: path pixels may fall outside the band
        wy0, wy1 = max(cy - R, 0), min(cy + R + 1, h)
        wx0, wx1 = max(cx - R, 0), min(cx + R + 1, w)
        y0, y1 = max(wy0, row0), min(wy1, row1)
        if y0 >= y1:
            continue
        col = colors[k]
        diff = lab[wy0:wy1, wx0:wx1] - col
        dcw = diff[..., 0] * diff[..., 0] + diff[..., 1] * diff[..., 1] + diff[..., 2] * diff[..., 2]
        ys = np.arange(y0, y1, dtype=np.float64)[:, None]
        xs = np.arange(wx0, wx1, dtype=np.float64)[None, :]
        ddx = xs - bary[k, 0]
        ddy = ys - bary[k, 1]
        ds = ddx * ddx + ddy * ddy
        dcp = dcw[y0 - wy0:y1 - wy0]
        if use_path:
            ty = slice(y0 - cy + R, y1 - cy + R)
            tx = slice(wx0 - cx + R, wx1 - cx + R)
            qx_all = tdx[ty, tx] + (cx - wx0)
            qy_all = tdy[ty, tx] + (cy - wy0)
            n = tlen[ty, tx]
            ww = wmap[wy0:wy1, wx0:wx1]
            sdc = np.zeros(dcp.shape)
            sw = np.zeros(dcp.shape)
            for t in range(int(n.max())):
                live = t < n
                qy, qx = qy_all[..., t], qx_all[..., t]
                sdc += np.where(live, dcw[qy, qx], 0.0)
                sw += np.where(live, ww[qy, qx], 0.0)
            n = n.astype(np.float64)
        else:
            sdc = sw = 0.0
            n = 1.0
        d = (lam * dcp + (1.0 - lam) * (sdc / n)) * (1.0 + gamma * (sw / n)) + ds * mfactor
        dview = dist[y0:y1, wx0:wx1]
        better = d < dview
        dview[better] = d[better]
        labels[y0:y1, wx0:wx1][better] = k
