# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled assignment kernel.

Arithmetic is kept in the same order as ``_assign_py.assign_band`` so the two
backends agree bit for bit (built with -ffp-contract=off).
"""


def assign_band(const double[:, :, ::1] lab, const double[:, ::1] wmap,
                const long[:, ::1] centers, const double[:, ::1] bary,
                const double[:, ::1] colors, const unsigned char[::1] active,
                int[:, ::1] labels, double[:, ::1] dist,
                Py_ssize_t radius, double lam, double gamma, double mfactor,
                Py_ssize_t row0, Py_ssize_t row1, bint use_path):
    cdef Py_ssize_t h = labels.shape[0], w = labels.shape[1]
    cdef Py_ssize_t nk = centers.shape[0]
    cdef Py_ssize_t k, x, y, cx, cy, y0, y1, x0, x1
    cdef Py_ssize_t qx, qy, ddx, ddy, sx, sy, err, e2, cnt
    cdef double cl, ca, cb, bx, by, dl, da, db, dcp, ds, sdc, sw, n, d, fx, fy
    with nogil:
        for k in range(nk):
            if not active[k]:
                continue
            cx = centers[k, 0]
            cy = centers[k, 1]
            y0 = cy - radius
            if y0 < row0:
                y0 = row0
            if y0 < 0:
                y0 = 0
            y1 = cy + radius + 1
            if y1 > row1:
                y1 = row1
            if y1 > h:
                y1 = h
            x0 = cx - radius
            if x0 < 0:
                x0 = 0
            x1 = cx + radius + 1
            if x1 > w:
                x1 = w
            cl = colors[k, 0]
            ca = colors[k, 1]
            cb = colors[k, 2]
            bx = bary[k, 0]
            by = bary[k, 1]
            for y in range(y0, y1):
                for x in range(x0, x1):
                    dl = lab[y, x, 0] - cl
                    da = lab[y, x, 1] - ca
                    db = lab[y, x, 2] - cb
                    dcp = dl * dl + da * da + db * db
                    fx = <double>x - bx
                    fy = <double>y - by
                    ds = fx * fx + fy * fy
                    sdc = 0.0
                    sw = 0.0
                    n = 1.0
                    if use_path:
                        if x == cx and y == cy:
                            dl = lab[y, x, 0] - cl
                            da = lab[y, x, 1] - ca
                            db = lab[y, x, 2] - cb
                            sdc = 0.0 + (dl * dl + da * da + db * db)
                            sw = 0.0 + wmap[y, x]
                        else:
                            # Bresenham from (x, y) toward (cx, cy), skipping the start pixel
                            ddx = cx - x if cx > x else x - cx
                            ddy = -(cy - y if cy > y else y - cy)
                            sx = 1 if x < cx else -1
                            sy = 1 if y < cy else -1
                            err = ddx + ddy
                            qx = x
                            qy = y
                            cnt = 0
                            while qx != cx or qy != cy:
                                e2 = 2 * err
                                if e2 >= ddy:
                                    err = err + ddy
                                    qx = qx + sx
                                if e2 <= ddx:
                                    err = err + ddx
                                    qy = qy + sy
                                dl = lab[qy, qx, 0] - cl
                                da = lab[qy, qx, 1] - ca
                                db = lab[qy, qx, 2] - cb
                                sdc = sdc + (dl * dl + da * da + db * db)
                                sw = sw + wmap[qy, qx]
                                cnt = cnt + 1
                            n = <double>cnt
                    d = (lam * dcp + (1.0 - lam) * (sdc / n)) * (1.0 + gamma * (sw / n)) + ds * mfactor
                    if d < dist[y, x]:
                        dist[y, x] = d
                        labels[y, x] = <int>k
