"""Compiled inner loops: curvature stencil, segment sweep, explicit stepping.

Everything here works on raw ``(n, 2)`` float arrays. The public wrappers in
:mod:`imcf_torus.geometry` and :mod:`imcf_torus.flow` validate inputs first.
"""

import math

import numpy as np
from numba import njit

# (3 + 16 eps) eps with eps = 2**-53, Shewchuk's static filter for orient2d
_CCW_ERRBOUND = (3.0 + 16.0 * 2.0**-53) * 2.0**-53

# advance() status codes
RUNNING = 0
H_MIN_REACHED = 1
PINCH_DETECTED = 2
STRUCTURE_VIOLATED = 3
MAX_STEPS = 4
SAMPLE_TIME = 5
H_LEVEL = 6

# sweep() result flags
CLEAN = 0
CROSSING = 1
UNCERTAIN = 2


@njit(cache=True)
def edge_lengths(x):
    n = x.shape[0]
    h = np.empty(n)
    for i in range(n):
        j = i + 1 if i < n - 1 else 0
        dx = x[j, 0] - x[i, 0]
        dy = x[j, 1] - x[i, 1]
        h[i] = math.sqrt(dx * dx + dy * dy)
    return h


@njit(cache=True)
def normals_and_curvature(x):
    """Outward normals, signed curvature and edge lengths of a closed polyline.

    The tangent at node i is the weighted chord combination
    ``h2 * u1 + h1 * u2`` (u1, u2 unit chords in, out), which is exactly the
    tangent of the circle through the three nodes. Curvature is the inverse
    circumradius, positive where the polyline turns left.
    """
    n = x.shape[0]
    h = edge_lengths(x)
    nu = np.empty((n, 2))
    k = np.empty(n)
    for i in range(n):
        im = i - 1 if i > 0 else n - 1
        ip = i + 1 if i < n - 1 else 0
        h1 = h[im]
        h2 = h[i]
        d1x = x[i, 0] - x[im, 0]
        d1y = x[i, 1] - x[im, 1]
        d2x = x[ip, 0] - x[i, 0]
        d2y = x[ip, 1] - x[i, 1]
        tx = d1x * (h2 / h1) + d2x * (h1 / h2)
        ty = d1y * (h2 / h1) + d2y * (h1 / h2)
        tn = math.sqrt(tx * tx + ty * ty)
        tx /= tn
        ty /= tn
        nu[i, 0] = ty
        nu[i, 1] = -tx
        cx = x[ip, 0] - x[im, 0]
        cy = x[ip, 1] - x[im, 1]
        chord = math.sqrt(cx * cx + cy * cy)
        k[i] = 2.0 * (d1x * d2y - d1y * d2x) / (h1 * h2 * chord)
    return nu, k, h


@njit(cache=True)
def _orient(ax, ay, bx, by, cx, cy):
    # +1 left turn, -1 right turn, 0 exactly collinear, 2 undecided in floats
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright
    detsum = abs(detleft) + abs(detright)
    if detsum == 0.0:
        return 0
    bound = _CCW_ERRBOUND * detsum
    if det > bound:
        return 1
    if -det > bound:
        return -1
    return 2


@njit(cache=True)
def _on_box(ax, ay, bx, by, px, py):
    return (min(ax, bx) <= px <= max(ax, bx)) and (min(ay, by) <= py <= max(ay, by))


@njit(cache=True)
def _segments_cross(x, i, j):
    n = x.shape[0]
    i2 = i + 1 if i < n - 1 else 0
    j2 = j + 1 if j < n - 1 else 0
    ax, ay = x[i, 0], x[i, 1]
    bx, by = x[i2, 0], x[i2, 1]
    cx, cy = x[j, 0], x[j, 1]
    dx, dy = x[j2, 0], x[j2, 1]
    o1 = _orient(ax, ay, bx, by, cx, cy)
    o2 = _orient(ax, ay, bx, by, dx, dy)
    o3 = _orient(cx, cy, dx, dy, ax, ay)
    o4 = _orient(cx, cy, dx, dy, bx, by)
    if o1 == 2 or o2 == 2 or o3 == 2 or o4 == 2:
        return UNCERTAIN
    if o1 * o2 < 0 and o3 * o4 < 0:
        return CROSSING
    if o1 == 0 and _on_box(ax, ay, bx, by, cx, cy):
        return CROSSING
    if o2 == 0 and _on_box(ax, ay, bx, by, dx, dy):
        return CROSSING
    if o3 == 0 and _on_box(cx, cy, dx, dy, ax, ay):
        return CROSSING
    if o4 == 0 and _on_box(cx, cy, dx, dy, bx, by):
        return CROSSING
    return CLEAN


@njit(cache=True)
def _adjacent_fold(x, i):
    # segments i-1 and i share node i; they overlap only if the path reverses
    n = x.shape[0]
    im = i - 1 if i > 0 else n - 1
    ip = i + 1 if i < n - 1 else 0
    o = _orient(x[im, 0], x[im, 1], x[i, 0], x[i, 1], x[ip, 0], x[ip, 1])
    if o == 2:
        return UNCERTAIN
    if o != 0:
        return CLEAN
    dot = (x[i, 0] - x[im, 0]) * (x[ip, 0] - x[i, 0]) + (x[i, 1] - x[im, 1]) * (
        x[ip, 1] - x[i, 1]
    )
    return CROSSING if dot < 0.0 else CLEAN


@njit(cache=True)
def _insertion_sort(order, key):
    # stable; linear time when the previous step's order is nearly right
    for a in range(1, order.shape[0]):
        item = order[a]
        v = key[item]
        b = a - 1
        while b >= 0 and key[order[b]] > v:
            order[b + 1] = order[b]
            b -= 1
        order[b + 1] = item


@njit(cache=True)
def sweep(x, stop_at_uncertain):
    order = np.arange(x.shape[0])
    return sweep_ordered(x, stop_at_uncertain, order)


@njit(cache=True)
def sweep_ordered(x, stop_at_uncertain, order):
    """Sweep over x-sorted segment boxes.

    Returns ``(flag, i, j, uncertain)`` where ``flag`` is CLEAN/CROSSING/
    UNCERTAIN for the first decisive pair and ``uncertain`` lists the pairs
    (rows ``i, j``; ``i == j`` marks a fold at node ``i``) whose orientation
    signs floating point could not settle.
    """
    n = x.shape[0]
    unc = np.empty((0, 2), dtype=np.int64)
    n_unc = 0
    buf = np.empty((16, 2), dtype=np.int64)
    for i in range(n):
        f = _adjacent_fold(x, i)
        if f == CROSSING:
            return CROSSING, i, i, buf[:n_unc]
        if f == UNCERTAIN:
            if stop_at_uncertain:
                return UNCERTAIN, i, i, buf[:n_unc]
            if n_unc == buf.shape[0]:
                nb = np.empty((2 * n_unc, 2), dtype=np.int64)
                nb[:n_unc] = buf
                buf = nb
            buf[n_unc, 0] = i
            buf[n_unc, 1] = i
            n_unc += 1
    xmin = np.empty(n)
    xmax = np.empty(n)
    ymin = np.empty(n)
    ymax = np.empty(n)
    for i in range(n):
        j = i + 1 if i < n - 1 else 0
        xmin[i] = min(x[i, 0], x[j, 0])
        xmax[i] = max(x[i, 0], x[j, 0])
        ymin[i] = min(x[i, 1], x[j, 1])
        ymax[i] = max(x[i, 1], x[j, 1])
    _insertion_sort(order, xmin)
    for a in range(n):
        i = order[a]
        for b in range(a + 1, n):
            j = order[b]
            if xmin[j] > xmax[i]:
                break
            d = abs(i - j)
            if d == 1 or d == n - 1:
                continue
            if ymin[j] > ymax[i] or ymin[i] > ymax[j]:
                continue
            f = _segments_cross(x, i, j)
            if f == CROSSING:
                return CROSSING, min(i, j), max(i, j), buf[:n_unc]
            if f == UNCERTAIN:
                if stop_at_uncertain:
                    return UNCERTAIN, min(i, j), max(i, j), buf[:n_unc]
                if n_unc == buf.shape[0]:
                    nb = np.empty((2 * n_unc, 2), dtype=np.int64)
                    nb[:n_unc] = buf
                    buf = nb
                buf[n_unc, 0] = min(i, j)
                buf[n_unc, 1] = max(i, j)
                n_unc += 1
    unc = buf[:n_unc]
    return CLEAN, -1, -1, unc


@njit(cache=True)
def advance(x, t, cfl, dt_max, eps_h, eps_u, max_steps, t_sample, h_level):
    """Explicit Euler steps of ``x' = nu / H`` until something needs attention.

    Stops before stepping when H_min <= eps_h, u_min <= eps_u, H_min <=
    h_level or t >= t_sample; after ``max_steps`` accepted steps; or when a
    step keeps self-intersecting after eight halvings of dt. Undecidable
    orientation tests count as intersections.
    """
    x = x.copy()
    order = np.arange(x.shape[0])
    steps = 0
    dt_last = 0.0
    rejections = 0
    status = MAX_STEPS
    n = x.shape[0]
    H = np.empty(n)
    xn = np.empty_like(x)
    while steps < max_steps:
        nu, k, h = normals_and_curvature(x)
        hmin = np.inf
        umin = np.inf
        for i in range(n):
            H[i] = k[i] + nu[i, 1] / x[i, 1]
            hmin = min(hmin, H[i])
            umin = min(umin, x[i, 1])
        if hmin <= eps_h:
            status = H_MIN_REACHED
            break
        if umin <= eps_u:
            status = PINCH_DETECTED
            break
        if hmin <= h_level:
            status = H_LEVEL
            break
        if t >= t_sample:
            status = SAMPLE_TIME
            break
        dt = min(dt_max, cfl * h.min() ** 2 * hmin**2)
        t_new = t + dt
        if dt >= t_sample - t:
            dt = t_sample - t
            t_new = t_sample
        accepted = False
        for attempt in range(9):
            for i in range(n):
                s = dt / H[i]
                xn[i, 0] = x[i, 0] + s * nu[i, 0]
                xn[i, 1] = x[i, 1] + s * nu[i, 1]
            flag, _, _, _ = sweep_ordered(xn, True, order)
            if flag == CLEAN:
                accepted = True
                break
            rejections += 1
            dt *= 0.5
            t_new = t + dt
        if not accepted:
            status = STRUCTURE_VIOLATED
            break
        x, xn = xn, x
        t = t_new
        dt_last = dt
        steps += 1
    return x, t, steps, dt_last, status, rejections
