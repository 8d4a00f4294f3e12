"""Reference values computed independently of the package under test."""

import math
from fractions import Fraction

import numpy as np


def torus_point(R, r, phi):
    return np.array([r * math.sin(phi), R + r * math.cos(phi)])


def torus_normal(phi):
    return np.array([math.sin(phi), math.cos(phi)])


def torus_p(R, r, phi):
    return math.cos(phi) / (R + r * math.cos(phi))


def torus_H(R, r, phi):
    return 1.0 / r + torus_p(R, r, phi)


def torus_area(R, r):
    # Pappus
    return 4.0 * math.pi**2 * R * r


def circle_nodes(center, radius, n, phase=0.0):
    t = phase - 2.0 * np.pi * np.arange(n) / n
    return np.c_[center[0] + radius * np.sin(t), center[1] + radius * np.cos(t)]


def ellipse_nodes(center, a, b, n):
    """Counterclockwise ellipse with semi-axis ``a`` along x1, ``b`` along x2."""
    t = 2.0 * np.pi * np.arange(n) / n
    return np.c_[center[0] + a * np.cos(t), center[1] + b * np.sin(t)]


def _orient(p, q, r):
    p, q, r = ([Fraction(float(v)) for v in pt] for pt in (p, q, r))
    d = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return (d > 0) - (d < 0)


def _on_segment(p, q, r):
    return min(p[0], q[0]) <= r[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])


def segments_intersect(a, b, c, d):
    """Closed-segment intersection in exact rational arithmetic."""
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return (
        (o1 == 0 and _on_segment(a, b, c))
        or (o2 == 0 and _on_segment(a, b, d))
        or (o3 == 0 and _on_segment(c, d, a))
        or (o4 == 0 and _on_segment(c, d, b))
    )


def brute_force_simple(nodes):
    """O(N^2) exact test: no two non-adjacent edges meet, adjacent ones only fold if reversed."""
    x = np.asarray(nodes)
    n = len(x)
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if segments_intersect(x[i], x[(i + 1) % n], x[j], x[(j + 1) % n]):
                return False
    for i in range(n):
        p, q, r = x[i - 1], x[i], x[(i + 1) % n]
        if _orient(p, q, r) == 0 and np.dot(q - p, r - q) < 0:
            return False
    return True
