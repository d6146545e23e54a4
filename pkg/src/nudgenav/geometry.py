"""Small planar-geometry helpers shared across the stack."""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def normalize_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(angle, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    elif a > math.pi:
        a -= TWO_PI
    return 0.0 if a == 0.0 else a


def normalize_angles(angles: np.ndarray) -> np.ndarray:
    """Vectorized wrap to (-pi, pi]."""
    a = np.fmod(angles, TWO_PI)
    a = np.where(a <= -math.pi, a + TWO_PI, a)
    a = np.where(a > math.pi, a - TWO_PI, a)
    return a + 0.0  # fold -0.0 into +0.0


def ang_diff(a: float, b: float) -> float:
    """Smallest signed difference a - b, in (-pi, pi]."""
    return normalize_angle(a - b)


def clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


def point_segment_distance(px: float, py: float,
                           ax: float, ay: float,
                           bx: float, by: float) -> float:
    dx, dy = bx - ax, by - ay
    len2 = dx * dx + dy * dy
    if len2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0)
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def point_in_convex_polygon(px: float, py: float,
                            vertices: tuple[tuple[float, float], ...]) -> bool:
    """Closed containment test; boundary points count as inside."""
    pos = neg = False
    n = len(vertices)
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        if cross > 0.0:
            pos = True
        elif cross < 0.0:
            neg = True
        if pos and neg:
            return False
    return True


def point_polygon_distance(px: float, py: float,
                           vertices: tuple[tuple[float, float], ...]) -> float:
    """Distance from a point to a convex polygon; 0 inside or on the boundary."""
    if point_in_convex_polygon(px, py, vertices):
        return 0.0
    n = len(vertices)
    best = math.inf
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        d = point_segment_distance(px, py, ax, ay, bx, by)
        if d < best:
            best = d
    return best


def polyline_distances(points: np.ndarray, polyline: np.ndarray) -> np.ndarray:
    """Distance from each query point to the nearest point of a polyline.

    points: (m, 2) queries; polyline: (n, 2) vertices, n >= 1.
    """
    points = np.asarray(points, dtype=float)
    polyline = np.asarray(polyline, dtype=float)
    if polyline.shape[0] == 1:
        return np.hypot(points[:, 0] - polyline[0, 0], points[:, 1] - polyline[0, 1])
    a = polyline[:-1]                      # (n-1, 2)
    d = polyline[1:] - a                   # (n-1, 2)
    len2 = np.einsum("ij,ij->i", d, d)
    len2 = np.where(len2 == 0.0, 1.0, len2)
    rel = points[:, None, :] - a[None, :, :]            # (m, n-1, 2)
    t = np.clip(np.einsum("mij,ij->mi", rel, d) / len2, 0.0, 1.0)
    proj = rel - t[:, :, None] * d[None, :, :]
    dist = np.sqrt(np.einsum("mij,mij->mi", proj, proj))
    return dist.min(axis=1)
