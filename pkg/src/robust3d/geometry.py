"""Rotated-cuboid geometry: corners, bird's-eye-view convex clipping, 3D IoU
and point-in-box counting.

Boxes are yaw-only (no pitch/roll), so 3D IoU decomposes into BEV polygon
overlap times vertical extent overlap. BEV intersection uses
Sutherland-Hodgman clipping of convex counter-clockwise polygons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Box3D, PointCloud

#: Vertices closer than this (meters) merge during clipping, and
#: intersections with smaller area collapse to empty. Kills sliver polygons
#: born from floating-point noise on edge-touching boxes.
MERGE_EPS = 1e-9


@dataclass(frozen=True)
class ConvexPolygon2:
    """Convex polygon, vertices counter-clockwise; may be explicitly empty."""

    vertices: tuple[tuple[float, float], ...]

    @classmethod
    def empty(cls) -> "ConvexPolygon2":
        return cls(())

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    def area(self) -> float:
        """Shoelace area (non-negative for CCW input)."""
        v = self.vertices
        n = len(v)
        if n < 3:
            return 0.0
        s = 0.0
        for i in range(n):
            x0, y0 = v[i]
            x1, y1 = v[(i + 1) % n]
            s += x0 * y1 - x1 * y0
        return 0.5 * s


def box_corners(box: Box3D) -> np.ndarray:
    """The 8 cuboid corners, shape (8, 3), in a fixed documented order.

    Local-frame corner order (before yaw rotation and translation), with
    hl = l/2, hw = w/2, hh = h/2:

        0 (+hl, +hw, -hh)   4 (+hl, +hw, +hh)
        1 (-hl, +hw, -hh)   5 (-hl, +hw, +hh)
        2 (-hl, -hw, -hh)   6 (-hl, -hw, +hh)
        3 (+hl, -hw, -hh)   7 (+hl, -hw, +hh)

    i.e. bottom face counter-clockwise (viewed from above) then top face in
    the same x-y order. Yaw rotates counter-clockwise about +z.
    """
    hl, hw, hh = box.l / 2.0, box.w / 2.0, box.h / 2.0
    local = np.array(
        [
            [+hl, +hw, -hh],
            [-hl, +hw, -hh],
            [-hl, -hw, -hh],
            [+hl, -hw, -hh],
            [+hl, +hw, +hh],
            [-hl, +hw, +hh],
            [-hl, -hw, +hh],
            [+hl, -hw, +hh],
        ]
    )
    c, s = math.cos(box.yaw), math.sin(box.yaw)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return local @ rot.T + np.array([box.cx, box.cy, box.cz])


def bev_polygon(box: Box3D) -> ConvexPolygon2:
    """Top-down footprint of the box, counter-clockwise."""
    corners = box_corners(box)
    return ConvexPolygon2(tuple((float(x), float(y)) for x, y in corners[:4, :2]))


def _dedupe(vertices: list[tuple[float, float]]) -> list[tuple[float, float]]:
    out: list[tuple[float, float]] = []
    for v in vertices:
        if not out or math.hypot(v[0] - out[-1][0], v[1] - out[-1][1]) > MERGE_EPS:
            out.append(v)
    if len(out) > 1 and math.hypot(out[0][0] - out[-1][0], out[0][1] - out[-1][1]) <= MERGE_EPS:
        out.pop()
    return out


def polygon_intersection(a: ConvexPolygon2, b: ConvexPolygon2) -> ConvexPolygon2:
    """Convex intersection via Sutherland-Hodgman: clip a against b's edges.

    Degenerate results (fewer than 3 distinct vertices, or area below
    MERGE_EPS) collapse to the explicit empty polygon, so edge-touching
    boxes intersect in nothing rather than a sliver.
    """
    if a.is_empty or b.is_empty:
        return ConvexPolygon2.empty()

    output = list(a.vertices)
    clip = b.vertices
    n_clip = len(clip)
    for i in range(n_clip):
        cp1 = clip[i]
        cp2 = clip[(i + 1) % n_clip]
        if not output:
            return ConvexPolygon2.empty()
        source = output
        output = []
        ex, ey = cp2[0] - cp1[0], cp2[1] - cp1[1]

        def inside(p):
            # left of (or on) the directed clip edge for a CCW clip polygon
            return ex * (p[1] - cp1[1]) - ey * (p[0] - cp1[0]) >= 0.0

        def intersect(p, q):
            dx, dy = q[0] - p[0], q[1] - p[1]
            denom = ex * dy - ey * dx
            t = (ex * (cp1[1] - p[1]) - ey * (cp1[0] - p[0])) / denom
            return (p[0] + t * dx, p[1] + t * dy)

        s = source[-1]
        s_in = inside(s)
        for e in source:
            e_in = inside(e)
            if e_in:
                if not s_in:
                    output.append(intersect(s, e))
                output.append(e)
            elif s_in:
                output.append(intersect(s, e))
            s, s_in = e, e_in

    output = _dedupe(output)
    if len(output) < 3:
        return ConvexPolygon2.empty()
    poly = ConvexPolygon2(tuple(output))
    if poly.area() <= MERGE_EPS:
        return ConvexPolygon2.empty()
    return poly


def bev_intersection_area(a: Box3D, b: Box3D) -> float:
    return polygon_intersection(bev_polygon(a), bev_polygon(b)).area()


def iou_bev(a: Box3D, b: Box3D) -> float:
    """Bird's-eye-view IoU of the yaw-rotated footprints."""
    if a == b:
        return 1.0  # exact for the identity case; clipping a box against
        # itself would otherwise lose a few ulp
    inter = bev_intersection_area(a, b)
    if inter <= 0.0:
        return 0.0
    union = a.l * a.w + b.l * b.w - inter
    return inter / union


def _z_overlap(a: Box3D, b: Box3D) -> float:
    top = min(a.cz + a.h / 2.0, b.cz + b.h / 2.0)
    bot = max(a.cz - a.h / 2.0, b.cz - b.h / 2.0)
    return max(0.0, top - bot)


def iou_3d(a: Box3D, b: Box3D) -> float:
    """Volumetric IoU: BEV intersection area times vertical overlap."""
    if a == b:
        return 1.0
    dz = _z_overlap(a, b)
    if dz <= 0.0:
        return 0.0
    inter = bev_intersection_area(a, b) * dz
    if inter <= 0.0:
        return 0.0
    union = a.volume + b.volume - inter
    return inter / union


def points_in_box_mask(xyz: np.ndarray, box: Box3D) -> np.ndarray:
    """Boolean mask of points inside or on the cuboid (boundary inclusive)."""
    if xyz.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    pts = xyz.astype(np.float64) - np.array([box.cx, box.cy, box.cz])
    c, s = math.cos(box.yaw), math.sin(box.yaw)
    # inverse yaw rotation into the box frame
    local_x = c * pts[:, 0] + s * pts[:, 1]
    local_y = -s * pts[:, 0] + c * pts[:, 1]
    return (
        (np.abs(local_x) <= box.l / 2.0)
        & (np.abs(local_y) <= box.w / 2.0)
        & (np.abs(pts[:, 2]) <= box.h / 2.0)
    )


def points_in_box(cloud: PointCloud, box: Box3D) -> int:
    """Number of cloud points inside or on the cuboid boundary."""
    return int(np.count_nonzero(points_in_box_mask(cloud.xyz, box)))
