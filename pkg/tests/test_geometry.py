import math

import numpy as np

from robust3d import (
    Box3D,
    ConvexPolygon2,
    PointCloud,
    box_corners,
    iou_3d,
    iou_bev,
    points_in_box,
    points_in_box_mask,
    polygon_intersection,
)


def square(cx=0.0, cy=0.0, side=1.0):
    h = side / 2.0
    return ConvexPolygon2(((cx - h, cy - h), (cx + h, cy - h), (cx + h, cy + h), (cx - h, cy + h)))


def random_box(rng, span=6.0):
    return Box3D(
        rng.uniform(-span, span),
        rng.uniform(-span, span),
        rng.uniform(-2, 2),
        rng.uniform(0.3, 3.0),
        rng.uniform(0.3, 3.0),
        rng.uniform(0.3, 3.0),
        rng.uniform(-math.pi, math.pi),
    )


# ---------------------------------------------------------------------------
# corners
# ---------------------------------------------------------------------------


def test_unit_cube_corners():
    corners = box_corners(Box3D(0, 0, 0, 1, 1, 1, 0))
    expected = {(sx * 0.5, sy * 0.5, sz * 0.5) for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)}
    got = {tuple(np.round(c, 12)) for c in corners}
    assert got == expected


def test_yaw_pi_same_corner_set():
    a = {tuple(np.round(c, 9)) for c in box_corners(Box3D(1, 2, 0, 2, 1, 1, 0))}
    b = {tuple(np.round(c, 9)) for c in box_corners(Box3D(1, 2, 0, 2, 1, 1, math.pi))}
    assert a == b


def test_yaw_quarter_turn():
    corners = box_corners(Box3D(0, 0, 0, 2, 1, 1, math.pi / 2))
    xs = sorted({round(float(c[0]), 9) for c in corners})
    ys = sorted({round(float(c[1]), 9) for c in corners})
    zs = sorted({round(float(c[2]), 9) for c in corners})
    assert xs == [-0.5, 0.5] and ys == [-1.0, 1.0] and zs == [-0.5, 0.5]


def test_bottom_face_is_counter_clockwise():
    corners = box_corners(Box3D(0, 0, 0, 2, 1, 1, 0.3))[:4, :2]
    area2 = 0.0
    for i in range(4):
        x0, y0 = corners[i]
        x1, y1 = corners[(i + 1) % 4]
        area2 += x0 * y1 - x1 * y0
    assert area2 > 0


# ---------------------------------------------------------------------------
# polygon intersection
# ---------------------------------------------------------------------------


def test_identical_squares():
    p = square()
    out = polygon_intersection(p, p)
    assert abs(out.area() - 1.0) < 1e-12


def test_disjoint_squares():
    out = polygon_intersection(square(), square(cx=5.0))
    assert out.is_empty and out.area() == 0.0


def test_half_overlap_squares():
    out = polygon_intersection(square(), square(cx=0.5))
    assert abs(out.area() - 0.5) < 1e-12


def test_area_order_independent():
    rng = np.random.default_rng(1)
    for _ in range(300):
        a, b = random_box(rng, span=1.5), random_box(rng, span=1.5)
        from robust3d.geometry import bev_polygon

        pa, pb = bev_polygon(a), bev_polygon(b)
        assert abs(polygon_intersection(pa, pb).area() - polygon_intersection(pb, pa).area()) < 1e-12


def test_edge_touching_boxes_give_empty():
    out = polygon_intersection(square(), square(cx=1.0))
    assert out.is_empty


# ---------------------------------------------------------------------------
# IoU
# ---------------------------------------------------------------------------


def test_identical_boxes_iou_one():
    box = Box3D(1, 2, 3, 2, 1, 1.5, 0.4)
    assert iou_3d(box, box) == 1.0
    assert abs(iou_bev(box, box) - 1.0) < 1e-12


def test_rotated_square_bev():
    a = Box3D(0, 0, 0, 2, 2, 2, 0)
    b = Box3D(0, 0, 0, 2, 2, 2, math.pi / 4)
    assert abs(iou_bev(a, b) - 1 / math.sqrt(2)) < 1e-9
    # octagon area: 8 * (sqrt(2) - 1)
    from robust3d.geometry import bev_intersection_area

    assert abs(bev_intersection_area(a, b) - 8 * (math.sqrt(2) - 1)) < 1e-9


def test_offset_squares_bev():
    a = Box3D(0, 0, 0, 2, 2, 2, 0)
    b = Box3D(1, 0, 0, 2, 2, 2, 0)
    assert abs(iou_bev(a, b) - 1 / 3) < 1e-12  # inter 2, union 6


def test_offset_cubes_3d():
    a = Box3D(0, 0, 0, 2, 2, 2, 0)
    b = Box3D(1, 0, 0, 2, 2, 2, 0)
    assert abs(iou_3d(a, b) - 1 / 3) < 1e-12  # inter 4, union 12


def test_vertically_disjoint_boxes():
    a = Box3D(0, 0, 0, 2, 2, 2, 0)
    b = Box3D(0, 0, 5, 2, 2, 2, 0)
    assert iou_3d(a, b) == 0.0


def test_iou_symmetry_fuzz():
    rng = np.random.default_rng(2)
    for _ in range(500):
        a, b = random_box(rng), random_box(rng)
        assert abs(iou_3d(a, b) - iou_3d(b, a)) < 1e-12
        v = iou_3d(a, b)
        assert 0.0 <= v <= 1.0


def test_rigid_motion_invariance():
    rng = np.random.default_rng(3)
    for _ in range(200):
        a, b = random_box(rng, span=2.0), random_box(rng, span=2.0)
        base = iou_3d(a, b)
        theta = rng.uniform(-math.pi, math.pi)
        tx, ty, tz = rng.uniform(-10, 10, size=3)
        c, s = math.cos(theta), math.sin(theta)

        def move(box):
            x = c * box.cx - s * box.cy + tx
            y = s * box.cx + c * box.cy + ty
            return Box3D(x, y, box.cz + tz, box.l, box.w, box.h, box.yaw + theta)

        assert abs(iou_3d(move(a), move(b)) - base) < 1e-9


def monte_carlo_iou(a, b, n, rng):
    corners = np.vstack([box_corners(a), box_corners(b)])
    lo, hi = corners.min(axis=0), corners.max(axis=0)
    pts = rng.uniform(lo, hi, size=(n, 3))
    in_a = points_in_box_mask(pts, a)
    in_b = points_in_box_mask(pts, b)
    union = np.count_nonzero(in_a | in_b)
    if union == 0:
        return 0.0
    return np.count_nonzero(in_a & in_b) / union


def test_monte_carlo_oracle_agreement():
    rng = np.random.default_rng(4)
    checked = 0
    while checked < 40:  # the full 200-pair run lives in the acceptance suite
        a, b = random_box(rng, span=1.0), random_box(rng, span=1.0)
        if iou_3d(a, b) == 0.0:
            continue
        approx = monte_carlo_iou(a, b, 100_000, rng)
        assert abs(approx - iou_3d(a, b)) < 0.01
        checked += 1


# ---------------------------------------------------------------------------
# points in box
# ---------------------------------------------------------------------------


def test_point_at_center_counted():
    cloud = PointCloud(np.array([[1.0, 2.0, 3.0]], dtype=np.float32))
    assert points_in_box(cloud, Box3D(1, 2, 3, 1, 1, 1, 0.7)) == 1


def test_point_on_corner_counted():
    box = Box3D(0, 0, 0, 1, 1, 1, 0)
    cloud = PointCloud(np.array([[0.5, 0.5, 0.5]], dtype=np.float32))
    assert points_in_box(cloud, box) == 1


def test_point_just_outside_not_counted():
    box = Box3D(0, 0, 0, 1, 1, 1, 0)
    cloud = PointCloud(np.array([[0.5001, 0.0, 0.0]], dtype=np.float32))
    assert points_in_box(cloud, box) == 0


def test_uniform_count_matches_binomial():
    rng = np.random.default_rng(5)
    pts = rng.uniform(-2, 2, size=(1000, 3)).astype(np.float32)
    count = points_in_box(PointCloud(pts), Box3D(0, 0, 0, 1, 1, 1, 0))
    p = 1 / 64
    sigma = math.sqrt(1000 * p * (1 - p))
    assert abs(count - 1000 * p) <= 5 * sigma


def test_rotation_respected_in_counting():
    box = Box3D(0, 0, 0, 2, 0.5, 1, math.pi / 2)  # long axis now along y
    inside = PointCloud(np.array([[0.0, 0.9, 0.0]], dtype=np.float32))
    outside = PointCloud(np.array([[0.9, 0.0, 0.0]], dtype=np.float32))
    assert points_in_box(inside, box) == 1
    assert points_in_box(outside, box) == 0
