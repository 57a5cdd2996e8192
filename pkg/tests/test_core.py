import math

import numpy as np
import pytest

from robust3d import (
    Box3D,
    Calibration,
    CameraImage,
    CorruptionKind,
    CorruptionSpec,
    FrameSample,
    GroundTruth,
    Occlusion,
    Point3,
    PointCloud,
    SeedPolicy,
    Severity,
    derive_frame_seed,
    derive_stream_seed,
    make_rng,
    normalize_yaw,
    round_half_away,
    validate_frame,
)
from robust3d.geometry import box_corners


def make_frame(**overrides):
    cloud = PointCloud(np.array([[1.0, 2.0, 0.5], [3.0, -1.0, 1.0]], dtype=np.float32), "f0")
    img = CameraImage(np.full((4, 6, 3), 0.5, dtype=np.float32), "cam0")
    calib = Calibration.identity("cam0")
    gt = GroundTruth(Box3D(1.0, 2.0, 0.9, 0.6, 0.6, 1.8, 0.3), Occlusion.FULLY_VISIBLE, "t0")
    fields = dict(
        frame_id="f0",
        sequence_id="s0",
        index_in_sequence=0,
        cloud=cloud,
        images=(img,),
        calibrations=(calib,),
        ground_truth=(gt,),
    )
    fields.update(overrides)
    return FrameSample(**fields)


# ---------------------------------------------------------------------------
# seeding
# ---------------------------------------------------------------------------

SPEC_S1 = CorruptionSpec(CorruptionKind.LIDAR_GAUSSIAN, Severity.S1)
SPEC_S2 = CorruptionSpec(CorruptionKind.LIDAR_GAUSSIAN, Severity.S2)


def test_seed_is_deterministic():
    p = SeedPolicy(42)
    assert derive_frame_seed(p, "a", SPEC_S1) == derive_frame_seed(p, "a", SPEC_S1)


def test_seed_regression_constants():
    # frozen from an independent evaluation of the documented hash
    p = SeedPolicy(42)
    assert derive_frame_seed(p, "a", SPEC_S1) == 15464622832746958005
    assert derive_frame_seed(p, "a", SPEC_S2) == 14227738657646384278
    assert derive_frame_seed(p, "b", SPEC_S1) == 7937681339352421641


def test_seed_differs_per_component():
    p = SeedPolicy(42)
    base = derive_frame_seed(p, "a", SPEC_S1)
    assert derive_frame_seed(p, "a", SPEC_S2) != base
    assert derive_frame_seed(p, "b", SPEC_S1) != base
    assert derive_frame_seed(SeedPolicy(43), "a", SPEC_S1) != base
    other_kind = CorruptionSpec(CorruptionKind.CUTOUT, Severity.S1)
    assert derive_frame_seed(p, "a", other_kind) != base


def test_seed_pure_function_under_repetition():
    rng = np.random.default_rng(0)
    kinds = list(CorruptionKind)
    cases = []
    for _ in range(100):
        policy = SeedPolicy(int(rng.integers(0, 2**63)))
        frame = f"frame_{rng.integers(0, 1000)}"
        spec = CorruptionSpec(kinds[rng.integers(len(kinds))], Severity(int(rng.integers(1, 4))))
        cases.append((policy, frame, spec, derive_frame_seed(policy, frame, spec)))
    for _ in range(100):  # 100 x 100 = 10^4 repeated calls
        for policy, frame, spec, expected in cases:
            assert derive_frame_seed(policy, frame, spec) == expected


def test_seed_ignores_overrides():
    p = SeedPolicy(1)
    with_ov = CorruptionSpec(CorruptionKind.CROSSTALK, Severity.S2, {"sigma_m": 9.0})
    without = CorruptionSpec(CorruptionKind.CROSSTALK, Severity.S2)
    assert derive_frame_seed(p, "x", with_ov) == derive_frame_seed(p, "x", without)


def test_stream_seed_differs_by_label():
    s = derive_frame_seed(SeedPolicy(0), "f", SPEC_S1)
    assert derive_stream_seed(s, "cam0") != derive_stream_seed(s, "cam1")
    assert derive_stream_seed(s, "cam0") == derive_stream_seed(s, "cam0")


def test_make_rng_reproducible():
    a = make_rng(123).normal(size=8)
    b = make_rng(123).normal(size=8)
    assert np.array_equal(a, b)


# ---------------------------------------------------------------------------
# yaw and rounding
# ---------------------------------------------------------------------------


def test_normalize_yaw_range_and_idempotence():
    for yaw in np.linspace(-20, 20, 401):
        y = normalize_yaw(yaw)
        assert -math.pi < y <= math.pi
        assert normalize_yaw(y) == y


def test_yaw_wraparound_preserves_corners():
    box = Box3D(1.0, -2.0, 0.5, 2.0, 1.0, 1.5, 0.7)
    shifted = Box3D(1.0, -2.0, 0.5, 2.0, 1.0, 1.5, 0.7 + 2 * math.pi)
    assert np.max(np.abs(box_corners(box) - box_corners(shifted))) < 1e-9


def test_round_half_away():
    assert round_half_away(0.5) == 1
    assert round_half_away(1.5) == 2
    assert round_half_away(2.4) == 2
    assert round_half_away(-0.5) == -1
    assert round_half_away(-1.5) == -2
    assert round_half_away(0.0) == 0
    assert round_half_away(60.0) == 60


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------


def test_pointcloud_round_trip_points():
    pts = [Point3(1.0, 2.0, 3.0, 0.5), Point3(-1.0, 0.0, 4.0, 0.25)]
    cloud = PointCloud.from_points(pts, "f")
    assert cloud.n == 2
    back = cloud.points()
    assert back[0].x == 1.0 and back[1].intensity == 0.25


def test_pointcloud_immutable():
    cloud = PointCloud(np.zeros((3, 3), dtype=np.float32))
    with pytest.raises(ValueError):
        cloud.xyz[0, 0] = 1.0


def test_pointcloud_empty_allowed():
    cloud = PointCloud(np.zeros((0, 3), dtype=np.float32))
    assert cloud.n == 0 and len(cloud) == 0


def test_box_yaw_normalized_at_construction():
    box = Box3D(0, 0, 0, 1, 1, 1, 3 * math.pi)
    assert -math.pi < box.yaw <= math.pi


def test_severity_levels():
    assert [s.level for s in Severity] == [1, 2, 3]
    assert Severity.from_level(2) is Severity.S2


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def test_validate_well_formed_frame():
    assert validate_frame(make_frame()) == []


def test_validate_flags_zero_dimension_box():
    bad = GroundTruth(Box3D(0, 0, 0, 0.0, 0.5, 1.7, 0.0), Occlusion.FULLY_VISIBLE, "t")
    out = validate_frame(make_frame(ground_truth=(bad,)))
    assert len(out) == 1 and "dimensions" in out[0]


def test_validate_flags_pixel_range():
    img = CameraImage(np.full((2, 2, 3), 1.5, dtype=np.float32), "cam0")
    out = validate_frame(make_frame(images=(img,)))
    assert any("pixel" in v and "[0, 1]" in v for v in out)


def test_validate_flags_nonfinite_cloud():
    cloud = PointCloud(np.array([[np.nan, 0, 0]], dtype=np.float32))
    out = validate_frame(make_frame(cloud=cloud))
    assert any("finite" in v for v in out)


def test_validate_flags_camera_mismatch():
    out = validate_frame(make_frame(calibrations=(Calibration.identity("other"),)))
    assert any("camera ids" in v for v in out)


def test_validate_flags_skewed_pristine_calibration():
    skew = Calibration(np.eye(3) + 0.01, np.zeros(3), "cam0")
    out = validate_frame(make_frame(calibrations=(skew,)))
    assert any("orthonormal" in v for v in out)


def test_validate_accepts_perturbed_calibration():
    skew = Calibration(np.eye(3) + 0.2, np.zeros(3), "cam0", perturbed=True)
    assert validate_frame(make_frame(calibrations=(skew,))) == []


def test_validate_never_raises_on_negative_index():
    out = validate_frame(make_frame(index_in_sequence=-1))
    assert any("non-negative" in v for v in out)
