"""Canonical data model: clouds, images, boxes, frames, severities, seeding.

Everything downstream (corruptions, geometry, evaluation) builds on the types
in this module. All types are immutable values after construction; corruption
operations take explicit seeds and never touch hidden global state.

Seeding policy
--------------
Per-frame seeds are a pure function of (global_seed, frame_id, corruption
kind, severity). The mixing hash is pinned so every component reproduces it
bit-exactly:

    message = global_seed as 8-byte little-endian unsigned
              || frame_id UTF-8 || 0x1F
              || kind name UTF-8 || 0x1F
              || severity level byte (1, 2 or 3)
    h    = FNV-1a 64-bit over message
           (offset 0xcbf29ce484222325, prime 0x100000001b3)
    seed = splitmix64 finalizer of h:
           z ^= z >> 30; z *= 0xbf58476d1ce4e5b9
           z ^= z >> 27; z *= 0x94d049bb133111eb
           z ^= z >> 31          (all arithmetic mod 2**64)

The project-wide random generator is numpy's PCG64 (O'Neill's permuted
congruential generator, 128-bit state, 64-bit output) wrapped in
``np.random.Generator``; construct it only through :func:`make_rng` so all
components share one stream definition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

_MASK64 = (1 << 64) - 1
_TWO_PI = 2.0 * math.pi

#: Element type of every stored cloud / image array.  Sensor payloads are
#: serialized as IEEE-754 binary32; keeping them binary32 in memory makes
#: file round-trips bit-exact.  Intermediate math runs in binary64.
ARRAY_DTYPE = np.float32


class Severity(Enum):
    """Corruption intensity, three levels (S1 < S2 < S3)."""

    S1 = 1
    S2 = 2
    S3 = 3

    @property
    def level(self) -> int:
        return self.value

    @classmethod
    def from_level(cls, level: int) -> "Severity":
        return cls(level)

    @property
    def index(self) -> int:
        """0-based index into per-severity parameter tables."""
        return self.value - 1


class CorruptionKind(Enum):
    """The eleven supported corruptions; values are the canonical CLI names."""

    LIDAR_GAUSSIAN = "lidar_gaussian"
    CUTOUT = "cutout"
    CROSSTALK = "crosstalk"
    DENSITY_DECREASE = "density_decrease"
    FOV_LOSS = "fov_loss"
    CAMERA_GAUSSIAN = "camera_gaussian"
    FOG = "fog"
    SUNLIGHT = "sunlight"
    SPATIAL_MISALIGN = "spatial_misalign"
    TEMPORAL_MISALIGN_CAMERA = "temporal_misalign_camera"
    TEMPORAL_MISALIGN_LIDAR = "temporal_misalign_lidar"


LIDAR_KINDS = (
    CorruptionKind.LIDAR_GAUSSIAN,
    CorruptionKind.CUTOUT,
    CorruptionKind.CROSSTALK,
    CorruptionKind.DENSITY_DECREASE,
    CorruptionKind.FOV_LOSS,
)
CAMERA_KINDS = (
    CorruptionKind.CAMERA_GAUSSIAN,
    CorruptionKind.FOG,
    CorruptionKind.SUNLIGHT,
)
CROSS_KINDS = (
    CorruptionKind.SPATIAL_MISALIGN,
    CorruptionKind.TEMPORAL_MISALIGN_CAMERA,
    CorruptionKind.TEMPORAL_MISALIGN_LIDAR,
)


class Occlusion(Enum):
    """Per-person visibility annotation; values are the on-disk strings."""

    FULLY_VISIBLE = "fully_visible"
    MOSTLY_VISIBLE = "mostly_visible"
    SEVERELY_OCCLUDED = "severely_occluded"
    FULLY_OCCLUDED = "fully_occluded"


def normalize_yaw(yaw: float) -> float:
    """Map an angle (radians) into (-pi, pi]."""
    y = math.remainder(float(yaw), _TWO_PI)
    if y <= -math.pi:
        y = math.pi
    return y


def round_half_away(x: float) -> int:
    """Round half away from zero; fixed project-wide for exact-count contracts."""
    if x >= 0:
        return int(math.floor(x + 0.5))
    return int(math.ceil(x - 0.5))


# ---------------------------------------------------------------------------
# seeding
# ---------------------------------------------------------------------------


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & _MASK64
    return h


def mix64(z: int) -> int:
    """splitmix64 finalizer; full-avalanche 64-bit mix."""
    z &= _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


@dataclass(frozen=True)
class SeedPolicy:
    """Root of all randomness; 64-bit global seed."""

    global_seed: int = 0


@dataclass(frozen=True)
class CorruptionSpec:
    """One corruption to apply: kind + severity + optional parameter overrides.

    Override keys are per-kind scalars (e.g. ``sigma_m`` for lidar_gaussian,
    ``ratio``/``sigma_m`` for crosstalk); absent keys resolve to the defaults
    tabulated in the corruption modules.
    """

    kind: CorruptionKind
    severity: Severity
    overrides: Mapping[str, float] | None = None

    def override(self, key: str, default: float) -> float:
        if self.overrides and key in self.overrides:
            return float(self.overrides[key])
        return default


def derive_frame_seed(policy: SeedPolicy, frame_id: str, spec: CorruptionSpec) -> int:
    """64-bit per-frame seed; pure function of (global_seed, frame, kind, severity)."""
    msg = (
        (policy.global_seed & _MASK64).to_bytes(8, "little")
        + frame_id.encode("utf-8")
        + b"\x1f"
        + spec.kind.value.encode("utf-8")
        + b"\x1f"
        + bytes([spec.severity.level])
    )
    return mix64(fnv1a64(msg))


def derive_stream_seed(seed: int, label: str) -> int:
    """Sub-stream seed (e.g. one per camera) split off a frame seed."""
    return mix64((seed & _MASK64) ^ fnv1a64(label.encode("utf-8")))


def make_rng(seed: int) -> np.random.Generator:
    """The pinned project-wide generator: numpy PCG64 behind ``Generator``."""
    return np.random.Generator(np.random.PCG64(seed))


# ---------------------------------------------------------------------------
# geometry-bearing value types
# ---------------------------------------------------------------------------


def _frozen_array(values, dtype, shape_hint=None) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=dtype)
    if shape_hint is not None and arr.size == 0:
        arr = arr.reshape(shape_hint)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Point3:
    """A single LiDAR return in meters, sensor (robot) frame."""

    x: float
    y: float
    z: float
    intensity: float | None = None


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Ordered point set backed by an (N, 3) float32 array.

    Point order is load-bearing: subset corruptions must return a
    subsequence, and file round-trips preserve order bit-exactly.
    """

    xyz: np.ndarray
    frame_id: str = ""
    intensity: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "xyz", _frozen_array(self.xyz, ARRAY_DTYPE, (0, 3)))
        if self.xyz.ndim != 2 or self.xyz.shape[1] != 3:
            raise ValueError(f"xyz must be (N, 3), got {self.xyz.shape}")
        if self.intensity is not None:
            inten = _frozen_array(self.intensity, ARRAY_DTYPE)
            if inten.shape != (self.xyz.shape[0],):
                raise ValueError("intensity length must match point count")
            object.__setattr__(self, "intensity", inten)

    @classmethod
    def from_points(cls, points: Iterable[Point3], frame_id: str = "") -> "PointCloud":
        pts = list(points)
        xyz = np.array([[p.x, p.y, p.z] for p in pts], dtype=ARRAY_DTYPE).reshape(-1, 3)
        intensities = [p.intensity for p in pts]
        if any(v is not None for v in intensities):
            inten = np.array([0.0 if v is None else v for v in intensities], dtype=ARRAY_DTYPE)
            return cls(xyz, frame_id, inten)
        return cls(xyz, frame_id)

    @property
    def n(self) -> int:
        return self.xyz.shape[0]

    def points(self) -> list[Point3]:
        if self.intensity is None:
            return [Point3(*map(float, row)) for row in self.xyz]
        return [
            Point3(float(x), float(y), float(z), float(i))
            for (x, y, z), i in zip(self.xyz, self.intensity)
        ]

    def take(self, indices: np.ndarray, frame_id: str | None = None) -> "PointCloud":
        """Subsequence by (sorted) index array; survivors stay bit-identical."""
        inten = None if self.intensity is None else self.intensity[indices]
        return PointCloud(self.xyz[indices], self.frame_id if frame_id is None else frame_id, inten)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointCloud):
            return NotImplemented
        if self.frame_id != other.frame_id:
            return False
        if not np.array_equal(self.xyz, other.xyz):
            return False
        if (self.intensity is None) != (other.intensity is None):
            return False
        return self.intensity is None or np.array_equal(self.intensity, other.intensity)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True, eq=False)
class CameraImage:
    """RGB raster with intensities normalized to [0, 1], shape (H, W, 3) float32."""

    pixels: np.ndarray
    camera_id: str = ""

    CHANNELS = 3

    def __post_init__(self):
        object.__setattr__(self, "pixels", _frozen_array(self.pixels, ARRAY_DTYPE))
        if self.pixels.ndim != 3 or self.pixels.shape[2] != self.CHANNELS:
            raise ValueError(f"pixels must be (H, W, 3), got {self.pixels.shape}")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CameraImage):
            return NotImplemented
        return self.camera_id == other.camera_id and np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True, eq=False)
class Calibration:
    """Camera-from-LiDAR extrinsics: 3x3 rotation + translation (meters).

    ``perturbed`` marks calibrations produced by spatial misalignment; those
    are exempt from the orthonormality invariant (the broken matrix is the
    corruption).
    """

    rotation: np.ndarray
    translation: np.ndarray
    camera_id: str = ""
    perturbed: bool = False

    def __post_init__(self):
        rot = _frozen_array(self.rotation, np.float64)
        tr = _frozen_array(self.translation, np.float64)
        if rot.shape != (3, 3):
            raise ValueError(f"rotation must be 3x3, got {rot.shape}")
        if tr.shape != (3,):
            raise ValueError(f"translation must be a 3-vector, got {tr.shape}")
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", tr)

    @classmethod
    def identity(cls, camera_id: str = "") -> "Calibration":
        return cls(np.eye(3), np.zeros(3), camera_id)

    def orthonormality_defect(self) -> float:
        """max-abs entry of R^T R - I."""
        return float(np.max(np.abs(self.rotation.T @ self.rotation - np.eye(3))))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Calibration):
            return NotImplemented
        return (
            self.camera_id == other.camera_id
            and self.perturbed == other.perturbed
            and np.array_equal(self.rotation, other.rotation)
            and np.array_equal(self.translation, other.translation)
        )


@dataclass(frozen=True)
class Box3D:
    """Oriented cuboid: center (m), dimensions (m), yaw about the vertical axis.

    Yaw is measured counter-clockwise from the +x axis; ``l`` runs along the
    yaw-rotated local x-axis, ``w`` along local y, ``h`` along global z. Yaw
    normalizes to (-pi, pi] at construction.
    """

    cx: float
    cy: float
    cz: float
    l: float
    w: float
    h: float
    yaw: float = 0.0

    def __post_init__(self):
        for name in ("cx", "cy", "cz", "l", "w", "h"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "yaw", normalize_yaw(self.yaw))

    @property
    def center(self) -> np.ndarray:
        return np.array([self.cx, self.cy, self.cz])

    @property
    def horizontal_distance(self) -> float:
        return math.hypot(self.cx, self.cy)

    @property
    def volume(self) -> float:
        return self.l * self.w * self.h


@dataclass(frozen=True)
class GroundTruth:
    box: Box3D
    occlusion: Occlusion
    track_id: str = ""


@dataclass(frozen=True)
class Detection:
    box: Box3D
    score: float
    frame_id: str = ""


@dataclass(frozen=True, eq=False)
class FrameSample:
    """One synchronized multi-sensor sample.

    ``images`` and ``calibrations`` correspond one-to-one by camera_id
    (five views in JRDB-style data; any count is accepted, including zero
    for LiDAR-only fixtures).
    """

    frame_id: str
    sequence_id: str
    index_in_sequence: int
    cloud: PointCloud
    images: tuple[CameraImage, ...] = ()
    calibrations: tuple[Calibration, ...] = ()
    ground_truth: tuple[GroundTruth, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        object.__setattr__(self, "calibrations", tuple(self.calibrations))
        object.__setattr__(self, "ground_truth", tuple(self.ground_truth))

    def camera_ids(self) -> list[str]:
        return [img.camera_id for img in self.images]

    def calibration_for(self, camera_id: str) -> Calibration:
        for c in self.calibrations:
            if c.camera_id == camera_id:
                return c
        raise KeyError(f"no calibration for camera {camera_id!r}")

    def replace(self, **kwargs) -> "FrameSample":
        fieldnames = ("frame_id", "sequence_id", "index_in_sequence", "cloud",
                      "images", "calibrations", "ground_truth")
        values = {name: getattr(self, name) for name in fieldnames}
        values.update(kwargs)
        return FrameSample(**values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FrameSample):
            return NotImplemented
        return (
            self.frame_id == other.frame_id
            and self.sequence_id == other.sequence_id
            and self.index_in_sequence == other.index_in_sequence
            and self.cloud == other.cloud
            and self.images == other.images
            and self.calibrations == other.calibrations
            and self.ground_truth == other.ground_truth
        )


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

_ORTHO_TOL = 1e-6


def validate_frame(frame: FrameSample) -> list[str]:
    """Check every type invariant; returns one message per violation.

    Validation never raises: a malformed frame yields messages naming the
    offending field and rule, a well-formed frame yields [].
    """
    violations: list[str] = []

    if frame.index_in_sequence < 0:
        violations.append(f"index_in_sequence: must be non-negative, got {frame.index_in_sequence}")

    if not np.all(np.isfinite(frame.cloud.xyz)):
        violations.append("cloud.xyz: all coordinates must be finite")
    if frame.cloud.intensity is not None:
        inten = frame.cloud.intensity
        if not np.all(np.isfinite(inten)):
            violations.append("cloud.intensity: values must be finite")
        elif inten.size and (inten.min() < 0.0 or inten.max() > 1.0):
            violations.append("cloud.intensity: values must lie in [0, 1]")

    for i, img in enumerate(frame.images):
        px = img.pixels
        if not np.all(np.isfinite(px)):
            violations.append(f"images[{i}].pixels: values must be finite")
        elif px.size and (px.min() < 0.0 or px.max() > 1.0):
            violations.append(f"images[{i}].pixels: values must lie in [0, 1]")

    image_ids = [img.camera_id for img in frame.images]
    calib_ids = [c.camera_id for c in frame.calibrations]
    if sorted(image_ids) != sorted(calib_ids):
        violations.append(
            f"calibrations: camera ids {sorted(calib_ids)} do not match images {sorted(image_ids)}"
        )
    for i, calib in enumerate(frame.calibrations):
        if not (np.all(np.isfinite(calib.rotation)) and np.all(np.isfinite(calib.translation))):
            violations.append(f"calibrations[{i}]: entries must be finite")
        elif not calib.perturbed and calib.orthonormality_defect() >= _ORTHO_TOL:
            violations.append(
                f"calibrations[{i}].rotation: pristine calibration must be orthonormal "
                f"(defect {calib.orthonormality_defect():.3g})"
            )

    for i, gt in enumerate(frame.ground_truth):
        box = gt.box
        fields = (box.cx, box.cy, box.cz, box.l, box.w, box.h, box.yaw)
        if not all(math.isfinite(v) for v in fields):
            violations.append(f"ground_truth[{i}].box: all fields must be finite")
            continue
        if box.l <= 0 or box.w <= 0 or box.h <= 0:
            violations.append(
                f"ground_truth[{i}].box: dimensions must be positive "
                f"(l={box.l}, w={box.w}, h={box.h})"
            )
        if not (-math.pi < box.yaw <= math.pi):
            violations.append(f"ground_truth[{i}].box: yaw must lie in (-pi, pi], got {box.yaw}")

    return violations
