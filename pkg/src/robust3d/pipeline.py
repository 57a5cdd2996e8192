"""Dispatch a CorruptionSpec onto frames and sequences.

Per-frame seeds come from the seeding policy (see core); camera corruptions
further split one sub-stream per camera so the five views never share a
noise pattern. Temporal kinds need the whole sequence; everything else is
frame-local.
"""

from __future__ import annotations

from typing import Sequence

from .camera import camera_gaussian, fog, sunlight
from .core import (
    CameraImage,
    CorruptionKind,
    CorruptionSpec,
    FrameSample,
    SeedPolicy,
    derive_frame_seed,
    derive_stream_seed,
)
from .lidar import cutout, crosstalk, density_decrease, fov_loss, lidar_gaussian
from .misalign import spatial_misalign, temporal_misalign_camera, temporal_misalign_lidar

K = CorruptionKind


def _corrupt_images(frame: FrameSample, spec: CorruptionSpec, seed: int) -> tuple[CameraImage, ...]:
    ov = spec.overrides or {}
    out = []
    for img in frame.images:
        if spec.kind is K.CAMERA_GAUSSIAN:
            cam_seed = derive_stream_seed(seed, img.camera_id)
            out.append(camera_gaussian(img, spec.severity, cam_seed, sigma=ov.get("sigma")))
        elif spec.kind is K.FOG:
            out.append(fog(img, spec.severity, opacity=ov.get("opacity"), gray=ov.get("gray")))
        else:  # sunlight
            out.append(sunlight(img, spec.severity,
                                brightness_delta=ov.get("brightness_delta"),
                                contrast_factor=ov.get("contrast_factor")))
    return tuple(out)


def corrupt_frame(frame: FrameSample, spec: CorruptionSpec, policy: SeedPolicy) -> FrameSample:
    """Apply a frame-local corruption; temporal kinds need corrupt_sequence."""
    if spec.kind in (K.TEMPORAL_MISALIGN_CAMERA, K.TEMPORAL_MISALIGN_LIDAR):
        raise ValueError(f"{spec.kind.value} operates on sequences, not single frames")
    seed = derive_frame_seed(policy, frame.frame_id, spec)
    ov = spec.overrides or {}

    if spec.kind is K.LIDAR_GAUSSIAN:
        cloud = lidar_gaussian(frame.cloud, spec.severity, seed, sigma_m=ov.get("sigma_m"))
        return frame.replace(cloud=cloud)
    if spec.kind is K.CUTOUT:
        cloud = cutout(frame.cloud, spec.severity, seed,
                       groups=ov.get("groups"), drop_groups=ov.get("drop_groups"))
        return frame.replace(cloud=cloud)
    if spec.kind is K.CROSSTALK:
        cloud = crosstalk(frame.cloud, spec.severity, seed,
                          ratio=ov.get("ratio"), sigma_m=ov.get("sigma_m"))
        return frame.replace(cloud=cloud)
    if spec.kind is K.DENSITY_DECREASE:
        cloud = density_decrease(frame.cloud, spec.severity, seed, fraction=ov.get("fraction"))
        return frame.replace(cloud=cloud)
    if spec.kind is K.FOV_LOSS:
        kept = None
        if "lo_deg" in ov or "hi_deg" in ov:
            lo, hi = ov.get("lo_deg"), ov.get("hi_deg")
            if lo is None or hi is None:
                raise ValueError("fov_loss overrides need both lo_deg and hi_deg")
            kept = (lo, hi)
        return frame.replace(cloud=fov_loss(frame.cloud, spec.severity, kept_range_deg=kept))
    if spec.kind in (K.CAMERA_GAUSSIAN, K.FOG, K.SUNLIGHT):
        return frame.replace(images=_corrupt_images(frame, spec, seed))
    if spec.kind is K.SPATIAL_MISALIGN:
        calibs = tuple(
            spatial_misalign(
                c,
                spec.severity,
                derive_stream_seed(seed, c.camera_id),
                rotation_sigma=ov.get("rotation_sigma"),
                translation_sigma=ov.get("translation_sigma"),
            )
            for c in frame.calibrations
        )
        return frame.replace(calibrations=calibs)
    raise ValueError(f"unhandled corruption kind {spec.kind!r}")


def corrupt_sequence(
    seq: Sequence[FrameSample], spec: CorruptionSpec, policy: SeedPolicy
) -> list[FrameSample]:
    """Apply any corruption kind across an ordered sequence."""
    ov = spec.overrides or {}
    if spec.kind is K.TEMPORAL_MISALIGN_CAMERA:
        off = ov.get("offset_frames")
        return [
            temporal_misalign_camera(seq, i, spec.severity,
                                     offset_frames=None if off is None else int(off))
            for i in range(len(seq))
        ]
    if spec.kind is K.TEMPORAL_MISALIGN_LIDAR:
        off = ov.get("offset_frames")
        return [
            temporal_misalign_lidar(seq, i, spec.severity,
                                    offset_frames=None if off is None else int(off))
            for i in range(len(seq))
        ]
    return [corrupt_frame(f, spec, policy) for f in seq]
