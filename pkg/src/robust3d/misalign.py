"""Cross-sensor corruptions: spatial calibration perturbation and temporal
misalignment (stale camera or stale LiDAR frames).

Temporal variants operate on an ordered frame sequence and never touch the
ground truth, the frame identity, or the non-delayed modality. The delayed
source index is max(0, index - offset): the start of a sequence clamps to
frame 0 rather than fabricating data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Calibration, FrameSample, Severity, make_rng


@dataclass(frozen=True)
class MisalignParams:
    rotation_sigma: tuple[float, float, float] = (0.02, 0.06, 0.10)
    translation_sigma: tuple[float, float, float] = (0.002, 0.006, 0.010)
    frame_offset: tuple[int, int, int] = (2, 6, 10)


DEFAULT_MISALIGN_PARAMS = MisalignParams()


def spatial_misalign(
    calib: Calibration,
    severity: Severity,
    seed: int,
    rotation_sigma: float | None = None,
    translation_sigma: float | None = None,
) -> Calibration:
    """Entry-wise Gaussian noise on the calibration matrices.

    All 9 rotation entries and all 3 translation entries get i.i.d. noise.
    The result is deliberately NOT re-orthonormalized: the broken matrix is
    the corruption, and the output is flagged ``perturbed``.
    """
    sr = DEFAULT_MISALIGN_PARAMS.rotation_sigma[severity.index] if rotation_sigma is None else rotation_sigma
    st = (
        DEFAULT_MISALIGN_PARAMS.translation_sigma[severity.index]
        if translation_sigma is None
        else translation_sigma
    )
    rng = make_rng(seed)
    rot = calib.rotation + rng.normal(0.0, sr, size=(3, 3)) if sr > 0 else np.array(calib.rotation)
    tr = calib.translation + rng.normal(0.0, st, size=3) if st > 0 else np.array(calib.translation)
    return Calibration(rot, tr, calib.camera_id, perturbed=True)


def _delay_source(index: int, offset: int) -> int:
    return max(0, index - offset)


def _check_index(seq: Sequence[FrameSample], index: int) -> None:
    if not 0 <= index < len(seq):
        raise IndexError(f"frame index {index} out of range for sequence of length {len(seq)}")


def temporal_misalign_camera(
    seq: Sequence[FrameSample],
    index: int,
    severity: Severity,
    offset_frames: int | None = None,
) -> FrameSample:
    """Pair the current LiDAR frame with stale camera data.

    Images and their calibrations move together (stale extrinsics belong to
    the stale capture); cloud and ground truth stay current.
    """
    _check_index(seq, index)
    off = DEFAULT_MISALIGN_PARAMS.frame_offset[severity.index] if offset_frames is None else offset_frames
    src = seq[_delay_source(index, off)]
    return seq[index].replace(images=src.images, calibrations=src.calibrations)


def temporal_misalign_lidar(
    seq: Sequence[FrameSample],
    index: int,
    severity: Severity,
    offset_frames: int | None = None,
) -> FrameSample:
    """Pair current camera data with a stale LiDAR cloud; symmetric to the
    camera variant. Ground truth stays at the evaluation timestamp."""
    _check_index(seq, index)
    off = DEFAULT_MISALIGN_PARAMS.frame_offset[severity.index] if offset_frames is None else offset_frames
    src = seq[_delay_source(index, off)]
    return seq[index].replace(cloud=src.cloud)
