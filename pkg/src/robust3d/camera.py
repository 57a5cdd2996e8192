"""Camera corruptions: Gaussian noise, fog (gray mask blend) and sunlight
(global brightness/contrast shift).

Images live in [0, 1]; every corruption clamps once, after the full
transform. fog and sunlight are deterministic; only camera_gaussian
consumes a seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ARRAY_DTYPE, CameraImage, Severity, make_rng


@dataclass(frozen=True)
class CameraCorruptionParams:
    # Gaussian sigma and sunlight magnitudes are artifact defaults (the usual
    # low/mid/high ladder), override-able per call; fog opacities are fixed
    # benchmark values.
    gaussian_sigma: tuple[float, float, float] = (0.08, 0.18, 0.38)
    fog_opacity: tuple[float, float, float] = (0.10, 0.30, 0.50)
    fog_gray: float = 0.5
    sunlight_brightness_delta: tuple[float, float, float] = (0.10, 0.20, 0.30)
    sunlight_contrast_factor: tuple[float, float, float] = (1.1, 1.3, 1.5)


DEFAULT_CAMERA_PARAMS = CameraCorruptionParams()


def camera_gaussian(
    img: CameraImage,
    severity: Severity,
    seed: int,
    sigma: float | None = None,
) -> CameraImage:
    """Per-channel i.i.d. normal noise, clamped back into [0, 1]."""
    s = DEFAULT_CAMERA_PARAMS.gaussian_sigma[severity.index] if sigma is None else sigma
    rng = make_rng(seed)
    noise = rng.normal(0.0, s, size=img.pixels.shape)
    out = np.clip(img.pixels.astype(np.float64) + noise, 0.0, 1.0).astype(ARRAY_DTYPE)
    return CameraImage(out, img.camera_id)


def fog(
    img: CameraImage,
    severity: Severity,
    opacity: float | None = None,
    gray: float | None = None,
) -> CameraImage:
    """Blend toward a uniform gray mask: out = (1 - a) * in + a * gray."""
    a = DEFAULT_CAMERA_PARAMS.fog_opacity[severity.index] if opacity is None else opacity
    g = DEFAULT_CAMERA_PARAMS.fog_gray if gray is None else gray
    out = np.clip((1.0 - a) * img.pixels.astype(np.float64) + a * g, 0.0, 1.0).astype(ARRAY_DTYPE)
    return CameraImage(out, img.camera_id)


def sunlight(
    img: CameraImage,
    severity: Severity,
    brightness_delta: float | None = None,
    contrast_factor: float | None = None,
) -> CameraImage:
    """Global contrast stretch about mid-gray plus a brightness offset:
    out = clamp((in - 0.5) * contrast + 0.5 + brightness, 0, 1)."""
    b = (
        DEFAULT_CAMERA_PARAMS.sunlight_brightness_delta[severity.index]
        if brightness_delta is None
        else brightness_delta
    )
    c = (
        DEFAULT_CAMERA_PARAMS.sunlight_contrast_factor[severity.index]
        if contrast_factor is None
        else contrast_factor
    )
    px = img.pixels.astype(np.float64)
    out = np.clip((px - 0.5) * c + 0.5 + b, 0.0, 1.0).astype(ARRAY_DTYPE)
    return CameraImage(out, img.camera_id)
