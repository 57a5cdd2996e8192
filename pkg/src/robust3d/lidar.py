"""LiDAR-only corruptions: Gaussian ranging noise, cutout, crosstalk,
density decrease and field-of-view loss.

All five are pure functions (cloud, severity, seed) -> cloud. Subset
corruptions (cutout, density_decrease, fov_loss) return a subsequence of the
input: surviving points are bit-identical and keep their relative order.
Exact-count contracts use round-half-away-from-zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ARRAY_DTYPE,
    PointCloud,
    Severity,
    derive_stream_seed,
    make_rng,
    round_half_away,
)


@dataclass(frozen=True)
class LidarCorruptionParams:
    """Per-severity defaults; index with Severity.index."""

    gaussian_sigma_m: tuple[float, float, float] = (0.02, 0.06, 0.10)
    cutout_groups: int = 50
    cutout_drop: tuple[int, int, int] = (2, 5, 10)
    crosstalk_ratio: tuple[float, float, float] = (0.004, 0.012, 0.02)
    crosstalk_sigma_m: float = 3.0
    density_drop_fraction: tuple[float, float, float] = (0.06, 0.18, 0.30)
    # Kept azimuth ranges, widest to narrowest so degradation is monotone in
    # severity (the published listing is non-monotonic; see README).
    fov_kept_range_deg: tuple[tuple[float, float], ...] = (
        (-105.0, 105.0),
        (-75.0, 75.0),
        (-45.0, 45.0),
    )


DEFAULT_LIDAR_PARAMS = LidarCorruptionParams()


def lidar_gaussian(
    cloud: PointCloud,
    severity: Severity,
    seed: int,
    sigma_m: float | None = None,
) -> PointCloud:
    """Add i.i.d. per-coordinate normal noise to every point.

    Count, order and intensities are unchanged. Noise is drawn in float64 and
    the result is stored back as float32.
    """
    sigma = DEFAULT_LIDAR_PARAMS.gaussian_sigma_m[severity.index] if sigma_m is None else sigma_m
    if cloud.n == 0:
        return cloud
    rng = make_rng(seed)
    noise = rng.normal(0.0, sigma, size=(cloud.n, 3))
    xyz = (cloud.xyz.astype(np.float64) + noise).astype(ARRAY_DTYPE)
    return PointCloud(xyz, cloud.frame_id, cloud.intensity)


def cutout_partition(cloud: PointCloud, n_groups: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Voronoi partition used by cutout: (seed point indices, group id per point).

    n_groups seed points are drawn uniformly from the cloud without
    replacement (indices sorted ascending); every point joins its nearest
    seed, ties broken by the lower seed index. Clouds smaller than n_groups
    degrade to singleton groups.
    """
    n = cloud.n
    if n < n_groups:
        idx = np.arange(n)
        return idx, idx.copy()
    rng = make_rng(seed)
    seed_idx = np.sort(rng.choice(n, size=n_groups, replace=False))
    seeds = cloud.xyz[seed_idx].astype(np.float64)
    pts = cloud.xyz.astype(np.float64)
    # (N, G) squared distances; argmin picks the lowest index on ties
    d2 = ((pts[:, None, :] - seeds[None, :, :]) ** 2).sum(axis=2)
    return seed_idx, np.argmin(d2, axis=1)


def cutout(
    cloud: PointCloud,
    severity: Severity,
    seed: int,
    groups: int | None = None,
    drop_groups: int | None = None,
) -> PointCloud:
    """Remove spatially coherent point groups (reflectivity dropout).

    The cloud is partitioned into ``groups`` Voronoi cells around seed points
    drawn uniformly from the cloud; ``drop_groups`` cells chosen uniformly are
    deleted whole. Clouds smaller than the group count fall back to singleton
    groups; the drop count is capped at the point count. Partition and drop
    selection use independent sub-streams of ``seed`` so the partition can be
    reproduced on its own.
    """
    n_groups_req = DEFAULT_LIDAR_PARAMS.cutout_groups if groups is None else groups
    n_drop_req = DEFAULT_LIDAR_PARAMS.cutout_drop[severity.index] if drop_groups is None else drop_groups
    n = cloud.n
    if n == 0 or n_drop_req <= 0:
        return cloud
    _, group_id = cutout_partition(cloud, n_groups_req, derive_stream_seed(seed, "cutout-partition"))
    n_groups = min(n_groups_req, n)
    n_drop = min(n_drop_req, n_groups)
    drop_rng = make_rng(derive_stream_seed(seed, "cutout-drop"))
    dropped = drop_rng.choice(n_groups, size=n_drop, replace=False)
    keep = ~np.isin(group_id, dropped)
    return cloud.take(np.flatnonzero(keep))


def crosstalk(
    cloud: PointCloud,
    severity: Severity,
    seed: int,
    ratio: float | None = None,
    sigma_m: float | None = None,
) -> PointCloud:
    """Displace a small random subset of points by large normal noise,
    emulating spurious returns from a nearby LiDAR unit.

    Exactly round(ratio * N) points are perturbed; all others stay
    bit-identical. Count and order are preserved.
    """
    r = DEFAULT_LIDAR_PARAMS.crosstalk_ratio[severity.index] if ratio is None else ratio
    sigma = DEFAULT_LIDAR_PARAMS.crosstalk_sigma_m if sigma_m is None else sigma_m
    n = cloud.n
    k = min(round_half_away(r * n), n)
    if n == 0 or k == 0:
        return cloud
    rng = make_rng(seed)
    idx = np.sort(rng.choice(n, size=k, replace=False))
    noise = rng.normal(0.0, sigma, size=(k, 3))
    xyz = cloud.xyz.copy()
    xyz[idx] = (xyz[idx].astype(np.float64) + noise).astype(ARRAY_DTYPE)
    return PointCloud(xyz, cloud.frame_id, cloud.intensity)


def density_decrease(
    cloud: PointCloud,
    severity: Severity,
    seed: int,
    fraction: float | None = None,
) -> PointCloud:
    """Uniform random thinning: exactly round(fraction * N) points removed."""
    p = DEFAULT_LIDAR_PARAMS.density_drop_fraction[severity.index] if fraction is None else fraction
    n = cloud.n
    k = min(round_half_away(p * n), n)
    if n == 0 or k == 0:
        return cloud
    rng = make_rng(seed)
    dropped = rng.choice(n, size=k, replace=False)
    keep = np.ones(n, dtype=bool)
    keep[dropped] = False
    return cloud.take(np.flatnonzero(keep))


def fov_loss(
    cloud: PointCloud,
    severity: Severity,
    kept_range_deg: tuple[float, float] | None = None,
) -> PointCloud:
    """Keep only points whose azimuth atan2(y, x) lies in the retained
    field of view (inclusive bounds). Deterministic; no randomness."""
    lo_deg, hi_deg = (
        DEFAULT_LIDAR_PARAMS.fov_kept_range_deg[severity.index]
        if kept_range_deg is None
        else kept_range_deg
    )
    if cloud.n == 0:
        return cloud
    az = np.degrees(np.arctan2(cloud.xyz[:, 1].astype(np.float64),
                               cloud.xyz[:, 0].astype(np.float64)))
    keep = (az >= lo_deg) & (az <= hi_deg)
    return cloud.take(np.flatnonzero(keep))
