"""Acceptance suite: every criterion at its stated tolerance, one pass/fail
line each (run with ``pytest tests/test_acceptance.py -v -s``)."""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from robust3d import (
    Box3D,
    EvalConfig,
    PointCloud,
    SceneParams,
    Severity,
    box_corners,
    crosstalk,
    cutout,
    cutout_partition,
    density_decrease,
    derive_stream_seed,
    fov_loss,
    generate_dataset,
    iou_3d,
    lidar_gaussian,
    points_in_box_mask,
    round_half_away,
    run_degradation_experiment,
    spatial_misalign,
    stratify,
)
from robust3d.core import Calibration, CorruptionKind, Detection, FrameSample, GroundTruth, Occlusion
from robust3d.evaluation import _ap_from_samples
from robust3d.synth import EXPERIMENT_DETECTOR_PARAMS


def _report(name: str, passed: bool, detail: str = ""):
    status = "PASS" if passed else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[{status}] {name}{suffix}")
    assert passed, f"{name}{suffix}"


def fuzz_cloud(rng, max_n=1500):
    n = int(rng.integers(0, max_n))
    return PointCloud(rng.uniform(-20, 20, size=(n, 3)).astype(np.float32), "f")


def survivor_indices(out: PointCloud, src: PointCloud) -> np.ndarray:
    """Indices of output points in the source (points are distinct floats)."""
    lookup = {row.tobytes(): i for i, row in enumerate(src.xyz)}
    idx = np.fromiter((lookup[row.tobytes()] for row in out.xyz), dtype=np.int64,
                      count=out.n)
    assert np.all(np.diff(idx) > 0), "output is not an order-preserving subsequence"
    return idx


# ---------------------------------------------------------------------------
# criterion 1: corruption count contracts (zero tolerance, < 60 s)
# ---------------------------------------------------------------------------


def test_corruption_count_contracts():
    start = time.time()
    rng = np.random.default_rng(2024)
    density_p = (0.06, 0.18, 0.30)
    crosstalk_r = (0.004, 0.012, 0.02)
    cutout_k = (2, 5, 10)
    fov_ranges = ((-105.0, 105.0), (-75.0, 75.0), (-45.0, 45.0))

    for trial in range(1000):
        severity = Severity(trial % 3 + 1)
        seed = int(rng.integers(0, 2**63))

        cloud = fuzz_cloud(rng)
        n = cloud.n

        out = density_decrease(cloud, severity, seed)
        expected_removed = min(round_half_away(density_p[severity.index] * n), n)
        assert out.n == n - expected_removed
        if n:
            survivor_indices(out, cloud)

        out = crosstalk(cloud, severity, seed)
        assert out.n == n
        changed = np.any(out.xyz != cloud.xyz, axis=1)
        assert int(changed.sum()) == min(round_half_away(crosstalk_r[severity.index] * n), n)
        assert np.array_equal(out.xyz[~changed], cloud.xyz[~changed])

        out = cutout(cloud, severity, seed)
        if n:
            kept = survivor_indices(out, cloud)
            removed = np.setdiff1d(np.arange(n), kept)
            _, group_id = cutout_partition(
                cloud, 50, derive_stream_seed(seed, "cutout-partition"))
            n_groups = min(50, n)
            removed_groups = set(group_id[removed].tolist())
            kept_groups = set(group_id[kept].tolist())
            assert len(removed_groups) == min(cutout_k[severity.index], n_groups)
            assert not (removed_groups & kept_groups), "a group was split"

        out = fov_loss(cloud, severity)
        if out.n:
            az = np.degrees(np.arctan2(out.xyz[:, 1].astype(np.float64),
                                       out.xyz[:, 0].astype(np.float64)))
            lo, hi = fov_ranges[severity.index]
            assert np.all((az >= lo) & (az <= hi)), "point outside kept range"
            survivor_indices(out, cloud)

    elapsed = time.time() - start
    _report("corruption count contracts (1000 fuzz clouds per corruption)",
            elapsed < 60.0, f"{elapsed:.1f}s")


# ---------------------------------------------------------------------------
# criterion 2: noise statistics (+-5%)
# ---------------------------------------------------------------------------


def test_noise_statistics():
    ok = True
    details = []
    zeros = PointCloud(np.zeros((100_000, 3), dtype=np.float32))
    for severity, sigma in zip(Severity, (0.02, 0.06, 0.10)):
        out = lidar_gaussian(zeros, severity, 7_000 + severity.level)
        stds = out.xyz.astype(np.float64).std(axis=0)
        good = np.all(stds >= 0.95 * sigma) and np.all(stds <= 1.05 * sigma)
        ok &= bool(good)
        details.append(f"gauss S{severity.level} std={stds.mean():.4f}")

    for severity, (sr, st) in zip(Severity, ((0.02, 0.002), (0.06, 0.006), (0.10, 0.010))):
        rot_deltas, tr_deltas = [], []
        for seed in range(10_000):
            calib = Calibration.identity("c")
            out = spatial_misalign(calib, severity, seed)
            rot_deltas.append((out.rotation - np.eye(3)).ravel())
            tr_deltas.append(out.translation)
        rstd = float(np.concatenate(rot_deltas).std())
        tstd = float(np.concatenate(tr_deltas).std())
        good = 0.95 * sr <= rstd <= 1.05 * sr and 0.95 * st <= tstd <= 1.05 * st
        ok &= good
        details.append(f"misalign S{severity.level} rot={rstd:.4f} tr={tstd:.5f}")
    _report("noise statistics within +-5%", ok, "; ".join(details))


# ---------------------------------------------------------------------------
# criterion 3: IoU correctness (< 2 min)
# ---------------------------------------------------------------------------


def random_box(rng, span=2.0):
    return Box3D(rng.uniform(-span, span), rng.uniform(-span, span), rng.uniform(-1, 1),
                 rng.uniform(0.3, 3.0), rng.uniform(0.3, 3.0), rng.uniform(0.3, 3.0),
                 rng.uniform(-math.pi, math.pi))


def test_iou_correctness():
    start = time.time()
    a = Box3D(1, 2, 3, 2, 1, 1.5, 0.4)
    assert iou_3d(a, a) == 1.0
    cube = Box3D(0, 0, 0, 2, 2, 2, 0)
    assert abs(iou_3d(cube, Box3D(1, 0, 0, 2, 2, 2, 0)) - 1 / 3) < 1e-9
    rot = Box3D(0, 0, 0, 2, 2, 2, math.pi / 4)
    from robust3d import iou_bev

    assert abs(iou_bev(cube, rot) - 1 / math.sqrt(2)) < 1e-9

    rng = np.random.default_rng(7)
    checked = 0
    worst = 0.0
    while checked < 200:
        x, y = random_box(rng), random_box(rng)
        analytic = iou_3d(x, y)
        if analytic == 0.0:
            continue
        corners = np.vstack([box_corners(x), box_corners(y)])
        lo, hi = corners.min(axis=0), corners.max(axis=0)
        pts = rng.uniform(lo, hi, size=(100_000, 3))
        in_a, in_b = points_in_box_mask(pts, x), points_in_box_mask(pts, y)
        union = int(np.count_nonzero(in_a | in_b))
        sampled = np.count_nonzero(in_a & in_b) / union if union else 0.0
        worst = max(worst, abs(sampled - analytic))
        assert abs(sampled - analytic) < 0.01
        checked += 1

    sym_worst = inv_worst = 0.0
    for _ in range(10_000):
        x, y = random_box(rng), random_box(rng)
        sym_worst = max(sym_worst, abs(iou_3d(x, y) - iou_3d(y, x)))
        theta = rng.uniform(-math.pi, math.pi)
        tx, ty, tz = rng.uniform(-20, 20, size=3)
        c, s = math.cos(theta), math.sin(theta)

        def move(b):
            return Box3D(c * b.cx - s * b.cy + tx, s * b.cx + c * b.cy + ty, b.cz + tz,
                         b.l, b.w, b.h, b.yaw + theta)

        inv_worst = max(inv_worst, abs(iou_3d(move(x), move(y)) - iou_3d(x, y)))
    assert sym_worst < 1e-9 and inv_worst < 1e-9

    elapsed = time.time() - start
    _report("IoU analytic + Monte-Carlo + invariances", elapsed < 120.0,
            f"{elapsed:.1f}s, MC worst {worst:.4f}, sym {sym_worst:.1e}, rigid {inv_worst:.1e}")


# ---------------------------------------------------------------------------
# criterion 4: AP oracle equivalence
# ---------------------------------------------------------------------------


def ap_bruteforce(samples, n_gt):
    if n_gt == 0:
        return 0.0
    thresholds = sorted({s for s, _ in samples}, reverse=True)
    pts = []
    for t in thresholds:
        tp = sum(1 for s, ok in samples if s >= t and ok)
        fp = sum(1 for s, ok in samples if s >= t and not ok)
        pts.append((tp / n_gt, tp / (tp + fp)))
    ap, prev = 0.0, 0.0
    for i, (r, _) in enumerate(pts):
        ap += (r - prev) * max(q for _, q in pts[i:])
        prev = r
    return ap


def random_instance(rng):
    n_gt = int(rng.integers(1, 21))
    n_det = int(rng.integers(0, 51))
    samples, n_tp = [], 0
    for _ in range(n_det):
        is_tp = bool(rng.random() < 0.5) and n_tp < n_gt
        n_tp += is_tp
        score = float(np.round(rng.uniform(0, 1), 2))  # coarse grid forces score ties
        samples.append((score, is_tp))
    return samples, n_gt


def test_ap_oracle_equivalence():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(500):
        samples, n_gt = random_instance(rng)
        got = _ap_from_samples(samples, n_gt).ap
        worst = max(worst, abs(got - ap_bruteforce(samples, n_gt)))
        assert worst < 1e-9

    hand = _ap_from_samples([(0.9, True), (0.8, False), (0.7, True)], 2).ap
    assert abs(hand - 5 / 6) < 1e-12

    for _ in range(100):
        samples, n_gt = random_instance(rng)
        base = _ap_from_samples(samples, n_gt).ap
        uniq = sorted({s for s, _ in samples})
        remap = {s: (i + 1) / (len(uniq) + 1) for i, s in enumerate(uniq)}
        assert abs(_ap_from_samples([(remap[s], tp) for s, tp in samples], n_gt).ap - base) < 1e-12
    _report("AP equals brute-force enumeration; hand case 5/6; rank invariance",
            True, f"worst |delta| {worst:.1e}")


# ---------------------------------------------------------------------------
# criterion 5: protocol boundaries
# ---------------------------------------------------------------------------


def frame_with_counts(specs):
    """specs: list of (x, y, point_count, occlusion)."""
    gts, pts = [], []
    for i, (x, y, count, occ) in enumerate(specs):
        box = Box3D(x, y, 0.9, 0.6, 0.6, 1.8, 0.0)
        gts.append(GroundTruth(box, occ, f"t{i}"))
        pts.extend([[x + 1e-3 * k, y, 0.9] for k in range(count)])
    cloud = PointCloud(np.array(pts, dtype=np.float32).reshape(-1, 3), "f0")
    return FrameSample("f0", "s0", 0, cloud, (), (), tuple(gts))


def test_protocol_boundaries():
    from robust3d import filter_ground_truth

    cfg = EvalConfig()
    v = Occlusion.FULLY_VISIBLE
    frame = frame_with_counts([
        (5.0, 0.0, 10, v),    # exactly 10 points: ignored
        (6.0, 0.0, 11, v),    # 11 points: eligible
        (25.0, 0.0, 15, v),   # exactly 25 m: eligible
        (25.01, 0.0, 15, v),  # beyond: ignored
    ])
    eligible, ignored = filter_ground_truth(frame, cfg)
    assert [g.track_id for g in eligible] == ["t1", "t2"]
    assert [g.track_id for g in ignored] == ["t0", "t3"]

    assert cfg.distance_bin(2.999999) == "near"
    assert cfg.distance_bin(3.0) == "mid"
    assert cfg.distance_bin(6.999999) == "mid"
    assert cfg.distance_bin(7.0) == "far"
    assert cfg.distance_bin(25.0) == "far"
    assert cfg.distance_bin(25.000001) == "out_of_range"

    # combined strata TP counts sum to the global count
    rng = np.random.default_rng(13)
    frames, dets = [], {}
    for f in range(8):
        fid = f"f{f}"
        specs, frame_dets = [], []
        for i in range(int(rng.integers(2, 9))):
            x, y = float(rng.uniform(1, 24)), float(rng.uniform(-6, 6))
            occ = list(Occlusion)[rng.integers(4)]
            specs.append((x, y, int(rng.integers(5, 40)), occ))
        fr = frame_with_counts(specs)
        fr = FrameSample(fid, "s0", f, fr.cloud, (), (), fr.ground_truth)
        frames.append(fr)
        for g in fr.ground_truth:
            if rng.random() < 0.75:
                b = g.box
                frame_dets.append(Detection(
                    Box3D(b.cx + rng.normal(0, 0.12), b.cy + rng.normal(0, 0.12), b.cz,
                          b.l, b.w, b.h, b.yaw), float(rng.uniform(0.1, 1.0)), fid))
        for _ in range(int(rng.integers(0, 3))):  # stray FPs
            frame_dets.append(Detection(
                Box3D(float(rng.uniform(1, 24)), float(rng.uniform(-6, 6)), 0.9,
                      0.6, 0.6, 1.8, 0.0), float(rng.uniform(0, 1)), fid))
        dets[fid] = frame_dets
    results = {r.stratum: r for r in stratify(frames, dets, cfg, strata="combined")}
    for t in cfg.iou_thresholds:
        combined_tp = sum(results[f"{d}/{o}"].ap_by_threshold[t].n_tp
                          for d in ("near", "mid", "far")
                          for o in ("none", "partial", "heavy"))
        assert combined_tp == results["all"].ap_by_threshold[t].n_tp
    _report("protocol boundaries (>10 points, 25 m, left-closed bins, strata sums)", True)


# ---------------------------------------------------------------------------
# criterion 6: end-to-end qualitative trend (< 5 min)
# ---------------------------------------------------------------------------


def test_end_to_end_trend():
    start = time.time()
    monotone_kinds = ("density_decrease", "fov_loss", "cutout", "temporal_misalign_lidar")
    ap_by_cell: dict[tuple[str, int], list[float]] = {}
    baselines = []
    far_le_near = True
    for seed in range(5):
        dataset = generate_dataset(SceneParams(), 10, 20, seed=seed)  # 200 frames
        report = run_degradation_experiment(
            dataset, detector=EXPERIMENT_DETECTOR_PARAMS, seed=seed, strata="distance")
        for row in report.rows:
            if row.stratum == "all" and row.severity is not None:
                ap_by_cell.setdefault((row.corruption, row.severity), []).append(
                    row.ap_percent[0])
            elif row.stratum == "all":
                baselines.append(row.ap_percent[0])
        strata = {r.stratum: r for r in report.rows if r.corruption == "none"}
        far_le_near &= strata["far"].ap_percent[0] <= strata["near"].ap_percent[0]

    trend_ok = True
    details = []
    for kind in monotone_kinds:
        means = [float(np.mean(ap_by_cell[(kind, s)])) for s in (1, 2, 3)]
        good = means[0] >= means[1] >= means[2]
        trend_ok &= good
        details.append(f"{kind}: {means[0]:.1f}>={means[1]:.1f}>={means[2]:.1f}")
    elapsed = time.time() - start
    _report("severity trend non-increasing for the four LiDAR-sensitive corruptions",
            trend_ok, "; ".join(details))
    base_mean = float(np.mean(baselines))
    dominated = all(float(np.mean(v)) <= base_mean + 1e-9 for v in ap_by_cell.values())
    _report("baseline AP >= every corrupted cell's AP (mean over 5 seeds)", dominated,
            f"baseline {base_mean:.2f}")
    _report("far-stratum AP <= near-stratum AP on clean data", far_le_near)
    _report("full sweep (all corruptions x 3 severities x 5 seeds) under 5 minutes",
            elapsed < 300.0, f"{elapsed:.1f}s")


# ---------------------------------------------------------------------------
# criterion 7: command-level determinism
# ---------------------------------------------------------------------------


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "robust3d", *map(str, args)],
                          capture_output=True, text=True)


def tree_bytes(root):
    return {str(p.relative_to(root)): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file()}


def test_cmd_determinism(tmp_path):
    data = tmp_path / "data"
    assert run_cli("--seed", 5, "synth", "--frames", 5, "--sequences", 2,
                   "--persons", "3..5", "--out", data).returncode == 0

    trees = []
    for name, threads in (("c1", 1), ("c2", 1), ("c3", 6)):
        out = tmp_path / name
        r = run_cli("--seed", 3, "--threads", threads, "corrupt", "--input", data,
                    "--output", out, "--corruption", "crosstalk", "--severity", 2)
        assert r.returncode == 0, r.stderr
        trees.append(tree_bytes(out))
    corrupt_ok = trees[0] == trees[1] == trees[2]
    _report("cmd_corrupt byte-identical across runs and thread counts", corrupt_ok)

    sweeps = []
    for name, threads in (("s1.csv", 1), ("s2.csv", 1), ("s3.csv", 8)):
        path = tmp_path / name
        r = run_cli("--seed", 4, "--threads", threads, "sweep", "--input", data,
                    "--grid", "all", "--out", path)
        assert r.returncode == 0, r.stderr
        sweeps.append(path.read_bytes())
    sweep_ok = sweeps[0] == sweeps[1] == sweeps[2]
    _report("cmd_sweep byte-identical across runs and thread counts", sweep_ok)
