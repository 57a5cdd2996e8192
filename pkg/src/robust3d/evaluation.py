"""Detection evaluation: protocol filtering, greedy matching, average
precision and distance/occlusion stratification.

Protocol summary
----------------
A ground-truth box enters evaluation only if it encloses more than
``min_points - 1`` cloud points (default: more than 10) and its center lies
within ``max_range_m`` (default 25 m) horizontal distance of the sensor.
All four occlusion categories stay eligible; occlusion only stratifies.

Matching is greedy by descending confidence (ties by detection index): a
detection takes the highest-IoU unmatched eligible ground truth when the 3D
IoU clears the threshold (TP); otherwise, if it overlaps any protocol-ignored
ground truth at the threshold it is excluded from both TP and FP (Ignored);
otherwise it is a false positive.

AP uses all-point interpolation: the exact area under the step precision-
recall curve with precision replaced by its running maximum from the right.
Detections with tied scores enter the curve together (one threshold per
distinct score), so AP depends on score ranks only.

Stratified rows reuse the global matching. A true positive belongs to its
ground truth's stratum; a detection matched out of stratum is ignored there.
A globally-unmatched detection (FP) counts in the distance stratum of its own
box; for occlusion rows it borrows the occlusion of the highest-IoU eligible
ground truth when that IoU reaches half the matching threshold, and is
excluded otherwise. Combined rows require both attributions. Empty strata
report AP = 0 with an explicit flag rather than dropping the row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import Detection, FrameSample, GroundTruth, Occlusion
from .geometry import iou_3d, points_in_box

DISTANCE_BIN_NAMES = ("near", "mid", "far")
OCCLUSION_BIN_NAMES = ("none", "partial", "heavy")
OUT_OF_RANGE = "out_of_range"

#: 4 annotation categories -> 3 evaluation bins
OCCLUSION_BIN_MAP = {
    Occlusion.FULLY_VISIBLE: "none",
    Occlusion.MOSTLY_VISIBLE: "partial",
    Occlusion.SEVERELY_OCCLUDED: "heavy",
    Occlusion.FULLY_OCCLUDED: "heavy",
}


@dataclass(frozen=True)
class EvalConfig:
    iou_thresholds: tuple[float, ...] = (0.3, 0.5)
    min_points: int = 11
    max_range_m: float = 25.0
    #: left-closed distance bin edges: [0, 3) near, [3, 7) mid, [7, 25] far
    distance_edges: tuple[float, float, float, float] = (0.0, 3.0, 7.0, 25.0)

    def distance_bin(self, horizontal_distance: float) -> str:
        e = self.distance_edges
        d = horizontal_distance
        if e[0] <= d < e[1]:
            return "near"
        if e[1] <= d < e[2]:
            return "mid"
        if e[2] <= d <= e[3]:
            return "far"
        return OUT_OF_RANGE


DEFAULT_EVAL_CONFIG = EvalConfig()


def distance_bin(box, cfg: EvalConfig = DEFAULT_EVAL_CONFIG) -> str:
    """Distance stratum of a box center: near / mid / far / out_of_range."""
    return cfg.distance_bin(box.horizontal_distance)


def occlusion_bin(gt: GroundTruth) -> str:
    """Occlusion stratum of a ground truth: none / partial / heavy."""
    return OCCLUSION_BIN_MAP[gt.occlusion]


def filter_ground_truth(
    frame: FrameSample, cfg: EvalConfig = DEFAULT_EVAL_CONFIG
) -> tuple[list[GroundTruth], list[GroundTruth]]:
    """Split a frame's ground truth into (eligible, ignored) per the protocol.

    Eligible: strictly more than ``min_points - 1`` in-box cloud points AND
    horizontal center distance <= ``max_range_m``. Occlusion never
    disqualifies; it only stratifies.
    """
    eligible, ignored = [], []
    for gt in frame.ground_truth:
        ok = (
            points_in_box(frame.cloud, gt.box) >= cfg.min_points
            and gt.box.horizontal_distance <= cfg.max_range_m
        )
        (eligible if ok else ignored).append(gt)
    return eligible, ignored


# ---------------------------------------------------------------------------
# matching
# ---------------------------------------------------------------------------

TP, FP, IGNORED = "tp", "fp", "ignored"


@dataclass(frozen=True)
class DetRecord:
    """One detection's matching outcome plus the strata it can land in."""

    score: float
    status: str  # tp / fp / ignored
    gt_index: int | None  # index into the frame's eligible list (tp only)
    gt_dist_bin: str | None
    gt_occ_bin: str | None
    own_dist_bin: str
    attr_occ_bin: str | None  # FP occlusion attribution; None = excluded


@dataclass(frozen=True)
class FrameMatch:
    """Matching bookkeeping for one frame at one IoU threshold."""

    frame_id: str
    iou_threshold: float
    records: tuple[DetRecord, ...]
    gt_strata: tuple[tuple[str, str], ...]  # (distance, occlusion) per eligible gt
    gt_matched: tuple[bool, ...]

    @property
    def n_eligible(self) -> int:
        return len(self.gt_strata)


def _iou_matrix(dets: Sequence[Detection], gts: Sequence[GroundTruth]) -> np.ndarray:
    mat = np.zeros((len(dets), len(gts)))
    for i, det in enumerate(dets):
        b = det.box
        for j, gt in enumerate(gts):
            g = gt.box
            # cheap reject: BEV circumscribed circles cannot touch
            reach = 0.5 * (math.hypot(b.l, b.w) + math.hypot(g.l, g.w))
            if math.hypot(b.cx - g.cx, b.cy - g.cy) > reach:
                continue
            if abs(b.cz - g.cz) > 0.5 * (b.h + g.h):
                continue
            mat[i, j] = iou_3d(b, g)
    return mat


def match_detections(
    dets: Sequence[Detection],
    eligible: Sequence[GroundTruth],
    ignored: Sequence[GroundTruth],
    iou_threshold: float,
    cfg: EvalConfig = DEFAULT_EVAL_CONFIG,
    frame_id: str = "",
    iou_eligible: np.ndarray | None = None,
    iou_ignored: np.ndarray | None = None,
) -> FrameMatch:
    """Greedy single-frame matching; see the module docstring for the rule.

    The IoU matrices may be passed in so multiple thresholds can share them.
    """
    if iou_eligible is None:
        iou_eligible = _iou_matrix(dets, eligible)
    if iou_ignored is None:
        iou_ignored = _iou_matrix(dets, ignored)

    order = sorted(range(len(dets)), key=lambda i: (-dets[i].score, i))
    gt_taken = [False] * len(eligible)
    outcomes: dict[int, DetRecord] = {}

    gt_strata = tuple((distance_bin(gt.box, cfg), occlusion_bin(gt)) for gt in eligible)

    for i in order:
        det = dets[i]
        own_bin = distance_bin(det.box, cfg)

        best_j, best_iou = -1, 0.0
        for j in range(len(eligible)):
            if not gt_taken[j] and iou_eligible[i, j] > best_iou:
                best_j, best_iou = j, float(iou_eligible[i, j])

        # occlusion attribution considers every eligible gt, matched or not
        attr_occ = None
        if len(eligible):
            j_near = int(np.argmax(iou_eligible[i]))
            if iou_eligible[i, j_near] >= iou_threshold / 2.0:
                attr_occ = gt_strata[j_near][1]

        if best_j >= 0 and best_iou >= iou_threshold:
            gt_taken[best_j] = True
            dist_b, occ_b = gt_strata[best_j]
            outcomes[i] = DetRecord(det.score, TP, best_j, dist_b, occ_b, own_bin, attr_occ)
            continue
        if len(ignored) and float(np.max(iou_ignored[i])) >= iou_threshold:
            outcomes[i] = DetRecord(det.score, IGNORED, None, None, None, own_bin, attr_occ)
            continue
        outcomes[i] = DetRecord(det.score, FP, None, None, None, own_bin, attr_occ)

    records = tuple(outcomes[i] for i in range(len(dets)))
    return FrameMatch(frame_id, iou_threshold, records, gt_strata, tuple(gt_taken))


# ---------------------------------------------------------------------------
# average precision
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PRCurve:
    """Step PR curve: one point per distinct score threshold, descending."""

    score_thresholds: tuple[float, ...]
    recalls: tuple[float, ...]
    precisions: tuple[float, ...]


@dataclass(frozen=True)
class APResult:
    ap: float  # in [0, 1]
    curve: PRCurve
    n_gt: int
    n_tp: int
    n_fp: int
    empty_ground_truth: bool = False


def _ap_from_samples(samples: Iterable[tuple[float, bool]], n_gt: int) -> APResult:
    """AP from (score, is_tp) samples against n_gt eligible ground truths."""
    ordered = sorted(samples, key=lambda sc: -sc[0])
    if n_gt == 0:
        n_fp = sum(1 for _, tp in ordered if not tp)
        return APResult(0.0, PRCurve((), (), ()), 0, 0, n_fp, empty_ground_truth=True)

    thresholds, recalls, precisions = [], [], []
    tp_cum = fp_cum = 0
    i = 0
    while i < len(ordered):
        score = ordered[i][0]
        while i < len(ordered) and ordered[i][0] == score:
            if ordered[i][1]:
                tp_cum += 1
            else:
                fp_cum += 1
            i += 1
        thresholds.append(score)
        recalls.append(tp_cum / n_gt)
        precisions.append(tp_cum / (tp_cum + fp_cum))

    # all-point interpolation: running max of precision from the right
    interp = list(precisions)
    for k in range(len(interp) - 2, -1, -1):
        interp[k] = max(interp[k], interp[k + 1])

    ap = 0.0
    prev_r = 0.0
    for r, p in zip(recalls, interp):
        ap += (r - prev_r) * p
        prev_r = r

    return APResult(
        ap,
        PRCurve(tuple(thresholds), tuple(recalls), tuple(precisions)),
        n_gt,
        tp_cum,
        fp_cum,
    )


def average_precision(matches: Iterable[FrameMatch]) -> APResult:
    """Pool all frames' matches into one AP (global protocol)."""
    samples: list[tuple[float, bool]] = []
    n_gt = 0
    for m in matches:
        n_gt += m.n_eligible
        for rec in m.records:
            if rec.status == TP:
                samples.append((rec.score, True))
            elif rec.status == FP:
                samples.append((rec.score, False))
    return _ap_from_samples(samples, n_gt)


# ---------------------------------------------------------------------------
# stratification
# ---------------------------------------------------------------------------

GLOBAL_STRATUM = "all"


def _stratum_name(dist: str | None, occ: str | None) -> str:
    if dist and occ:
        return f"{dist}/{occ}"
    return dist or occ or GLOBAL_STRATUM


def _stratum_ap(matches: Sequence[FrameMatch], dist: str | None, occ: str | None) -> APResult:
    samples: list[tuple[float, bool]] = []
    n_gt = 0
    for m in matches:
        for d_bin, o_bin in m.gt_strata:
            if (dist is None or d_bin == dist) and (occ is None or o_bin == occ):
                n_gt += 1
        for rec in m.records:
            if rec.status == IGNORED:
                continue
            if rec.status == TP:
                if (dist is None or rec.gt_dist_bin == dist) and (occ is None or rec.gt_occ_bin == occ):
                    samples.append((rec.score, True))
                continue  # TP matched out of stratum: ignored here
            # FP attribution: own distance bin; borrowed occlusion bin
            if dist is not None and rec.own_dist_bin != dist:
                continue
            if occ is not None and rec.attr_occ_bin != occ:
                continue
            samples.append((rec.score, False))
    return _ap_from_samples(samples, n_gt)


@dataclass(frozen=True)
class StratumResult:
    """One evaluation row: a stratum with AP per IoU threshold."""

    stratum: str
    ap_by_threshold: Mapping[float, APResult]

    def ap_percent(self, threshold: float) -> float:
        return 100.0 * self.ap_by_threshold[threshold].ap


def _match_all(
    frames: Sequence[FrameSample],
    detections: Mapping[str, Sequence[Detection]],
    cfg: EvalConfig,
) -> dict[float, list[FrameMatch]]:
    """Match every frame at every configured threshold, sharing IoU matrices.

    Frames are processed in frame_id order so aggregation is deterministic
    regardless of input ordering.
    """
    by_threshold: dict[float, list[FrameMatch]] = {t: [] for t in cfg.iou_thresholds}
    for frame in sorted(frames, key=lambda f: f.frame_id):
        dets = list(detections.get(frame.frame_id, ()))
        eligible, ignored = filter_ground_truth(frame, cfg)
        mat_e = _iou_matrix(dets, eligible)
        mat_i = _iou_matrix(dets, ignored)
        for t in cfg.iou_thresholds:
            by_threshold[t].append(
                match_detections(dets, eligible, ignored, t, cfg, frame.frame_id, mat_e, mat_i)
            )
    return by_threshold


def stratify(
    frames: Sequence[FrameSample],
    detections: Mapping[str, Sequence[Detection]],
    cfg: EvalConfig = DEFAULT_EVAL_CONFIG,
    strata: str = "combined",
) -> list[StratumResult]:
    """Evaluate globally and per stratum.

    ``strata``: "none" (global row only), "distance", "occlusion", or
    "combined" (distance rows + occlusion rows + the 9 cross cells).
    The global "all" row always comes first.
    """
    if strata not in ("none", "distance", "occlusion", "combined"):
        raise ValueError(f"unknown strata mode {strata!r}")
    by_threshold = _match_all(frames, detections, cfg)

    cells: list[tuple[str | None, str | None]] = [(None, None)]
    if strata in ("distance", "combined"):
        cells += [(d, None) for d in DISTANCE_BIN_NAMES]
    if strata in ("occlusion", "combined"):
        cells += [(None, o) for o in OCCLUSION_BIN_NAMES]
    if strata == "combined":
        cells += [(d, o) for d in DISTANCE_BIN_NAMES for o in OCCLUSION_BIN_NAMES]

    results = []
    for dist, occ in cells:
        ap_by_t = {
            t: _stratum_ap(by_threshold[t], dist, occ) for t in cfg.iou_thresholds
        }
        results.append(StratumResult(_stratum_name(dist, occ), ap_by_t))
    return results


def evaluate(
    frames: Sequence[FrameSample],
    detections: Mapping[str, Sequence[Detection]],
    cfg: EvalConfig = DEFAULT_EVAL_CONFIG,
) -> StratumResult:
    """Global (unstratified) evaluation across all configured thresholds."""
    return stratify(frames, detections, cfg, strata="none")[0]


# ---------------------------------------------------------------------------
# report rows
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReportRow:
    """One line of the corruption-sweep table; AP values in percent."""

    corruption: str  # canonical kind name, or "none" for the clean baseline
    severity: int | None  # 1..3, None for the baseline
    stratum: str
    ap_percent: tuple[float, ...]  # aligned with thresholds
    n_gt: int
    n_tp: int  # at the first (headline) threshold
    n_fp: int

    @property
    def empty_stratum(self) -> bool:
        return self.n_gt == 0


@dataclass(frozen=True)
class EvalReport:
    """Stratified AP table over corruption x severity x stratum."""

    iou_thresholds: tuple[float, ...]
    rows: tuple[ReportRow, ...] = ()

    def with_rows(self, rows: Iterable[ReportRow]) -> "EvalReport":
        return EvalReport(self.iou_thresholds, self.rows + tuple(rows))


def rows_from_results(
    results: Sequence[StratumResult],
    cfg: EvalConfig,
    corruption: str = "none",
    severity: int | None = None,
) -> list[ReportRow]:
    """Convert stratified results into report rows (AP as percentages)."""
    rows = []
    head = cfg.iou_thresholds[0]
    for res in results:
        aps = tuple(res.ap_percent(t) for t in cfg.iou_thresholds)
        r0 = res.ap_by_threshold[head]
        rows.append(ReportRow(corruption, severity, res.stratum, aps, r0.n_gt, r0.n_tp, r0.n_fp))
    return rows
