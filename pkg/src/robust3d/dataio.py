"""Serialization: binary clouds and images, JSONL annotations/detections,
report CSV/JSON, and the directory adapter mapping a JRDB-style dataset tree
onto FrameSample.

File formats (all little-endian, sizes in bytes)
------------------------------------------------
Cloud ``.r3pc``::

    magic   4   "R3PC"
    version u16 (currently 1)
    count   u32 number of points
    flags   u16 bit 0: intensity channel present
    payload count x (3 or 4) float32 per point: x, y, z [, intensity]

Image ``.r3im``::

    magic    4   "R3IM"
    version  u16 (currently 1)
    width    u32
    height   u32
    channels u16 (currently 3)
    depth    u16 bits per sample, 8 or 16
    payload  height x width x channels uint8/uint16, row-major

Image samples quantize as ``floor(v * (2^depth - 1) + 0.5)`` and read back as
``float32(raw / (2^depth - 1))`` (computed in float64, then rounded to
float32); any consumer must reproduce this rule bit-exactly.

Annotations are JSONL, one record per frame:
``{"frame_id", "sequence_id", "boxes": [{cx, cy, cz, l, w, h, yaw,
occlusion, track_id}]}``; unknown keys round-trip untouched. Detections are
JSONL with one object per detection: ``{"frame_id", cx..yaw, "score"}``.

Dataset tree (the documented JRDB-style layout)::

    root/
      manifest.json                         (written by the corrupt command)
      sequences/<sequence_id>/
        frames.json                         {"sequence_id", "cameras", "frames":
                                             [{"frame_id", "index"}]}
        annotations.jsonl
        clouds/<frame_id>.r3pc
        images/<camera_id>/<frame_id>.r3im
        calib/<camera_id>/<frame_id>.json

The adapter config can re-map every path pattern and declares the source yaw
convention; boxes convert to this package's yaw (counter-clockwise from +x)
on read.
"""

from __future__ import annotations

import csv
import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import __version__
from .core import (
    ARRAY_DTYPE,
    Box3D,
    Calibration,
    CameraImage,
    Detection,
    FrameSample,
    GroundTruth,
    Occlusion,
    PointCloud,
    validate_frame,
)
from .evaluation import EvalReport, ReportRow


class DataFormatError(ValueError):
    """Structured parse failure: message plus file location."""

    def __init__(self, message: str, *, path: str | Path | None = None,
                 offset: int | None = None, line: int | None = None):
        loc = []
        if path is not None:
            loc.append(str(path))
        if line is not None:
            loc.append(f"line {line}")
        if offset is not None:
            loc.append(f"byte offset {offset}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)
        self.path = None if path is None else str(path)
        self.offset = offset
        self.line = line


# ---------------------------------------------------------------------------
# point clouds (.r3pc)
# ---------------------------------------------------------------------------

CLOUD_MAGIC = b"R3PC"
CLOUD_VERSION = 1
_CLOUD_HEADER = struct.Struct("<4sHIH")


def cloud_to_bytes(cloud: PointCloud) -> bytes:
    has_intensity = cloud.intensity is not None
    flags = 1 if has_intensity else 0
    header = _CLOUD_HEADER.pack(CLOUD_MAGIC, CLOUD_VERSION, cloud.n, flags)
    if has_intensity:
        payload = np.column_stack([cloud.xyz, cloud.intensity]).astype("<f4").tobytes()
    else:
        payload = cloud.xyz.astype("<f4").tobytes()
    return header + payload


def cloud_from_bytes(data: bytes, frame_id: str = "", path=None) -> PointCloud:
    if len(data) < _CLOUD_HEADER.size:
        raise DataFormatError(
            f"truncated header: need {_CLOUD_HEADER.size} bytes, got {len(data)}",
            path=path, offset=len(data))
    magic, version, count, flags = _CLOUD_HEADER.unpack_from(data, 0)
    if magic != CLOUD_MAGIC:
        raise DataFormatError(f"bad magic {magic!r}, expected {CLOUD_MAGIC!r}", path=path, offset=0)
    if version != CLOUD_VERSION:
        raise DataFormatError(f"unsupported version {version}", path=path, offset=4)
    width = 4 if (flags & 1) else 3
    expected = count * width * 4
    body = data[_CLOUD_HEADER.size:]
    if len(body) != expected:
        raise DataFormatError(
            f"payload length {len(body)} != expected {expected} ({count} points x {width} floats)",
            path=path, offset=_CLOUD_HEADER.size + min(len(body), expected))
    arr = np.frombuffer(body, dtype="<f4").reshape(count, width)
    if flags & 1:
        return PointCloud(arr[:, :3], frame_id, arr[:, 3])
    return PointCloud(arr, frame_id)


def write_cloud(cloud: PointCloud, path: str | Path) -> None:
    Path(path).write_bytes(cloud_to_bytes(cloud))


def read_cloud(path: str | Path, frame_id: str = "") -> PointCloud:
    return cloud_from_bytes(Path(path).read_bytes(), frame_id, path=path)


# ---------------------------------------------------------------------------
# images (.r3im)
# ---------------------------------------------------------------------------

IMAGE_MAGIC = b"R3IM"
IMAGE_VERSION = 1
_IMAGE_HEADER = struct.Struct("<4sHIIHH")
DEFAULT_IMAGE_DEPTH = 16


def image_to_bytes(img: CameraImage, depth: int = DEFAULT_IMAGE_DEPTH) -> bytes:
    if depth not in (8, 16):
        raise ValueError(f"unsupported bit depth {depth}")
    peak = (1 << depth) - 1
    raw = np.floor(img.pixels.astype(np.float64) * peak + 0.5)
    raw = np.clip(raw, 0, peak).astype("<u1" if depth == 8 else "<u2")
    header = _IMAGE_HEADER.pack(IMAGE_MAGIC, IMAGE_VERSION, img.width, img.height,
                                CameraImage.CHANNELS, depth)
    return header + raw.tobytes()


def image_from_bytes(data: bytes, camera_id: str = "", path=None) -> CameraImage:
    if len(data) < _IMAGE_HEADER.size:
        raise DataFormatError(
            f"truncated header: need {_IMAGE_HEADER.size} bytes, got {len(data)}",
            path=path, offset=len(data))
    magic, version, width, height, channels, depth = _IMAGE_HEADER.unpack_from(data, 0)
    if magic != IMAGE_MAGIC:
        raise DataFormatError(f"bad magic {magic!r}, expected {IMAGE_MAGIC!r}", path=path, offset=0)
    if version != IMAGE_VERSION:
        raise DataFormatError(f"unsupported version {version}", path=path, offset=4)
    if channels != CameraImage.CHANNELS:
        raise DataFormatError(f"unsupported channel count {channels}", path=path, offset=14)
    if depth not in (8, 16):
        raise DataFormatError(f"unsupported bit depth {depth}", path=path, offset=16)
    peak = (1 << depth) - 1
    expected = width * height * channels * (depth // 8)
    body = data[_IMAGE_HEADER.size:]
    if len(body) != expected:
        raise DataFormatError(
            f"payload length {len(body)} != expected {expected}",
            path=path, offset=_IMAGE_HEADER.size + min(len(body), expected))
    raw = np.frombuffer(body, dtype="<u1" if depth == 8 else "<u2").reshape(height, width, channels)
    pixels = (raw.astype(np.float64) / peak).astype(ARRAY_DTYPE)
    return CameraImage(pixels, camera_id)


def write_image(img: CameraImage, path: str | Path, depth: int = DEFAULT_IMAGE_DEPTH) -> None:
    Path(path).write_bytes(image_to_bytes(img, depth))


def read_image(path: str | Path, camera_id: str = "") -> CameraImage:
    return image_from_bytes(Path(path).read_bytes(), camera_id, path=path)


# ---------------------------------------------------------------------------
# calibrations (.json)
# ---------------------------------------------------------------------------


def calibration_to_dict(calib: Calibration) -> dict:
    return {
        "camera_id": calib.camera_id,
        "rotation": [[float(v) for v in row] for row in calib.rotation],
        "translation": [float(v) for v in calib.translation],
        "perturbed": calib.perturbed,
    }


def calibration_from_dict(obj: Mapping, path=None) -> Calibration:
    try:
        return Calibration(
            np.array(obj["rotation"], dtype=np.float64),
            np.array(obj["translation"], dtype=np.float64),
            str(obj.get("camera_id", "")),
            bool(obj.get("perturbed", False)),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise DataFormatError(f"bad calibration record: {exc}", path=path) from exc


def write_calibration(calib: Calibration, path: str | Path) -> None:
    Path(path).write_text(json.dumps(calibration_to_dict(calib)) + "\n")


def read_calibration(path: str | Path) -> Calibration:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"invalid JSON: {exc.msg}", path=path, line=exc.lineno) from exc
    return calibration_from_dict(obj, path=path)


# ---------------------------------------------------------------------------
# annotations (.jsonl)
# ---------------------------------------------------------------------------

_BOX_KEYS = ("cx", "cy", "cz", "l", "w", "h", "yaw")


@dataclass(frozen=True)
class AnnotationRecord:
    """Per-frame ground truth; unknown JSON keys survive a round-trip."""

    frame_id: str
    sequence_id: str
    ground_truth: tuple[GroundTruth, ...]
    extra: Mapping = field(default_factory=dict)
    box_extras: tuple[Mapping, ...] = ()


def _parse_box(obj: Mapping, line: int, path) -> tuple[GroundTruth, dict]:
    for key in _BOX_KEYS:
        if key not in obj:
            raise DataFormatError(f"box missing field {key!r}", path=path, line=line)
        if not isinstance(obj[key], (int, float)) or isinstance(obj[key], bool):
            raise DataFormatError(f"box field {key!r} must be a number", path=path, line=line)
    occ_str = obj.get("occlusion")
    try:
        occlusion = Occlusion(occ_str)
    except ValueError:
        valid = ", ".join(o.value for o in Occlusion)
        raise DataFormatError(
            f"unknown occlusion {occ_str!r} (expected one of: {valid})", path=path, line=line
        ) from None
    box = Box3D(*(float(obj[k]) for k in _BOX_KEYS))
    if box.l <= 0 or box.w <= 0 or box.h <= 0:
        raise DataFormatError(
            f"box dimensions must be positive (l={box.l}, w={box.w}, h={box.h})",
            path=path, line=line)
    gt = GroundTruth(box, occlusion, str(obj.get("track_id", "")))
    known = set(_BOX_KEYS) | {"occlusion", "track_id"}
    extras = {k: v for k, v in obj.items() if k not in known}
    return gt, extras


def parse_annotation_line(text: str, line: int = 1, path=None) -> AnnotationRecord:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"invalid JSON: {exc.msg}", path=path, line=line) from exc
    if not isinstance(obj, dict):
        raise DataFormatError("annotation record must be an object", path=path, line=line)
    for key in ("frame_id", "sequence_id"):
        if key not in obj:
            raise DataFormatError(f"annotation record missing {key!r}", path=path, line=line)
    boxes_raw = obj.get("boxes", [])
    if not isinstance(boxes_raw, list):
        raise DataFormatError("'boxes' must be an array", path=path, line=line)
    gts, extras = [], []
    seen_tracks = set()
    for raw in boxes_raw:
        gt, ex = _parse_box(raw, line, path)
        if gt.track_id and gt.track_id in seen_tracks:
            raise DataFormatError(
                f"duplicate track {gt.track_id!r} in frame {obj['frame_id']!r}",
                path=path, line=line)
        seen_tracks.add(gt.track_id)
        gts.append(gt)
        extras.append(ex)
    record_extra = {k: v for k, v in obj.items() if k not in ("frame_id", "sequence_id", "boxes")}
    return AnnotationRecord(
        str(obj["frame_id"]), str(obj["sequence_id"]), tuple(gts), record_extra, tuple(extras)
    )


def annotation_record_to_json(rec: AnnotationRecord) -> str:
    boxes = []
    for i, gt in enumerate(rec.ground_truth):
        b = gt.box
        obj = {k: float(getattr(b, k)) for k in _BOX_KEYS}
        obj["occlusion"] = gt.occlusion.value
        obj["track_id"] = gt.track_id
        if i < len(rec.box_extras):
            obj.update(rec.box_extras[i])
        boxes.append(obj)
    out = {"frame_id": rec.frame_id, "sequence_id": rec.sequence_id, "boxes": boxes}
    out.update(rec.extra)
    return json.dumps(out)


def read_annotations(path: str | Path) -> list[AnnotationRecord]:
    """All frame records in file order; duplicate (frame, track) pairs fail."""
    records = []
    seen_frames: set[str] = set()
    with open(path) as fh:
        for line_no, text in enumerate(fh, start=1):
            if not text.strip():
                continue
            rec = parse_annotation_line(text, line_no, path)
            if rec.frame_id in seen_frames:
                raise DataFormatError(f"duplicate frame {rec.frame_id!r}", path=path, line=line_no)
            seen_frames.add(rec.frame_id)
            records.append(rec)
    return records


def write_annotations(records: Iterable[AnnotationRecord], path: str | Path) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(annotation_record_to_json(rec) + "\n")


# ---------------------------------------------------------------------------
# detections (.jsonl)
# ---------------------------------------------------------------------------


def parse_detection_line(text: str, line: int = 1, path=None) -> Detection:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"invalid JSON: {exc.msg}", path=path, line=line) from exc
    if not isinstance(obj, dict):
        raise DataFormatError("detection record must be an object", path=path, line=line)
    if "frame_id" not in obj:
        raise DataFormatError("detection record missing 'frame_id'", path=path, line=line)
    for key in _BOX_KEYS + ("score",):
        if key not in obj:
            raise DataFormatError(f"detection record missing {key!r}", path=path, line=line)
        if not isinstance(obj[key], (int, float)) or isinstance(obj[key], bool):
            raise DataFormatError(f"detection field {key!r} must be a number", path=path, line=line)
    score = float(obj["score"])
    if not 0.0 <= score <= 1.0:
        raise DataFormatError(f"score {score} outside [0, 1]", path=path, line=line)
    box = Box3D(*(float(obj[k]) for k in _BOX_KEYS))
    return Detection(box, score, str(obj["frame_id"]))


def read_detections(path: str | Path) -> dict[str, list[Detection]]:
    """Detections grouped by frame_id, preserving file order within a frame."""
    grouped: dict[str, list[Detection]] = {}
    with open(path) as fh:
        for line_no, text in enumerate(fh, start=1):
            if not text.strip():
                continue
            det = parse_detection_line(text, line_no, path)
            grouped.setdefault(det.frame_id, []).append(det)
    return grouped


def write_detections(dets: Iterable[Detection], path: str | Path) -> None:
    with open(path, "w") as fh:
        for det in dets:
            b = det.box
            obj = {"frame_id": det.frame_id}
            obj.update({k: float(getattr(b, k)) for k in _BOX_KEYS})
            obj["score"] = float(det.score)
            fh.write(json.dumps(obj) + "\n")


# ---------------------------------------------------------------------------
# evaluation reports (.csv / .json)
# ---------------------------------------------------------------------------

_CORRUPTION_ORDER = {
    name: i
    for i, name in enumerate(
        ["none", "lidar_gaussian", "cutout", "crosstalk", "density_decrease", "fov_loss",
         "camera_gaussian", "fog", "sunlight", "spatial_misalign",
         "temporal_misalign_camera", "temporal_misalign_lidar"]
    )
}
_STRATUM_ORDER = {
    name: i
    for i, name in enumerate(
        ["all", "near", "mid", "far", "none", "partial", "heavy"]
        + [f"{d}/{o}" for d in ("near", "mid", "far") for o in ("none", "partial", "heavy")]
    )
}


def _row_sort_key(row: ReportRow):
    return (
        _CORRUPTION_ORDER.get(row.corruption, len(_CORRUPTION_ORDER)),
        row.corruption,
        -1 if row.severity is None else row.severity,
        _STRATUM_ORDER.get(row.stratum, len(_STRATUM_ORDER)),
        row.stratum,
    )


def _ap_columns(thresholds: Sequence[float]) -> list[str]:
    return [f"ap_iou_{t:g}" for t in thresholds]


def _write_report_csv(report: EvalReport, fh) -> None:
    rows = sorted(report.rows, key=_row_sort_key)
    writer = csv.writer(fh)
    writer.writerow(
        ["corruption", "level", "stratum"]
        + _ap_columns(report.iou_thresholds)
        + ["n_gt", "n_tp", "n_fp"]
    )
    for r in rows:
        writer.writerow(
            [r.corruption, "-" if r.severity is None else r.severity, r.stratum]
            + [repr(v) for v in r.ap_percent]
            + [r.n_gt, r.n_tp, r.n_fp]
        )


def write_report(report: EvalReport, path, format: str = "csv") -> None:
    """Emit the report with a fixed column set and deterministic row order.

    ``path`` may also be an open text stream when format is csv.
    """
    rows = sorted(report.rows, key=_row_sort_key)
    if format == "csv":
        if hasattr(path, "write"):
            _write_report_csv(report, path)
        else:
            with open(path, "w", newline="") as fh:
                _write_report_csv(report, fh)
    elif format == "json":
        obj = {
            "iou_thresholds": list(report.iou_thresholds),
            "rows": [
                {
                    "corruption": r.corruption,
                    "level": r.severity,
                    "stratum": r.stratum,
                    "ap_percent": list(r.ap_percent),
                    "n_gt": r.n_gt,
                    "n_tp": r.n_tp,
                    "n_fp": r.n_fp,
                }
                for r in rows
            ],
        }
        Path(path).write_text(json.dumps(obj, indent=2) + "\n")
    else:
        raise ValueError(f"unknown report format {format!r} (expected csv or json)")


def read_report(path: str | Path, format: str = "csv") -> EvalReport:
    path = Path(path)
    if format == "json":
        obj = json.loads(path.read_text())
        rows = tuple(
            ReportRow(r["corruption"], r["level"], r["stratum"], tuple(r["ap_percent"]),
                      int(r["n_gt"]), int(r["n_tp"]), int(r["n_fp"]))
            for r in obj["rows"]
        )
        return EvalReport(tuple(obj["iou_thresholds"]), rows)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError("empty report file", path=path, line=1) from None
        ap_cols = [c for c in header if c.startswith("ap_iou_")]
        thresholds = tuple(float(c.removeprefix("ap_iou_")) for c in ap_cols)
        rows = []
        for line_no, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise DataFormatError(
                    f"expected {len(header)} columns, got {len(rec)}", path=path, line=line_no)
            corruption, level, stratum = rec[0], rec[1], rec[2]
            aps = tuple(float(v) for v in rec[3:3 + len(ap_cols)])
            n_gt, n_tp, n_fp = (int(v) for v in rec[3 + len(ap_cols):])
            rows.append(ReportRow(corruption, None if level == "-" else int(level),
                                  stratum, aps, n_gt, n_tp, n_fp))
    return EvalReport(thresholds, tuple(rows))


# ---------------------------------------------------------------------------
# dataset tree adapter
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LayoutConfig:
    """Path patterns of the dataset tree plus the source yaw convention.

    Patterns are relative to the dataset root and may use ``{sequence}``,
    ``{frame}`` and ``{camera}``. ``yaw_convention`` is one of
    ``ccw_from_x`` (native), ``cw_from_x``, ``ccw_from_y``, ``cw_from_y``.
    """

    sequences_dir: str = "sequences"
    index: str = "sequences/{sequence}/frames.json"
    annotations: str = "sequences/{sequence}/annotations.jsonl"
    cloud: str = "sequences/{sequence}/clouds/{frame}.r3pc"
    image: str = "sequences/{sequence}/images/{camera}/{frame}.r3im"
    calibration: str = "sequences/{sequence}/calib/{camera}/{frame}.json"
    yaw_convention: str = "ccw_from_x"

    @classmethod
    def from_file(cls, path: str | Path) -> "LayoutConfig":
        obj = json.loads(Path(path).read_text())
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(obj) - known
        if unknown:
            raise DataFormatError(f"unknown layout config keys: {sorted(unknown)}", path=path)
        return cls(**obj)

    def convert_yaw(self, yaw: float) -> float:
        if self.yaw_convention == "ccw_from_x":
            return yaw
        if self.yaw_convention == "cw_from_x":
            return -yaw
        if self.yaw_convention == "ccw_from_y":
            return yaw + math.pi / 2.0
        if self.yaw_convention == "cw_from_y":
            return math.pi / 2.0 - yaw
        raise ValueError(f"unknown yaw convention {self.yaw_convention!r}")


DEFAULT_LAYOUT = LayoutConfig()


def _frame_index(root: Path, seq: str, layout: LayoutConfig) -> tuple[list[str], list[dict]]:
    index_path = root / layout.index.format(sequence=seq)
    try:
        obj = json.loads(index_path.read_text())
    except FileNotFoundError:
        raise DataFormatError("missing frames.json", path=index_path) from None
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"invalid JSON: {exc.msg}", path=index_path, line=exc.lineno) from exc
    cameras = list(obj.get("cameras", []))
    frames = sorted(obj.get("frames", []), key=lambda f: f["index"])
    return cameras, frames


def read_dataset(
    root: str | Path,
    layout: LayoutConfig = DEFAULT_LAYOUT,
    strict: bool = True,
    warn=None,
) -> Iterator[FrameSample]:
    """Lazily yield frames in (sequence, index) order, validating each.

    Missing modalities raise in strict mode; otherwise the frame is skipped
    and ``warn`` (a callable taking a message) is notified. An absent or
    empty sequences directory yields nothing.
    """
    root = Path(root)
    seq_root = root / layout.sequences_dir
    if not seq_root.is_dir():
        return
    for seq_dir in sorted(p for p in seq_root.iterdir() if p.is_dir()):
        seq = seq_dir.name
        cameras, frames = _frame_index(root, seq, layout)
        ann_path = root / layout.annotations.format(sequence=seq)
        annotations: dict[str, AnnotationRecord] = {}
        if ann_path.exists():
            annotations = {rec.frame_id: rec for rec in read_annotations(ann_path)}
        for entry in frames:
            frame_id = str(entry["frame_id"])
            index = int(entry["index"])
            try:
                frame = _load_frame(root, seq, frame_id, index, cameras, annotations, layout)
            except (DataFormatError, FileNotFoundError) as exc:
                if strict:
                    if isinstance(exc, FileNotFoundError):
                        raise DataFormatError(
                            f"frame {frame_id!r}: missing file {exc.filename}",
                            path=exc.filename) from exc
                    raise
                if warn is not None:
                    warn(f"skipping frame {frame_id!r}: {exc}")
                continue
            problems = validate_frame(frame)
            if problems:
                msg = f"frame {frame_id!r} invalid: " + "; ".join(problems)
                if strict:
                    raise DataFormatError(msg)
                if warn is not None:
                    warn("skipping " + msg)
                continue
            yield frame


def _load_frame(root, seq, frame_id, index, cameras, annotations, layout) -> FrameSample:
    cloud = read_cloud(root / layout.cloud.format(sequence=seq, frame=frame_id), frame_id)
    images, calibs = [], []
    for cam in cameras:
        images.append(read_image(root / layout.image.format(sequence=seq, frame=frame_id, camera=cam), cam))
        calibs.append(read_calibration(root / layout.calibration.format(sequence=seq, frame=frame_id, camera=cam)))
    gts: tuple[GroundTruth, ...] = ()
    rec = annotations.get(frame_id)
    if rec is not None:
        if layout.yaw_convention == "ccw_from_x":
            gts = rec.ground_truth
        else:
            gts = tuple(
                GroundTruth(
                    Box3D(g.box.cx, g.box.cy, g.box.cz, g.box.l, g.box.w, g.box.h,
                          layout.convert_yaw(g.box.yaw)),
                    g.occlusion,
                    g.track_id,
                )
                for g in rec.ground_truth
            )
    return FrameSample(frame_id, seq, index, cloud, tuple(images), tuple(calibs), gts)


def jrdb_adapter(root: str | Path, split: str = "",
                 layout: LayoutConfig = DEFAULT_LAYOUT, strict: bool = True,
                 warn=None) -> Iterator[FrameSample]:
    """Adapter entry point: dataset root plus optional split subdirectory."""
    base = Path(root) / split if split else Path(root)
    return read_dataset(base, layout, strict=strict, warn=warn)


def write_dataset(
    sequences: Sequence[Sequence[FrameSample]],
    root: str | Path,
    layout: LayoutConfig = DEFAULT_LAYOUT,
    image_depth: int = DEFAULT_IMAGE_DEPTH,
) -> None:
    """Materialize sequences as the documented dataset tree."""
    root = Path(root)
    for seq in sequences:
        if not seq:
            continue
        seq_id = seq[0].sequence_id
        index_path = root / layout.index.format(sequence=seq_id)
        index_path.parent.mkdir(parents=True, exist_ok=True)
        cameras = seq[0].camera_ids()
        index_obj = {
            "sequence_id": seq_id,
            "cameras": cameras,
            "frames": [{"frame_id": f.frame_id, "index": f.index_in_sequence} for f in seq],
        }
        index_path.write_text(json.dumps(index_obj, indent=2) + "\n")

        records = []
        for frame in seq:
            cloud_path = root / layout.cloud.format(sequence=seq_id, frame=frame.frame_id)
            cloud_path.parent.mkdir(parents=True, exist_ok=True)
            write_cloud(frame.cloud, cloud_path)
            for img in frame.images:
                img_path = root / layout.image.format(sequence=seq_id, frame=frame.frame_id,
                                                      camera=img.camera_id)
                img_path.parent.mkdir(parents=True, exist_ok=True)
                write_image(img, img_path, depth=image_depth)
            for calib in frame.calibrations:
                calib_path = root / layout.calibration.format(sequence=seq_id, frame=frame.frame_id,
                                                              camera=calib.camera_id)
                calib_path.parent.mkdir(parents=True, exist_ok=True)
                write_calibration(calib, calib_path)
            records.append(AnnotationRecord(frame.frame_id, seq_id, frame.ground_truth))
        write_annotations(records, root / layout.annotations.format(sequence=seq_id))


def write_manifest(path: str | Path, corruption: str, severity: int | None, seed: int,
                   source: str = "") -> None:
    obj = {
        "corruption": corruption,
        "severity": severity,
        "seed": seed,
        "tool_version": __version__,
        "source": source,
    }
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")
