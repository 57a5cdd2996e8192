/**
 * Byte-exact codecs for the pipeline's file formats (all little-endian):
 * `.r3pc` point clouds, `.r3im` images, calibration JSON, annotation and
 * detection JSONL, and the evaluation report (CSV or JSON).
 *
 * Image samples quantize as floor(v * (2^depth - 1) + 0.5), clipped, and
 * read back as float32(raw / (2^depth - 1)) computed in float64 — matching
 * the native reader/writer bit for bit.
 */

import {
  BOX_FIELDS,
  CalibrationArray,
  CloudArray,
  ImageArray,
  OcclusionLabel,
  OCCLUSION_LABELS,
  checkBoxes,
  checkCalibration,
  checkCloud,
  checkImage,
} from "./types.js";

const CLOUD_MAGIC = 0x43503352; // "R3PC" read as LE u32
const IMAGE_MAGIC = 0x4d493352; // "R3IM"
const CLOUD_HEADER = 12;
const IMAGE_HEADER = 18;

export class FormatError extends Error {
  constructor(message: string, readonly offset?: number) {
    super(offset === undefined ? message : `${message} (byte offset ${offset})`);
    this.name = "FormatError";
  }
}

// ---------------------------------------------------------------------------
// clouds (.r3pc)
// ---------------------------------------------------------------------------

export function encodeCloud(cloud: CloudArray): Uint8Array {
  checkCloud(cloud);
  const n = cloud.xyz.length / 3;
  const width = cloud.intensity ? 4 : 3;
  const out = new Uint8Array(CLOUD_HEADER + n * width * 4);
  const view = new DataView(out.buffer);
  view.setUint32(0, CLOUD_MAGIC, true);
  view.setUint16(4, 1, true); // version
  view.setUint32(6, n, true);
  view.setUint16(10, cloud.intensity ? 1 : 0, true);
  let off = CLOUD_HEADER;
  for (let i = 0; i < n; i++) {
    view.setFloat32(off, cloud.xyz[3 * i], true);
    view.setFloat32(off + 4, cloud.xyz[3 * i + 1], true);
    view.setFloat32(off + 8, cloud.xyz[3 * i + 2], true);
    off += 12;
    if (cloud.intensity) {
      view.setFloat32(off, cloud.intensity[i], true);
      off += 4;
    }
  }
  return out;
}

export function decodeCloud(data: Uint8Array): CloudArray {
  if (data.length < CLOUD_HEADER) {
    throw new FormatError(`truncated header: need ${CLOUD_HEADER} bytes, got ${data.length}`, data.length);
  }
  const view = new DataView(data.buffer, data.byteOffset, data.byteLength);
  if (view.getUint32(0, true) !== CLOUD_MAGIC) {
    throw new FormatError("bad magic, expected R3PC", 0);
  }
  const version = view.getUint16(4, true);
  if (version !== 1) {
    throw new FormatError(`unsupported version ${version}`, 4);
  }
  const n = view.getUint32(6, true);
  const hasIntensity = (view.getUint16(10, true) & 1) !== 0;
  const width = hasIntensity ? 4 : 3;
  const expected = n * width * 4;
  if (data.length - CLOUD_HEADER !== expected) {
    throw new FormatError(
      `payload length ${data.length - CLOUD_HEADER} != expected ${expected}`,
      CLOUD_HEADER + Math.min(data.length - CLOUD_HEADER, expected),
    );
  }
  const xyz = new Float32Array(3 * n);
  const intensity = hasIntensity ? new Float32Array(n) : undefined;
  let off = CLOUD_HEADER;
  for (let i = 0; i < n; i++) {
    xyz[3 * i] = view.getFloat32(off, true);
    xyz[3 * i + 1] = view.getFloat32(off + 4, true);
    xyz[3 * i + 2] = view.getFloat32(off + 8, true);
    off += 12;
    if (intensity) {
      intensity[i] = view.getFloat32(off, true);
      off += 4;
    }
  }
  return intensity ? { xyz, intensity } : { xyz };
}

// ---------------------------------------------------------------------------
// images (.r3im)
// ---------------------------------------------------------------------------

export function encodeImage(img: ImageArray, depth: 8 | 16 = 16): Uint8Array {
  checkImage(img);
  const peak = (1 << depth) - 1;
  const count = img.pixels.length;
  const out = new Uint8Array(IMAGE_HEADER + count * (depth / 8));
  const view = new DataView(out.buffer);
  view.setUint32(0, IMAGE_MAGIC, true);
  view.setUint16(4, 1, true);
  view.setUint32(6, img.width, true);
  view.setUint32(10, img.height, true);
  view.setUint16(14, 3, true);
  view.setUint16(16, depth, true);
  for (let i = 0; i < count; i++) {
    // float32 sample widens exactly to float64; match numpy's f64 quantize
    let q = Math.floor(img.pixels[i] * peak + 0.5);
    if (q < 0) q = 0;
    if (q > peak) q = peak;
    if (depth === 8) view.setUint8(IMAGE_HEADER + i, q);
    else view.setUint16(IMAGE_HEADER + 2 * i, q, true);
  }
  return out;
}

export function decodeImage(data: Uint8Array): ImageArray {
  if (data.length < IMAGE_HEADER) {
    throw new FormatError(`truncated header: need ${IMAGE_HEADER} bytes, got ${data.length}`, data.length);
  }
  const view = new DataView(data.buffer, data.byteOffset, data.byteLength);
  if (view.getUint32(0, true) !== IMAGE_MAGIC) {
    throw new FormatError("bad magic, expected R3IM", 0);
  }
  if (view.getUint16(4, true) !== 1) {
    throw new FormatError(`unsupported version ${view.getUint16(4, true)}`, 4);
  }
  const width = view.getUint32(6, true);
  const height = view.getUint32(10, true);
  const channels = view.getUint16(14, true);
  const depth = view.getUint16(16, true);
  if (channels !== 3) throw new FormatError(`unsupported channel count ${channels}`, 14);
  if (depth !== 8 && depth !== 16) throw new FormatError(`unsupported bit depth ${depth}`, 16);
  const peak = (1 << depth) - 1;
  const count = width * height * 3;
  if (data.length - IMAGE_HEADER !== count * (depth / 8)) {
    throw new FormatError(
      `payload length ${data.length - IMAGE_HEADER} != expected ${count * (depth / 8)}`,
      IMAGE_HEADER,
    );
  }
  const pixels = new Float32Array(count);
  for (let i = 0; i < count; i++) {
    const raw = depth === 8 ? view.getUint8(IMAGE_HEADER + i) : view.getUint16(IMAGE_HEADER + 2 * i, true);
    pixels[i] = Math.fround(raw / peak);
  }
  return { width, height, pixels };
}

// ---------------------------------------------------------------------------
// calibrations (.json)
// ---------------------------------------------------------------------------

export function encodeCalibration(calib: CalibrationArray, cameraId: string): string {
  checkCalibration(calib);
  const rot = [0, 1, 2].map((r) => [0, 1, 2].map((c) => calib.rotation[3 * r + c]));
  return (
    JSON.stringify({
      camera_id: cameraId,
      rotation: rot,
      translation: Array.from(calib.translation),
      perturbed: calib.perturbed ?? false,
    }) + "\n"
  );
}

export function decodeCalibration(text: string): CalibrationArray & { cameraId: string } {
  const obj = JSON.parse(text);
  const rotation = new Float64Array(9);
  for (let r = 0; r < 3; r++) {
    for (let c = 0; c < 3; c++) rotation[3 * r + c] = obj.rotation[r][c];
  }
  return {
    rotation,
    translation: Float64Array.from(obj.translation as number[]),
    perturbed: Boolean(obj.perturbed),
    cameraId: String(obj.camera_id ?? ""),
  };
}

// ---------------------------------------------------------------------------
// annotations / detections (JSONL)
// ---------------------------------------------------------------------------

export interface GroundTruthArrays {
  /** length M*7, rows cx, cy, cz, l, w, h, yaw */
  boxes: Float64Array;
  occlusions: OcclusionLabel[];
  trackIds?: string[];
}

export function encodeAnnotationLine(
  frameId: string,
  sequenceId: string,
  gt: GroundTruthArrays | undefined,
): string {
  const boxes: object[] = [];
  if (gt) {
    const m = checkBoxes(gt.boxes, "groundTruth.boxes");
    if (gt.occlusions.length !== m) {
      throw new RangeError(`occlusions length ${gt.occlusions.length} != box count ${m}`);
    }
    for (const occ of gt.occlusions) {
      if (!OCCLUSION_LABELS.includes(occ)) {
        throw new RangeError(`unknown occlusion label ${JSON.stringify(occ)}`);
      }
    }
    for (let i = 0; i < m; i++) {
      const b = gt.boxes.subarray(BOX_FIELDS * i, BOX_FIELDS * (i + 1));
      boxes.push({
        cx: b[0], cy: b[1], cz: b[2], l: b[3], w: b[4], h: b[5], yaw: b[6],
        occlusion: gt.occlusions[i],
        track_id: gt.trackIds?.[i] ?? `t${i}`,
      });
    }
  }
  return JSON.stringify({ frame_id: frameId, sequence_id: sequenceId, boxes });
}

export function encodeDetectionLines(
  frameId: string,
  boxes: Float64Array,
  scores: Float64Array,
): string {
  const m = checkBoxes(boxes, "detections.boxes");
  if (!(scores instanceof Float64Array)) {
    const got = (scores as object)?.constructor?.name ?? typeof scores;
    throw new TypeError(`scores must be a Float64Array, got ${got}`);
  }
  if (scores.length !== m) {
    throw new RangeError(`scores length ${scores.length} != box count ${m}`);
  }
  const lines: string[] = [];
  for (let i = 0; i < m; i++) {
    const b = boxes.subarray(BOX_FIELDS * i, BOX_FIELDS * (i + 1));
    lines.push(
      JSON.stringify({
        frame_id: frameId,
        cx: b[0], cy: b[1], cz: b[2], l: b[3], w: b[4], h: b[5], yaw: b[6],
        score: scores[i],
      }),
    );
  }
  return lines.join("\n") + (lines.length ? "\n" : "");
}

// ---------------------------------------------------------------------------
// evaluation reports
// ---------------------------------------------------------------------------

export interface EvalRow {
  corruption: string;
  level: number | null;
  stratum: string;
  apPercent: number[];
  nGt: number;
  nTp: number;
  nFp: number;
}

export interface EvalReport {
  iouThresholds: number[];
  rows: EvalRow[];
}

export function parseReportJson(text: string): EvalReport {
  const obj = JSON.parse(text);
  return {
    iouThresholds: obj.iou_thresholds,
    rows: obj.rows.map((r: Record<string, unknown>) => ({
      corruption: r.corruption as string,
      level: (r.level ?? null) as number | null,
      stratum: r.stratum as string,
      apPercent: r.ap_percent as number[],
      nGt: r.n_gt as number,
      nTp: r.n_tp as number,
      nFp: r.n_fp as number,
    })),
  };
}

export function parseReportCsv(text: string): EvalReport {
  const lines = text.trim().split("\n");
  if (lines.length === 0 || !lines[0]) throw new FormatError("empty report");
  const header = lines[0].split(",");
  const apCols = header.filter((c) => c.startsWith("ap_iou_"));
  const thresholds = apCols.map((c) => Number(c.slice("ap_iou_".length)));
  const rows: EvalRow[] = [];
  for (const line of lines.slice(1)) {
    if (!line) continue;
    const cells = line.split(",");
    rows.push({
      corruption: cells[0],
      level: cells[1] === "-" ? null : Number(cells[1]),
      stratum: cells[2],
      apPercent: cells.slice(3, 3 + apCols.length).map(Number),
      nGt: Number(cells[3 + apCols.length]),
      nTp: Number(cells[4 + apCols.length]),
      nFp: Number(cells[5 + apCols.length]),
    });
  }
  return { iouThresholds: thresholds, rows };
}
