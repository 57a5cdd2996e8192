/**
 * corrupt(): run any of the eleven corruption kinds on in-memory typed
 * arrays. The frames are serialized into a temp dataset, the native CLI
 * corrupts it, and the affected modality is read back — so results are
 * bit-identical to the native pipeline for the same seed and frame ids.
 *
 * Frames form one ordered sequence; temporal kinds delay one modality
 * within it. Per-frame randomness depends only on (seed, frameId, kind,
 * severity), so batching frames across calls never changes a result.
 */

import * as path from "node:path";

import { defaultFrameId, FrameData, writeDataset, readCalibrationFile, readCloudFile, readImageFile } from "./dataset.js";
import { runCli, RunnerOptions, withTempDir } from "./runner.js";
import {
  CAMERA_KINDS,
  CorruptionKind,
  LIDAR_KINDS,
  Severity,
  checkCalibration,
  checkCloud,
  checkImage,
} from "./types.js";

export interface CorruptOptions extends RunnerOptions {
  /** Frame ids; defaults to f000000, f000001, ... (position in the call). */
  frameIds?: string[];
  sequenceId?: string;
  cameraId?: string;
}

function needsCloud(kind: CorruptionKind): boolean {
  return (LIDAR_KINDS as readonly string[]).includes(kind) || kind === "temporal_misalign_lidar";
}

function needsImage(kind: CorruptionKind): boolean {
  return (CAMERA_KINDS as readonly string[]).includes(kind) || kind === "temporal_misalign_camera";
}

export function corrupt(
  kind: CorruptionKind,
  severity: Severity,
  frames: FrameData[],
  seed: number,
  opts: CorruptOptions = {},
): FrameData[] {
  if (frames.length === 0) return [];
  frames.forEach((frame, i) => {
    if (needsCloud(kind)) {
      if (!frame.cloud) throw new RangeError(`${kind} needs a cloud on frame ${i}`);
      checkCloud(frame.cloud, `frames[${i}].cloud`);
    }
    if (needsImage(kind)) {
      if (!frame.image) throw new RangeError(`${kind} needs an image on frame ${i}`);
      checkImage(frame.image, `frames[${i}].image`);
    }
    if (kind === "spatial_misalign") {
      if (!frame.calibration) throw new RangeError(`spatial_misalign needs a calibration on frame ${i}`);
      checkCalibration(frame.calibration, `frames[${i}].calibration`);
    }
    if (frame.cloud) checkCloud(frame.cloud, `frames[${i}].cloud`);
    if (frame.image) checkImage(frame.image, `frames[${i}].image`);
    if (frame.calibration) checkCalibration(frame.calibration, `frames[${i}].calibration`);
  });

  const seq = opts.sequenceId ?? "seq000";
  const cam = opts.cameraId ?? "cam0";
  const frameIds = frames.map((f, i) => opts.frameIds?.[i] ?? f.frameId ?? defaultFrameId(i));

  return withTempDir((dir) => {
    const input = path.join(dir, "in");
    const output = path.join(dir, "out");
    writeDataset(
      input,
      frames.map((f, i) => ({ ...f, frameId: frameIds[i] })),
      { sequenceId: seq, cameraId: cam },
    );
    runCli(
      ["--seed", String(seed), "corrupt", "--input", input, "--output", output,
       "--corruption", kind, "--severity", String(severity)],
      opts,
    );
    const hasCamera = frames.some((f) => f.image !== undefined || f.calibration !== undefined);
    return frames.map((frame, i) => {
      const out: FrameData = { ...frame, frameId: frameIds[i] };
      if (frame.cloud) out.cloud = readCloudFile(output, seq, frameIds[i]);
      if (hasCamera && frame.image) out.image = readImageFile(output, seq, cam, frameIds[i]);
      if (hasCamera && frame.calibration) {
        out.calibration = readCalibrationFile(output, seq, cam, frameIds[i]);
      }
      return out;
    });
  }, opts);
}
