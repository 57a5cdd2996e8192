/**
 * Write and read the on-disk dataset tree the CLI consumes:
 *
 *   root/sequences/<sequence_id>/
 *     frames.json, annotations.jsonl,
 *     clouds/<frame>.r3pc, images/<cam>/<frame>.r3im, calib/<cam>/<frame>.json
 */

import * as fs from "node:fs";
import * as path from "node:path";

import {
  decodeCalibration,
  decodeCloud,
  decodeImage,
  encodeAnnotationLine,
  encodeCalibration,
  encodeCloud,
  encodeImage,
  GroundTruthArrays,
} from "./formats.js";
import { CalibrationArray, CloudArray, ImageArray } from "./types.js";

export interface FrameData {
  frameId?: string;
  cloud?: CloudArray;
  image?: ImageArray;
  calibration?: CalibrationArray;
  groundTruth?: GroundTruthArrays;
}

export interface DatasetOptions {
  sequenceId?: string;
  cameraId?: string;
}

export function defaultFrameId(index: number): string {
  return `f${String(index).padStart(6, "0")}`;
}

const IDENTITY_CALIBRATION: CalibrationArray = {
  rotation: Float64Array.from([1, 0, 0, 0, 1, 0, 0, 0, 1]),
  translation: new Float64Array(3),
};

/** Materialize frames as one sequence; returns the frame ids in order. */
export function writeDataset(root: string, frames: FrameData[], opts: DatasetOptions = {}): string[] {
  const seq = opts.sequenceId ?? "seq000";
  const cam = opts.cameraId ?? "cam0";
  const seqDir = path.join(root, "sequences", seq);
  const hasCamera = frames.some((f) => f.image !== undefined || f.calibration !== undefined);
  fs.mkdirSync(path.join(seqDir, "clouds"), { recursive: true });
  if (hasCamera) {
    fs.mkdirSync(path.join(seqDir, "images", cam), { recursive: true });
    fs.mkdirSync(path.join(seqDir, "calib", cam), { recursive: true });
  }

  const frameIds: string[] = [];
  const annotationLines: string[] = [];
  frames.forEach((frame, i) => {
    const frameId = frame.frameId ?? defaultFrameId(i);
    frameIds.push(frameId);
    const cloud = frame.cloud ?? { xyz: new Float32Array(0) };
    fs.writeFileSync(path.join(seqDir, "clouds", `${frameId}.r3pc`), encodeCloud(cloud));
    if (hasCamera) {
      const image = frame.image ?? { width: 1, height: 1, pixels: new Float32Array(3) };
      fs.writeFileSync(path.join(seqDir, "images", cam, `${frameId}.r3im`), encodeImage(image));
      const calib = frame.calibration ?? IDENTITY_CALIBRATION;
      fs.writeFileSync(
        path.join(seqDir, "calib", cam, `${frameId}.json`),
        encodeCalibration(calib, cam),
      );
    }
    annotationLines.push(encodeAnnotationLine(frameId, seq, frame.groundTruth));
  });

  fs.writeFileSync(
    path.join(seqDir, "frames.json"),
    JSON.stringify({
      sequence_id: seq,
      cameras: hasCamera ? [cam] : [],
      frames: frameIds.map((frame_id, index) => ({ frame_id, index })),
    }),
  );
  fs.writeFileSync(path.join(seqDir, "annotations.jsonl"), annotationLines.join("\n") + "\n");
  return frameIds;
}

export function readCloudFile(root: string, seq: string, frameId: string): CloudArray {
  return decodeCloud(fs.readFileSync(path.join(root, "sequences", seq, "clouds", `${frameId}.r3pc`)));
}

export function readImageFile(root: string, seq: string, cam: string, frameId: string): ImageArray {
  return decodeImage(fs.readFileSync(path.join(root, "sequences", seq, "images", cam, `${frameId}.r3im`)));
}

export function readCalibrationFile(
  root: string,
  seq: string,
  cam: string,
  frameId: string,
): CalibrationArray {
  const parsed = decodeCalibration(
    fs.readFileSync(path.join(root, "sequences", seq, "calib", cam, `${frameId}.json`), "utf8"),
  );
  return { rotation: parsed.rotation, translation: parsed.translation, perturbed: parsed.perturbed };
}
