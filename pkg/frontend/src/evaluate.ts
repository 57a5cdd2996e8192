/**
 * evaluate(): score detections against ground truth with the native
 * stratified AP protocol. Arrays are serialized into the dataset /
 * detections formats, cmd_eval runs, and the JSON report maps back —
 * numerically identical to a native run on the same data.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { FrameData, writeDataset } from "./dataset.js";
import { encodeDetectionLines, EvalReport, GroundTruthArrays, parseReportJson } from "./formats.js";
import { runCli, RunnerOptions, withTempDir } from "./runner.js";
import { CloudArray, checkCloud } from "./types.js";

export interface EvalFrame {
  frameId: string;
  cloud: CloudArray;
  groundTruth: GroundTruthArrays;
}

export interface DetectionArrays {
  frameId: string;
  /** length M*7, rows cx, cy, cz, l, w, h, yaw */
  boxes: Float64Array;
  /** length M, confidences in [0, 1] */
  scores: Float64Array;
}

export interface EvaluateOptions extends RunnerOptions {
  iouThresholds?: number[];
  strata?: "none" | "distance" | "occlusion" | "combined";
  sequenceId?: string;
}

export function evaluate(
  frames: EvalFrame[],
  detections: DetectionArrays[],
  opts: EvaluateOptions = {},
): EvalReport {
  frames.forEach((f, i) => checkCloud(f.cloud, `frames[${i}].cloud`));
  const thresholds = opts.iouThresholds ?? [0.3, 0.5];
  return withTempDir((dir) => {
    const gtRoot = path.join(dir, "gt");
    const data: FrameData[] = frames.map((f) => ({
      frameId: f.frameId,
      cloud: f.cloud,
      groundTruth: f.groundTruth,
    }));
    writeDataset(gtRoot, data, { sequenceId: opts.sequenceId ?? "seq000" });

    const detPath = path.join(dir, "detections.jsonl");
    fs.writeFileSync(
      detPath,
      detections.map((d) => encodeDetectionLines(d.frameId, d.boxes, d.scores)).join(""),
    );

    const reportPath = path.join(dir, "report.json");
    runCli(
      ["eval", "--gt", gtRoot, "--detections", detPath,
       "--iou", thresholds.join(","), "--strata", opts.strata ?? "none",
       "--out", reportPath, "--format", "json"],
      opts,
    );
    return parseReportJson(fs.readFileSync(reportPath, "utf8"));
  }, opts);
}
