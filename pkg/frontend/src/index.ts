export {
  ALL_KINDS,
  BOX_FIELDS,
  CAMERA_KINDS,
  CROSS_KINDS,
  LIDAR_KINDS,
  OCCLUSION_LABELS,
  type CalibrationArray,
  type CameraKind,
  type CloudArray,
  type CorruptionKind,
  type CrossKind,
  type ImageArray,
  type LidarKind,
  type OcclusionLabel,
  type Severity,
} from "./types.js";
export {
  FormatError,
  decodeCalibration,
  decodeCloud,
  decodeImage,
  encodeAnnotationLine,
  encodeCalibration,
  encodeCloud,
  encodeDetectionLines,
  encodeImage,
  parseReportCsv,
  parseReportJson,
  type EvalReport,
  type EvalRow,
  type GroundTruthArrays,
} from "./formats.js";
export { corrupt, type CorruptOptions } from "./corrupt.js";
export { evaluate, type DetectionArrays, type EvalFrame, type EvaluateOptions } from "./evaluate.js";
export { writeDataset, defaultFrameId, type DatasetOptions, type FrameData } from "./dataset.js";
export { resolveCommand, runCli, withTempDir, type RunnerOptions } from "./runner.js";
