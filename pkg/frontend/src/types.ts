/**
 * Array layout contracts shared with the native pipeline.
 *
 * Clouds and images are float32, boxes/scores/calibrations float64; every
 * multi-element array is row-major. Conversions never reorder points and
 * never silently cast dtypes: a mismatched array type throws.
 */

/** Point cloud view: xyz has length 3N (x, y, z per point, row-major). */
export interface CloudArray {
  xyz: Float32Array;
  /** Optional per-point reflectance in [0, 1], length N. */
  intensity?: Float32Array;
}

/** Image view: pixels has length height*width*3 (RGB, row-major), in [0, 1]. */
export interface ImageArray {
  width: number;
  height: number;
  pixels: Float32Array;
}

/** Camera-from-LiDAR extrinsics: rotation row-major 3x3, translation xyz meters. */
export interface CalibrationArray {
  rotation: Float64Array; // length 9
  translation: Float64Array; // length 3
  perturbed?: boolean;
}

/** Oriented boxes, 7 doubles per row: cx, cy, cz, l, w, h, yaw. */
export const BOX_FIELDS = 7;

export type OcclusionLabel =
  | "fully_visible"
  | "mostly_visible"
  | "severely_occluded"
  | "fully_occluded";

export const OCCLUSION_LABELS: readonly OcclusionLabel[] = [
  "fully_visible",
  "mostly_visible",
  "severely_occluded",
  "fully_occluded",
];

export type Severity = 1 | 2 | 3;

export const LIDAR_KINDS = [
  "lidar_gaussian",
  "cutout",
  "crosstalk",
  "density_decrease",
  "fov_loss",
] as const;
export const CAMERA_KINDS = ["camera_gaussian", "fog", "sunlight"] as const;
export const CROSS_KINDS = [
  "spatial_misalign",
  "temporal_misalign_camera",
  "temporal_misalign_lidar",
] as const;

export type LidarKind = (typeof LIDAR_KINDS)[number];
export type CameraKind = (typeof CAMERA_KINDS)[number];
export type CrossKind = (typeof CROSS_KINDS)[number];
export type CorruptionKind = LidarKind | CameraKind | CrossKind;

export const ALL_KINDS: readonly CorruptionKind[] = [
  ...LIDAR_KINDS,
  ...CAMERA_KINDS,
  ...CROSS_KINDS,
];

export function assertFloat32(arr: unknown, what: string): asserts arr is Float32Array {
  if (!(arr instanceof Float32Array)) {
    const got = arr?.constructor?.name ?? typeof arr;
    throw new TypeError(`${what} must be a Float32Array, got ${got} (no silent casts)`);
  }
}

export function assertFloat64(arr: unknown, what: string): asserts arr is Float64Array {
  if (!(arr instanceof Float64Array)) {
    const got = arr?.constructor?.name ?? typeof arr;
    throw new TypeError(`${what} must be a Float64Array, got ${got} (no silent casts)`);
  }
}

export function checkCloud(cloud: CloudArray, what = "cloud"): void {
  assertFloat32(cloud.xyz, `${what}.xyz`);
  if (cloud.xyz.length % 3 !== 0) {
    throw new RangeError(`${what}.xyz length ${cloud.xyz.length} is not a multiple of 3`);
  }
  if (cloud.intensity !== undefined) {
    assertFloat32(cloud.intensity, `${what}.intensity`);
    if (cloud.intensity.length !== cloud.xyz.length / 3) {
      throw new RangeError(
        `${what}.intensity length ${cloud.intensity.length} != point count ${cloud.xyz.length / 3}`,
      );
    }
  }
}

export function checkImage(img: ImageArray, what = "image"): void {
  assertFloat32(img.pixels, `${what}.pixels`);
  if (img.pixels.length !== img.width * img.height * 3) {
    throw new RangeError(
      `${what}.pixels length ${img.pixels.length} != width*height*3 = ${img.width * img.height * 3}`,
    );
  }
}

export function checkCalibration(calib: CalibrationArray, what = "calibration"): void {
  assertFloat64(calib.rotation, `${what}.rotation`);
  assertFloat64(calib.translation, `${what}.translation`);
  if (calib.rotation.length !== 9) {
    throw new RangeError(`${what}.rotation must have 9 entries, got ${calib.rotation.length}`);
  }
  if (calib.translation.length !== 3) {
    throw new RangeError(`${what}.translation must have 3 entries, got ${calib.translation.length}`);
  }
}

export function checkBoxes(boxes: Float64Array, what = "boxes"): number {
  assertFloat64(boxes, what);
  if (boxes.length % BOX_FIELDS !== 0) {
    throw new RangeError(`${what} length ${boxes.length} is not a multiple of ${BOX_FIELDS}`);
  }
  return boxes.length / BOX_FIELDS;
}
