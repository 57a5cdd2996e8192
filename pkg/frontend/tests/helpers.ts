import type { CalibrationArray, CloudArray, ImageArray } from "../src/index.js";

/** mulberry32: small deterministic PRNG for test fixtures. */
export function makeRng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function randomCloud(rng: () => number, n: number, withIntensity = false): CloudArray {
  const xyz = new Float32Array(3 * n);
  for (let i = 0; i < xyz.length; i++) xyz[i] = Math.fround((rng() - 0.5) * 40);
  if (!withIntensity) return { xyz };
  const intensity = new Float32Array(n);
  for (let i = 0; i < n; i++) intensity[i] = Math.fround(rng());
  return { xyz, intensity };
}

export function randomImage(rng: () => number, width: number, height: number): ImageArray {
  const pixels = new Float32Array(width * height * 3);
  for (let i = 0; i < pixels.length; i++) pixels[i] = Math.fround(rng());
  return { width, height, pixels };
}

export function identityCalibration(): CalibrationArray {
  return {
    rotation: Float64Array.from([1, 0, 0, 0, 1, 0, 0, 0, 1]),
    translation: new Float64Array(3),
  };
}

export function cloudsEqual(a: CloudArray, b: CloudArray): boolean {
  if (a.xyz.length !== b.xyz.length) return false;
  const av = new Uint32Array(a.xyz.buffer, a.xyz.byteOffset, a.xyz.length);
  const bv = new Uint32Array(b.xyz.buffer, b.xyz.byteOffset, b.xyz.length);
  for (let i = 0; i < av.length; i++) if (av[i] !== bv[i]) return false;
  if ((a.intensity === undefined) !== (b.intensity === undefined)) return false;
  if (a.intensity && b.intensity) {
    if (a.intensity.length !== b.intensity.length) return false;
    for (let i = 0; i < a.intensity.length; i++) {
      if (!Object.is(a.intensity[i], b.intensity[i])) return false;
    }
  }
  return true;
}

export function imagesEqual(a: ImageArray, b: ImageArray): boolean {
  if (a.width !== b.width || a.height !== b.height || a.pixels.length !== b.pixels.length) {
    return false;
  }
  for (let i = 0; i < a.pixels.length; i++) {
    if (!Object.is(a.pixels[i], b.pixels[i])) return false;
  }
  return true;
}

export function float64Equal(a: Float64Array, b: Float64Array): boolean {
  if (a.length !== b.length) return false;
  for (let i = 0; i < a.length; i++) if (!Object.is(a[i], b[i])) return false;
  return true;
}
