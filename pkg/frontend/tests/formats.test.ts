import { describe, expect, it } from "vitest";

import {
  FormatError,
  decodeCloud,
  decodeImage,
  encodeAnnotationLine,
  encodeCloud,
  encodeDetectionLines,
  encodeImage,
  parseReportCsv,
} from "../src/index.js";
import { cloudsEqual, makeRng, randomCloud, randomImage } from "./helpers.js";

describe("cloud codec", () => {
  it("round-trips fuzzed clouds bit-exactly", () => {
    const rng = makeRng(1);
    for (let t = 0; t < 30; t++) {
      const cloud = randomCloud(rng, Math.floor(rng() * 300), t % 2 === 0);
      expect(cloudsEqual(decodeCloud(encodeCloud(cloud)), cloud)).toBe(true);
    }
  });

  it("round-trips the empty cloud", () => {
    const empty = { xyz: new Float32Array(0) };
    expect(decodeCloud(encodeCloud(empty)).xyz.length).toBe(0);
  });

  it("rejects a bad magic at offset 0", () => {
    const data = encodeCloud({ xyz: new Float32Array(3) });
    data[0] = 0x58;
    expect(() => decodeCloud(data)).toThrowError(FormatError);
    try {
      decodeCloud(data);
    } catch (err) {
      expect((err as FormatError).offset).toBe(0);
    }
  });

  it("rejects truncated payloads", () => {
    const data = encodeCloud({ xyz: new Float32Array(9) });
    expect(() => decodeCloud(data.subarray(0, data.length - 2))).toThrowError(/payload/);
  });

  it("rejects float64 input instead of casting", () => {
    const bad = { xyz: new Float64Array(3) } as unknown as { xyz: Float32Array };
    expect(() => encodeCloud(bad)).toThrowError(/Float32Array/);
  });
});

describe("image codec", () => {
  it("applies the documented quantization rule", () => {
    const img = { width: 1, height: 1, pixels: Float32Array.from([0, 1, 0.5]) };
    const data = encodeImage(img, 8);
    expect(Array.from(data.subarray(data.length - 3))).toEqual([0, 255, 128]);
  });

  it("round-trips lattice values exactly at depth 16", () => {
    const rng = makeRng(2);
    const raw = new Float32Array(4 * 3 * 3);
    for (let i = 0; i < raw.length; i++) {
      raw[i] = Math.fround(Math.floor(rng() * 65536) / 65535);
    }
    const img = { width: 3, height: 4, pixels: raw };
    const back = decodeImage(encodeImage(img, 16));
    expect(back.pixels).toEqual(raw);
  });

  it("clamps out-of-range samples", () => {
    const img = { width: 1, height: 1, pixels: Float32Array.from([-0.5, 2.0, 0.25]) };
    const back = decodeImage(encodeImage(img, 16));
    expect(back.pixels[0]).toBe(0);
    expect(back.pixels[1]).toBe(1);
  });

  it("rejects a wrong magic", () => {
    const data = encodeImage(randomImage(makeRng(3), 2, 2));
    data[3] = 0x00;
    expect(() => decodeImage(data)).toThrowError(FormatError);
  });
});

describe("JSONL encoders", () => {
  it("writes annotation records with occlusion labels", () => {
    const line = encodeAnnotationLine("f0", "s0", {
      boxes: Float64Array.from([1, 2, 0.9, 0.6, 0.6, 1.8, 0.2]),
      occlusions: ["mostly_visible"],
      trackIds: ["p1"],
    });
    const obj = JSON.parse(line);
    expect(obj.frame_id).toBe("f0");
    expect(obj.boxes[0].occlusion).toBe("mostly_visible");
    expect(obj.boxes[0].yaw).toBeCloseTo(0.2, 12);
  });

  it("rejects unknown occlusion labels", () => {
    expect(() =>
      encodeAnnotationLine("f0", "s0", {
        boxes: Float64Array.from([0, 0, 0, 1, 1, 1, 0]),
        occlusions: ["Mostly_visible" as never],
      }),
    ).toThrowError(/occlusion/);
  });

  it("writes one detection object per line", () => {
    const text = encodeDetectionLines(
      "f3",
      Float64Array.from([1, 2, 0.9, 0.6, 0.6, 1.8, 0, 4, 5, 0.9, 0.6, 0.6, 1.8, 0.1]),
      Float64Array.from([0.9, 0.4]),
    );
    const lines = text.trim().split("\n");
    expect(lines).toHaveLength(2);
    expect(JSON.parse(lines[1]).score).toBe(0.4);
  });

  it("rejects mismatched score count", () => {
    expect(() =>
      encodeDetectionLines("f", Float64Array.from([0, 0, 0, 1, 1, 1, 0]), new Float64Array(2)),
    ).toThrowError(/scores length/);
  });
});

describe("report parsing", () => {
  it("parses the CSV column layout including the baseline level", () => {
    const report = parseReportCsv(
      "corruption,level,stratum,ap_iou_0.3,ap_iou_0.5,n_gt,n_tp,n_fp\n" +
        "none,-,all,73.18,24.73,100,73,5\n" +
        "fov_loss,2,all,17.85,4.5,100,20,9\n",
    );
    expect(report.iouThresholds).toEqual([0.3, 0.5]);
    expect(report.rows[0].level).toBeNull();
    expect(report.rows[1].level).toBe(2);
    expect(report.rows[1].apPercent[0]).toBeCloseTo(17.85, 12);
  });
});
