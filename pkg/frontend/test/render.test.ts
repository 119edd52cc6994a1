import { describe, expect, it } from "vitest";
import { inflateSync } from "node:zlib";
import { Scene } from "../src/scene.js";
import { sceneToPng } from "../src/png.js";
import { sceneToSvg } from "../src/svg.js";

const SCENE: Scene = {
  width: 64,
  height: 48,
  background: "#ffffff",
  items: [
    { kind: "rect", x: 4, y: 4, width: 10, height: 20, fill: "#0072b2" },
    { kind: "polyline", points: [[0, 0], [63, 47]], stroke: "#d55e00", strokeWidth: 2 },
    { kind: "text", x: 10, y: 40, text: "T=5000", size: 12, fill: "#000000", anchor: "start" },
  ],
};

describe("svg backend", () => {
  it("emits well-formed deterministic markup", () => {
    const a = sceneToSvg(SCENE);
    const b = sceneToSvg(SCENE);
    expect(a).toBe(b);
    expect(a).toContain("<svg");
    expect(a).toContain("</svg>");
    expect(a).toContain("<rect");
    expect(a).toContain("<polyline");
    expect(a).toContain("T=5000");
  });

  it("escapes markup-significant characters", () => {
    const scene: Scene = {
      ...SCENE,
      items: [{ kind: "text", x: 0, y: 10, text: "a<b & c", size: 10, fill: "#000000", anchor: "start" }],
    };
    const svg = sceneToSvg(scene);
    expect(svg).toContain("a&lt;b &amp; c");
  });
});

describe("png backend", () => {
  it("produces a valid signature, dimensions, and non-background pixels", () => {
    const png = sceneToPng(SCENE);
    expect([...png.subarray(0, 8)]).toEqual([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
    expect(png.readUInt32BE(16)).toBe(64); // width from IHDR
    expect(png.readUInt32BE(20)).toBe(48);
    // Decode the IDAT payload and check the rect actually painted.
    const idatStart = png.indexOf(Buffer.from("IDAT"));
    const length = png.readUInt32BE(idatStart - 4);
    const raw = inflateSync(png.subarray(idatStart + 4, idatStart + 4 + length));
    expect(raw.length).toBe((64 * 4 + 1) * 48);
    const px = (x: number, y: number) => {
      const offset = y * (64 * 4 + 1) + 1 + x * 4;
      return [raw[offset], raw[offset + 1], raw[offset + 2]];
    };
    expect(px(8, 10)).toEqual([0x00, 0x72, 0xb2]); // inside the rect
    expect(px(60, 10)).toEqual([0xff, 0xff, 0xff]); // background
  });

  it("is deterministic", () => {
    expect(sceneToPng(SCENE).equals(sceneToPng(SCENE))).toBe(true);
  });
});
