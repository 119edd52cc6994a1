/**
 * Scene -> PNG bytes. A deliberately small software rasterizer (solid
 * rectangles, Bresenham polylines, bitmap text) feeding a minimal PNG
 * encoder (8-bit RGBA, filter 0, one zlib-compressed IDAT).
 */

import { deflateSync } from "node:zlib";
import { GLYPH_ADVANCE, GLYPH_HEIGHT, GLYPH_WIDTH, glyphFor, textWidth } from "./font.js";
import { Scene, SceneItem } from "./scene.js";

function parseColor(color: string): [number, number, number] {
  const hex = color.startsWith("#") ? color.slice(1) : color;
  return [
    parseInt(hex.slice(0, 2), 16),
    parseInt(hex.slice(2, 4), 16),
    parseInt(hex.slice(4, 6), 16),
  ];
}

class Raster {
  data: Uint8Array;

  constructor(readonly width: number, readonly height: number, background: string) {
    this.data = new Uint8Array(width * height * 4);
    const [r, g, b] = parseColor(background);
    for (let i = 0; i < width * height; i++) {
      this.data[i * 4] = r;
      this.data[i * 4 + 1] = g;
      this.data[i * 4 + 2] = b;
      this.data[i * 4 + 3] = 255;
    }
  }

  set(x: number, y: number, rgb: [number, number, number]): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 4;
    this.data[i] = rgb[0];
    this.data[i + 1] = rgb[1];
    this.data[i + 2] = rgb[2];
    this.data[i + 3] = 255;
  }

  fillRect(x: number, y: number, w: number, h: number, color: string): void {
    const rgb = parseColor(color);
    const x0 = Math.round(x);
    const y0 = Math.round(y);
    const x1 = Math.round(x + w);
    const y1 = Math.round(y + Math.max(h, 1));
    for (let yy = y0; yy < Math.max(y1, y0 + 1); yy++) {
      for (let xx = x0; xx < Math.max(x1, x0 + 1); xx++) {
        this.set(xx, yy, rgb);
      }
    }
  }

  stamp(x: number, y: number, radius: number, rgb: [number, number, number]): void {
    for (let dy = -radius; dy <= radius; dy++) {
      for (let dx = -radius; dx <= radius; dx++) {
        this.set(x + dx, y + dy, rgb);
      }
    }
  }

  line(x0f: number, y0f: number, x1f: number, y1f: number, color: string, strokeWidth: number): void {
    const rgb = parseColor(color);
    const radius = strokeWidth > 2 ? 1 : 0;
    let x0 = Math.round(x0f);
    let y0 = Math.round(y0f);
    const x1 = Math.round(x1f);
    const y1 = Math.round(y1f);
    const dx = Math.abs(x1 - x0);
    const dy = -Math.abs(y1 - y0);
    const sx = x0 < x1 ? 1 : -1;
    const sy = y0 < y1 ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.stamp(x0, y0, radius, rgb);
      if (x0 === x1 && y0 === y1) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }

  text(xf: number, baseline: number, s: string, size: number, color: string, anchor: "start" | "middle" | "end"): void {
    const rgb = parseColor(color);
    const scale = size >= 14 ? 2 : 1;
    const width = textWidth(s, scale);
    let x = Math.round(xf);
    if (anchor === "middle") x -= Math.round(width / 2);
    if (anchor === "end") x -= width;
    const top = Math.round(baseline) - GLYPH_HEIGHT * scale;
    for (const ch of s) {
      const glyph = glyphFor(ch);
      for (let gy = 0; gy < GLYPH_HEIGHT; gy++) {
        for (let gx = 0; gx < GLYPH_WIDTH; gx++) {
          if (!glyph[gy][gx]) continue;
          for (let py = 0; py < scale; py++) {
            for (let px = 0; px < scale; px++) {
              this.set(x + gx * scale + px, top + gy * scale + py, rgb);
            }
          }
        }
      }
      x += GLYPH_ADVANCE * scale;
    }
  }
}

function drawItem(raster: Raster, item: SceneItem): void {
  switch (item.kind) {
    case "rect":
      raster.fillRect(item.x, item.y, item.width, item.height, item.fill);
      break;
    case "polyline":
      for (let i = 1; i < item.points.length; i++) {
        const [x0, y0] = item.points[i - 1];
        const [x1, y1] = item.points[i];
        raster.line(x0, y0, x1, y1, item.stroke, item.strokeWidth);
      }
      break;
    case "text":
      raster.text(item.x, item.y, item.text, item.size, item.fill, item.anchor);
      break;
  }
}

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(buf: Uint8Array): number {
  let c = 0xffffffff;
  for (const byte of buf) {
    c = CRC_TABLE[(c ^ byte) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, payload: Uint8Array): Buffer {
  const head = Buffer.alloc(8);
  head.writeUInt32BE(payload.length, 0);
  head.write(type, 4, "ascii");
  const body = Buffer.concat([head.subarray(4), payload]);
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(crc32(body), 0);
  return Buffer.concat([head, payload, crc]);
}

export function sceneToPng(scene: Scene): Buffer {
  const raster = new Raster(scene.width, scene.height, scene.background);
  for (const item of scene.items) {
    drawItem(raster, item);
  }
  const stride = scene.width * 4;
  const raw = Buffer.alloc((stride + 1) * scene.height);
  for (let y = 0; y < scene.height; y++) {
    raw[y * (stride + 1)] = 0; // filter: none
    raw.set(raster.data.subarray(y * stride, (y + 1) * stride), y * (stride + 1) + 1);
  }
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(scene.width, 0);
  ihdr.writeUInt32BE(scene.height, 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 6; // RGBA
  const signature = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
  return Buffer.concat([
    signature,
    chunk("IHDR", ihdr),
    chunk("IDAT", deflateSync(raw)),
    chunk("IEND", new Uint8Array(0)),
  ]);
}
