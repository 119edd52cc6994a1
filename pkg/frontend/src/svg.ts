/** Scene -> SVG text. Coordinates are emitted with fixed precision so the
 * output is byte-stable across runs. */

import { Scene, SceneItem } from "./scene.js";

function fmt(v: number): string {
  return Number(v.toFixed(2)).toString();
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function renderItem(item: SceneItem): string {
  switch (item.kind) {
    case "rect":
      return `<rect x="${fmt(item.x)}" y="${fmt(item.y)}" width="${fmt(item.width)}" height="${fmt(item.height)}" fill="${item.fill}"/>`;
    case "polyline": {
      const points = item.points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
      return `<polyline points="${points}" fill="none" stroke="${item.stroke}" stroke-width="${fmt(item.strokeWidth)}"/>`;
    }
    case "text": {
      const anchor = item.anchor === "start" ? "" : ` text-anchor="${item.anchor}"`;
      return `<text x="${fmt(item.x)}" y="${fmt(item.y)}" font-size="${item.size}" font-family="sans-serif" fill="${item.fill}"${anchor}>${esc(item.text)}</text>`;
    }
  }
}

export function sceneToSvg(scene: Scene): string {
  const lines = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" height="${scene.height}" viewBox="0 0 ${scene.width} ${scene.height}">`,
    `<rect width="${scene.width}" height="${scene.height}" fill="${scene.background}"/>`,
    ...scene.items.map(renderItem),
    "</svg>",
  ];
  return lines.join("\n") + "\n";
}
