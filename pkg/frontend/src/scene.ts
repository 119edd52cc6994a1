/**
 * A figure is compiled to a tiny scene graph that both backends understand:
 * filled rectangles, polylines, and text anchored at a point. Coordinates
 * are pixels with the origin at the top left.
 */

export interface RectItem {
  kind: "rect";
  x: number;
  y: number;
  width: number;
  height: number;
  fill: string;
}

export interface PolylineItem {
  kind: "polyline";
  points: [number, number][];
  stroke: string;
  strokeWidth: number;
}

export interface TextItem {
  kind: "text";
  x: number;
  y: number; // baseline
  text: string;
  size: number;
  fill: string;
  anchor: "start" | "middle" | "end";
}

export type SceneItem = RectItem | PolylineItem | TextItem;

export interface Scene {
  width: number;
  height: number;
  background: string;
  items: SceneItem[];
}

/** Okabe-Ito palette: distinguishable under common color-vision deficiencies. */
export const PALETTE = [
  "#0072b2", // blue
  "#d55e00", // vermillion
  "#009e73", // bluish green
  "#e69f00", // orange
  "#cc79a7", // reddish purple
  "#56b4e9", // sky blue
  "#f0e442", // yellow
  "#000000", // black
];

export function seriesColor(index: number): string {
  return PALETTE[index % PALETTE.length];
}
