export { FAMILIES, renderFamily } from "./families.js";
export type { Family } from "./families.js";
export { sceneToSvg } from "./svg.js";
export { sceneToPng } from "./png.js";
export { parseCsvText, readTables, applyFilter, parseFilterArgs, CsvFormatError } from "./csv.js";
export { parseArgs, run } from "./cli.js";
export type { Scene, SceneItem } from "./scene.js";
