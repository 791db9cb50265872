export { column, DataError, parseTable, readTable, requireColumns } from "./csv.js";
export type { Table } from "./csv.js";
export {
  extent,
  formatTick,
  linearScale,
  linearTicks,
  logScale,
  logTicks,
  padded,
} from "./scale.js";
export type { Scale } from "./scale.js";
export { convergeSvg, fig2Svg, fig3Svg, figureSvg, KINDS, REQUIRED } from "./figures.js";
export type { FigureKind, FigureOptions } from "./figures.js";
export { render } from "./render.js";
export type { FigureSpec } from "./render.js";
