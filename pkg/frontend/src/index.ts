export { readTable, requireColumns, num, SchemaError } from "./csv";
export type { Table, Cell } from "./csv";
export { linearScale, logScale, loglogSlope, tickLabel } from "./scale";
export type { Scale } from "./scale";
export { Svg } from "./svg";
export {
  convergenceSeries,
  conditionSeries,
  plotConvergence,
  plotCondition,
  renderChart,
  renderFigure,
} from "./plots";
export type { FigureKind, FigureSpec, Series, ChartOptions } from "./plots";
export { runCli } from "./cli";
