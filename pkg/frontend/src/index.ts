export { parseCsv, readTable, requireColumns, Table } from "./csv";
export {
  buildConvergence,
  buildFigure,
  buildFrame,
  buildHeatmap,
  buildRank,
  buildSlice,
  buildVariance,
  BuildResult,
  LOG_FLOOR,
  PlotKind,
  PlotOptions,
} from "./plots";
export { sceneToPng } from "./raster";
export { sceneToSvg } from "./svg";
export { Scene, SceneItem, linearScale, log10Scale } from "./scene";
export { encodePng } from "./png";
export { viridis } from "./colormap";
