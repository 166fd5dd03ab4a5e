export { parseCsv, SchemaError, SCHEMES } from "./schema.js";
export type { Row, Scheme } from "./schema.js";
export { buildFigure, FIGURE_IDS } from "./figures.js";
export type { Curve, FigureData, FigureId, Point } from "./figures.js";
export { renderSvg } from "./svg.js";
export { figureFromCsv, renderFigure } from "./render.js";
