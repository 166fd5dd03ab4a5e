/**
 * CSV text in, SVG text out.  Parsing, grouping, and drawing each live in
 * their own module; this is the seam the CLI and the tests share.
 */

import { buildFigure, FigureData, FigureId } from "./figures.js";
import { parseCsv } from "./schema.js";
import { renderSvg } from "./svg.js";

export function figureFromCsv(id: FigureId, csvText: string): FigureData {
  return buildFigure(id, parseCsv(csvText));
}

export function renderFigure(id: FigureId, csvText: string): string {
  return renderSvg(figureFromCsv(id, csvText));
}
