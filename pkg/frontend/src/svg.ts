/**
 * Deterministic SVG rendering: same FigureData in, same bytes out.
 * Coordinates are fixed to two decimals so no floating-point noise can
 * leak into the output.
 */

import { Curve, FigureData } from "./figures.js";

const WIDTH = 860;
const HEIGHT = 560;
const MARGIN = { left: 78, right: 250, top: 42, bottom: 58 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

function fmt(v: number): string {
  return v.toFixed(2);
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

/** Trim float noise from tick labels: 123.450000001 -> "123.45". */
function tickLabel(v: number): string {
  return Number(v.toPrecision(10)).toString();
}

interface Extent {
  min: number;
  max: number;
}

function dataExtent(curves: Curve[], axis: "x" | "y"): Extent {
  let min = Infinity;
  let max = -Infinity;
  for (const curve of curves) {
    for (const p of curve.points) {
      const v = p[axis];
      if (v < min) min = v;
      if (v > max) max = v;
    }
  }
  if (min === max) {
    min -= 1;
    max += 1;
  }
  return { min, max };
}

/** Round a linear range outward to a 1/2/5 grid and list its ticks. */
function linearTicks(extent: Extent): { domain: Extent; ticks: number[] } {
  const span = extent.max - extent.min;
  const rawStep = span / 6;
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const residual = rawStep / power;
  const step = (residual > 5 ? 10 : residual > 2 ? 5 : residual > 1 ? 2 : 1) * power;
  const lo = Math.floor(extent.min / step) * step;
  const hi = Math.ceil(extent.max / step) * step;
  const ticks: number[] = [];
  for (let v = lo; v <= hi + step / 2; v += step) ticks.push(v);
  return { domain: { min: lo, max: hi }, ticks };
}

/** Expand a log range to whole decades; ticks at every decade. */
function logTicks(extent: Extent): { domain: Extent; ticks: number[] } {
  const lo = Math.floor(Math.log10(extent.min));
  const top = Math.max(Math.ceil(Math.log10(extent.max)), lo + 1);
  const ticks: number[] = [];
  const stride = top - lo > 12 ? 2 : 1;
  for (let k = lo; k <= top; k += stride) ticks.push(Math.pow(10, k));
  return { domain: { min: Math.pow(10, lo), max: Math.pow(10, top) }, ticks };
}

function logLabel(v: number): string {
  const k = Math.round(Math.log10(v));
  return k >= -3 && k <= 3 ? tickLabel(Math.pow(10, k)) : `1e${k}`;
}

export function renderSvg(data: FigureData): string {
  const xInfo = linearTicks(dataExtent(data.curves, "x"));
  const yExtent = dataExtent(data.curves, "y");
  // The axis floor caps how far down the range auto-fits; points that dive
  // deeper stay in their curves and exit through the clip rectangle below.
  const yInfo = data.logY
    ? logTicks({
        min: Math.max(yExtent.min, data.yFloor),
        max: Math.max(yExtent.max, data.yFloor),
      })
    : linearTicks({ min: Math.min(0, yExtent.min), max: yExtent.max });

  const sx = (v: number): number =>
    MARGIN.left + ((v - xInfo.domain.min) / (xInfo.domain.max - xInfo.domain.min)) * PLOT_W;
  const yPos = (v: number): number => (data.logY ? Math.log10(v) : v);
  const yLo = yPos(yInfo.domain.min);
  const yHi = yPos(yInfo.domain.max);
  const sy = (v: number): number =>
    MARGIN.top + PLOT_H - ((yPos(v) - yLo) / (yHi - yLo)) * PLOT_H;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);
  parts.push(
    `<defs><clipPath id="plot"><rect x="${fmt(MARGIN.left)}" y="${fmt(MARGIN.top)}" ` +
      `width="${fmt(PLOT_W)}" height="${fmt(PLOT_H)}"/></clipPath></defs>`,
  );
  parts.push(
    `<text x="${fmt(MARGIN.left + PLOT_W / 2)}" y="24" text-anchor="middle" ` +
      `font-size="16">${escapeXml(data.id)}</text>`,
  );

  for (const t of xInfo.ticks) {
    const x = fmt(sx(t));
    parts.push(
      `<line x1="${x}" y1="${fmt(MARGIN.top)}" x2="${x}" ` +
        `y2="${fmt(MARGIN.top + PLOT_H)}" stroke="#dddddd"/>`,
    );
    parts.push(
      `<text x="${x}" y="${fmt(MARGIN.top + PLOT_H + 18)}" text-anchor="middle" ` +
        `font-size="12">${tickLabel(t)}</text>`,
    );
  }
  for (const t of yInfo.ticks) {
    const y = fmt(sy(t));
    parts.push(
      `<line x1="${fmt(MARGIN.left)}" y1="${y}" x2="${fmt(MARGIN.left + PLOT_W)}" ` +
        `y2="${y}" stroke="#dddddd"/>`,
    );
    parts.push(
      `<text x="${fmt(MARGIN.left - 8)}" y="${fmt(sy(t) + 4)}" text-anchor="end" ` +
        `font-size="12">${data.logY ? logLabel(t) : tickLabel(t)}</text>`,
    );
  }

  parts.push(
    `<rect x="${fmt(MARGIN.left)}" y="${fmt(MARGIN.top)}" width="${fmt(PLOT_W)}" ` +
      `height="${fmt(PLOT_H)}" fill="none" stroke="#333333"/>`,
  );
  parts.push(
    `<text x="${fmt(MARGIN.left + PLOT_W / 2)}" y="${HEIGHT - 14}" ` +
      `text-anchor="middle" font-size="13">${escapeXml(data.xLabel)}</text>`,
  );
  parts.push(
    `<text x="20" y="${fmt(MARGIN.top + PLOT_H / 2)}" text-anchor="middle" ` +
      `font-size="13" transform="rotate(-90 20 ${fmt(MARGIN.top + PLOT_H / 2)})">` +
      `${escapeXml(data.yLabel)}</text>`,
  );

  parts.push(`<g clip-path="url(#plot)">`);
  for (const curve of data.curves) {
    const style =
      `stroke="${curve.color}" stroke-width="${curve.width}"` +
      (curve.dash !== null ? ` stroke-dasharray="${curve.dash}"` : "");
    if (curve.points.length === 1) {
      const p = curve.points[0]!;
      parts.push(
        `<circle cx="${fmt(sx(p.x))}" cy="${fmt(sy(p.y))}" r="3" fill="${curve.color}"/>`,
      );
      continue;
    }
    const coords = curve.points.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y))}`).join(" ");
    parts.push(`<polyline fill="none" ${style} points="${coords}"/>`);
  }
  parts.push(`</g>`);

  const legendX = MARGIN.left + PLOT_W + 16;
  let legendY = MARGIN.top + 6;
  for (const curve of data.curves) {
    const style =
      `stroke="${curve.color}" stroke-width="${curve.width}"` +
      (curve.dash !== null ? ` stroke-dasharray="${curve.dash}"` : "");
    parts.push(
      `<line x1="${legendX}" y1="${legendY}" x2="${legendX + 34}" y2="${legendY}" ${style}/>`,
    );
    parts.push(
      `<text x="${legendX + 40}" y="${legendY + 4}" font-size="11">` +
        `${escapeXml(curve.label)}</text>`,
    );
    legendY += 16;
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
