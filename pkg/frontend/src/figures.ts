/**
 * Figure definitions: which columns feed the axes, how rows group into
 * curves, and the line style each scheme gets.  All numbers come from the
 * CSV — nothing is recomputed here.
 */

import { Row, Scheme, SchemaError } from "./schema.js";

export const FIGURE_IDS = ["fig4a", "fig4b", "fig5", "fig6"] as const;
export type FigureId = (typeof FIGURE_IDS)[number];

export interface Point {
  x: number;
  y: number;
}

export interface Curve {
  label: string;
  color: string;
  /** stroke-dasharray, or null for a solid line */
  dash: string | null;
  width: number;
  points: Point[];
}

export interface FigureData {
  id: FigureId;
  xLabel: string;
  yLabel: string;
  logY: boolean;
  /** the log axis never auto-fits below this; deeper points clip out of view */
  yFloor: number;
  curves: Curve[];
}

const SCHEME_DASH: Record<Scheme, string | null> = {
  "seg-ed": null,
  "seg-noed": "8 4",
  "seg-prob": "8 3 2 3",
  "peg-ed": "2 3",
};

const SCHEME_ORDER: Record<Scheme, number> = {
  "seg-ed": 0,
  "seg-noed": 1,
  "seg-prob": 2,
  "peg-ed": 3,
};

const STAGE_COLOR: Record<string, string> = {
  "1": "#7570b3",
  "2": "#1b9e77",
  "3": "#d95f02",
};
const FALLBACK_COLOR = "#666666";

const PLOB = { color: "#000000", dash: "10 5", width: 2.5 };

const RATE_FLOOR = 1e-6;

function stageColor(stage: string): string {
  return STAGE_COLOR[stage] ?? FALLBACK_COLOR;
}

interface GroupSpec {
  key: string;
  order: [number, number, number];
  label: string;
  scheme: Scheme;
  stage: string;
}

function buildCurves(
  rows: Row[],
  pick: (row: Row) => { x: number; y: number } | null,
  group: (row: Row) => GroupSpec,
): Curve[] {
  const buckets = new Map<string, { spec: GroupSpec; points: Point[] }>();
  for (const row of rows) {
    const spec = group(row);
    let bucket = buckets.get(spec.key);
    if (bucket === undefined) {
      bucket = { spec, points: [] };
      buckets.set(spec.key, bucket);
    }
    const point = pick(row);
    if (point !== null) bucket.points.push(point);
  }
  const ordered = [...buckets.values()].sort((a, b) => {
    for (let i = 0; i < 3; i++) {
      const d = a.spec.order[i]! - b.spec.order[i]!;
      if (d !== 0) return d;
    }
    return 0;
  });
  return ordered
    .filter((b) => b.points.length > 0)
    .map((b) => ({
      label: b.spec.label,
      color: stageColor(b.spec.stage),
      dash: SCHEME_DASH[b.spec.scheme],
      width: 1.5,
      points: b.points.sort((p, q) => p.x - q.x),
    }));
}

/** One reference line from a column shared by many rows: dedupe on x. */
function referenceCurve(
  rows: Row[],
  label: string,
  pick: (row: Row) => { x: number; y: number } | null,
): Curve | null {
  const seen = new Map<number, number>();
  for (const row of rows) {
    const point = pick(row);
    if (point !== null && !seen.has(point.x)) seen.set(point.x, point.y);
  }
  if (seen.size === 0) return null;
  const points = [...seen.entries()]
    .map(([x, y]) => ({ x, y }))
    .sort((p, q) => p.x - q.x);
  return { label, color: PLOB.color, dash: PLOB.dash, width: PLOB.width, points };
}

/** Zero and infinity cannot sit on a log axis; everything else stays. */
function positiveOrNull(x: number, y: number): Point | null {
  return Number.isFinite(y) && y > 0 ? { x, y } : null;
}

function fig4a(rows: Row[]): FigureData {
  const curves = buildCurves(
    rows,
    (r) => (r.Nr > 0 ? { x: r.L0_km, y: r.L_km } : null),
    (r) => ({
      key: `${r.stage}/${r.scheme}`,
      order: [Number(r.stage), SCHEME_ORDER[r.scheme], 0],
      label: `${r.scheme} stage ${r.stage}`,
      scheme: r.scheme,
      stage: r.stage,
    }),
  );
  return {
    id: "fig4a",
    xLabel: "L0 (km)",
    yLabel: "max range (km)",
    logY: false,
    yFloor: 0,
    curves,
  };
}

/** fig4b rows mix two target distances; tag each by the nearer one. */
function nearestTarget(l_km: number): number {
  return Math.abs(l_km - 1000) <= Math.abs(l_km - 1500) ? 1000 : 1500;
}

function fig4b(rows: Row[]): FigureData {
  const curves = buildCurves(
    rows,
    (r) => positiveOrNull(r.L0_km, r.K_hz),
    (r) => {
      const target = nearestTarget(r.L_km);
      return {
        key: `${r.stage}/${r.scheme}/${target}`,
        order: [Number(r.stage), SCHEME_ORDER[r.scheme], target],
        label: `${r.scheme} stage ${r.stage} @ ${target} km`,
        scheme: r.scheme,
        stage: r.stage,
      };
    },
  );
  for (const target of [1000, 1500]) {
    const plob = referenceCurve(rows, `PLOB @ ${target} km`, (r) =>
      r.plob_hz !== undefined && nearestTarget(r.L_km) === target
        ? positiveOrNull(r.L0_km, r.plob_hz)
        : null,
    );
    if (plob !== null) curves.push(plob);
  }
  return {
    id: "fig4b",
    xLabel: "L0 (km)",
    yLabel: "K (bit/s)",
    logY: true,
    yFloor: RATE_FLOOR,
    curves,
  };
}

function fig5(rows: Row[]): FigureData {
  const curves = buildCurves(
    rows,
    (r) => positiveOrNull(r.L_km, r.K_hz),
    (r) => ({
      key: `${r.stage}/${r.scheme}`,
      order: [Number(r.stage), SCHEME_ORDER[r.scheme], 0],
      label: `${r.scheme} stage ${r.stage}`,
      scheme: r.scheme,
      stage: r.stage,
    }),
  );
  const plob = referenceCurve(rows, "PLOB", (r) =>
    r.plob_hz !== undefined ? positiveOrNull(r.L_km, r.plob_hz) : null,
  );
  if (plob !== null) curves.push(plob);
  return {
    id: "fig5",
    xLabel: "L (km)",
    yLabel: "K (bit/s)",
    logY: true,
    yFloor: RATE_FLOOR,
    curves,
  };
}

function fig6(rows: Row[]): FigureData {
  const curves = buildCurves(
    rows,
    (r) => (Number.isFinite(r.C_K) && r.C_K > 0 ? { x: r.L_km, y: r.C_K } : null),
    (r) => ({
      key: `${r.stage}/${r.scheme}`,
      order: [Number(r.stage), SCHEME_ORDER[r.scheme], 0],
      label: `${r.scheme} stage ${r.stage}`,
      scheme: r.scheme,
      stage: r.stage,
    }),
  );
  return {
    id: "fig6",
    xLabel: "L (km)",
    yLabel: "normalized cost C/K",
    logY: true,
    yFloor: Number.MIN_VALUE,
    curves,
  };
}

const BUILDERS: Record<FigureId, (rows: Row[]) => FigureData> = {
  fig4a, fig4b, fig5, fig6,
};

export function buildFigure(id: FigureId, rows: Row[]): FigureData {
  const data = BUILDERS[id](rows);
  if (data.curves.length === 0) {
    throw new SchemaError(`${id}: no drawable points in the CSV`);
  }
  return data;
}
