import fs from "node:fs";
import { describe, expect, it } from "vitest";

import { buildFigure, FigureId } from "../src/figures.js";
import { parseCsv } from "../src/schema.js";

function rows(name: FigureId) {
  return parseCsv(
    fs.readFileSync(new URL(`./fixtures/${name}.csv`, import.meta.url), "utf8"),
  );
}

describe("fig5 grouping", () => {
  const data = buildFigure("fig5", rows("fig5"));

  it("builds one curve per (scheme, stage) pair plus the PLOB reference", () => {
    expect(data.curves.map((c) => c.label)).toEqual([
      "seg-ed stage 2", "seg-noed stage 2", "seg-prob stage 2", "peg-ed stage 2",
      "seg-ed stage 3", "seg-noed stage 3", "seg-prob stage 3", "peg-ed stage 3",
      "PLOB",
    ]);
  });

  it("applies the scheme line styles", () => {
    const dash = new Map(data.curves.map((c) => [c.label, c.dash]));
    expect(dash.get("seg-ed stage 2")).toBeNull();
    expect(dash.get("seg-noed stage 2")).toBe("8 4");
    expect(dash.get("seg-prob stage 2")).toBe("8 3 2 3");
    expect(dash.get("peg-ed stage 2")).toBe("2 3");
  });

  it("draws PLOB as the thick dashed black reference", () => {
    const plob = data.curves.at(-1)!;
    expect(plob.label).toBe("PLOB");
    expect(plob.color).toBe("#000000");
    expect(plob.dash).toBe("10 5");
    expect(plob.width).toBeGreaterThan(2);
  });

  it("colors curves by stage", () => {
    for (const curve of data.curves.slice(0, 8)) {
      expect(curve.color).toBe(curve.label.endsWith("2") ? "#1b9e77" : "#d95f02");
    }
  });

  it("keeps only positive rates, so short-range schemes end early", () => {
    const noed2 = data.curves.find((c) => c.label === "seg-noed stage 2")!;
    expect(noed2.points).toHaveLength(6);
    expect(Math.max(...noed2.points.map((p) => p.x))).toBe(600);
    for (const curve of data.curves) {
      for (const p of curve.points) expect(p.y).toBeGreaterThan(0);
    }
  });

  it("dedupes the PLOB column across schemes and stages", () => {
    const plob = data.curves.at(-1)!;
    const distinctL = new Set(rows("fig5").map((r) => r.L_km));
    expect(plob.points).toHaveLength(distinctL.size);
    expect(plob.points.find((p) => p.x === 1000)?.y).toBeCloseTo(0.144269504096, 12);
  });

  it("sorts every curve by x", () => {
    for (const curve of data.curves) {
      const xs = curve.points.map((p) => p.x);
      expect(xs).toEqual([...xs].sort((a, b) => a - b));
    }
  });
});

describe("fig4a grouping", () => {
  it("keeps all twelve (scheme, stage) pairs and drops dead rows", () => {
    const data = buildFigure("fig4a", rows("fig4a"));
    expect(data.curves).toHaveLength(12);
    expect(data.logY).toBe(false);
    for (const curve of data.curves) {
      for (const p of curve.points) expect(p.y).toBeGreaterThan(0);
    }
    const pegStage1 = data.curves.find((c) => c.label === "peg-ed stage 1")!;
    const liveRows = rows("fig4a").filter(
      (r) => r.scheme === "peg-ed" && r.stage === "1" && r.Nr > 0,
    );
    expect(pegStage1.points).toHaveLength(liveRows.length);
  });
});

describe("fig4b grouping", () => {
  const data = buildFigure("fig4b", rows("fig4b"));

  it("splits rows by nearest target distance", () => {
    const labels = data.curves.map((c) => c.label);
    expect(labels).toContain("seg-ed stage 2 @ 1000 km");
    expect(labels).toContain("seg-ed stage 3 @ 1500 km");
    expect(labels).toContain("PLOB @ 1000 km");
    expect(labels).toContain("PLOB @ 1500 km");
  });

  it("has no stage-1 curves: the targets sit beyond stage-1 range", () => {
    expect(data.curves.some((c) => c.label.includes("stage 1"))).toBe(false);
  });
});

describe("fig6 grouping", () => {
  it("plots finite costs only and carries no PLOB", () => {
    const data = buildFigure("fig6", rows("fig6"));
    expect(data.curves).toHaveLength(8);
    expect(data.curves.some((c) => c.label.includes("PLOB"))).toBe(false);
    for (const curve of data.curves) {
      for (const p of curve.points) {
        expect(Number.isFinite(p.y)).toBe(true);
        expect(p.y).toBeGreaterThan(0);
      }
    }
  });
});

describe("degenerate input", () => {
  it("refuses a CSV whose every row is dead", () => {
    const header = "scheme,stage,L0_km,Nr,L_km,e_Z,e_X,r_inf,R_bit_hz,K_hz,C_K,p_end";
    const dead = "peg-ed,1,80,0,0,0,0,0,0,0,inf,0";
    expect(() => buildFigure("fig4a", parseCsv(`${header}\n${dead}\n`))).toThrow(
      /no drawable points/,
    );
  });
});
