import { createHash } from "crypto";
import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { beforeAll, describe, expect, it } from "vitest";
import { readTable, SchemaError } from "../src/csv";
import { loglogSlope } from "../src/scale";
import {
  conditionSeries,
  convergenceSeries,
  plotConvergence,
  renderFigure,
} from "../src/plots";
import { runCli } from "../src/cli";

let dir: string;
beforeAll(() => {
  dir = mkdtempSync(join(tmpdir(), "fcm-figs-plots-"));
});

function write(name: string, text: string): string {
  const path = join(dir, name);
  writeFileSync(path, text);
  return path;
}

/** Exact third-order error data over two boundary shifts per h. */
function cubicConvergenceCsv(hs = [0.2, 0.1, 0.05, 0.025]): string {
  const lines = ["experiment,h,shift,tau,l2,h1_semi,energy"];
  for (const h of hs) {
    for (const [s, c] of [
      [0, 0.5],
      [1, 0.6],
    ]) {
      lines.push(
        `convergence,${h},${s},0.1,${c * h ** 3},${c * h ** 2},${2 * c * h ** 2}`,
      );
    }
  }
  return lines.join("\n") + "\n";
}

describe("convergence figures", () => {
  it("plots series whose fitted slope matches the slope-3 reference", () => {
    const path = write("cubic.csv", cubicConvergenceCsv());
    const table = readTable(path);
    const series = convergenceSeries([table]);
    expect(series.map((s) => s.label)).toEqual(["l2", "h1_semi", "energy"]);
    // worst-over-shifts envelope: the 0.6 coefficient wins at every h
    const l2 = series[0];
    expect(l2.points.map((p) => p.y)).toContain(0.6 * 0.1 ** 3);
    const fitted = loglogSlope(l2.points);
    expect(fitted).toBeCloseTo(3, 9);
    // the default reference triangles are slopes [2, 3]; the data series is
    // parallel to the second one
    const refSlopes = [2, 3];
    expect(Math.abs(fitted - refSlopes[1])).toBeLessThan(1e-9);
    expect(loglogSlope(series[1].points)).toBeCloseTo(2, 9);

    const svg = plotConvergence([table], { kind: "convergence", inputs: [path] });
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.length).toBeGreaterThan(1000);
    expect((svg.match(/<polyline/g) ?? []).length).toBe(3);
    expect((svg.match(/<polygon/g) ?? []).length).toBe(2); // two slope triangles
  });

  it("splits series by tau when several are present", () => {
    const lines = ["h,tau,l2,h1_semi,energy"];
    for (const tau of [0.1, 1]) {
      for (const h of [0.2, 0.1]) {
        lines.push(`${h},${tau},${tau * h ** 3},${tau * h ** 2},${tau * h ** 2}`);
      }
    }
    const table = readTable(write("taus.csv", lines.join("\n") + "\n"));
    const series = convergenceSeries([table], ["l2"]);
    expect(series.map((s) => s.label)).toEqual(["l2, tau=0.1", "l2, tau=1"]);
  });

  it("rejects a CSV without the error columns", () => {
    const table = readTable(write("bare.csv", "h,tau,kappa\n0.1,0.1,5\n0.2,0.1,9\n"));
    expect(() => convergenceSeries([table])).toThrow(SchemaError);
    expect(() => convergenceSeries([table])).toThrow(/missing column/);
  });

  it("rejects a single h value", () => {
    const table = readTable(
      write("single.csv", "h,tau,l2,h1_semi,energy\n0.1,0.1,1e-4,1e-3,2e-3\n"),
    );
    expect(() => convergenceSeries([table])).toThrow(/need at least 2/);
  });
});

describe("condition figures", () => {
  it("draws kappa solid, jacobi dashed, and pins inf to the top", () => {
    const lines = ["experiment,h,shift,delta,tau,c_alpha,kappa,kappa_jacobi"];
    for (const [delta, kap, kapJ] of [
      [1e-2, 1e6, 1e3],
      [1e-4, Infinity, 1e6],
      [1e-6, Infinity, 1e9],
    ] as [number, number, number][]) {
      lines.push(`special-rotated45,0.0884,nan,${delta},0.1,0,${kap},${kapJ}`);
    }
    const path = write("rot.csv", lines.join("\n").replace(/Infinity/g, "inf") + "\n");
    const table = readTable(path);
    const series = conditionSeries([table], "special-case");
    expect(series).toHaveLength(2);
    expect(series[0].dashed).toBe(false);
    expect(series[1].dashed).toBe(true);
    expect(series[0].clipped).toEqual([1e-6, 1e-4]);
    expect(series[1].points).toHaveLength(3);

    const svg = renderFigure({ kind: "special-case", inputs: [path] });
    // two clipped data markers plus the legend glyph
    expect((svg.match(/class="clipped"/g) ?? []).length).toBe(3);
    expect(svg).toContain('stroke-dasharray="6 4"');
  });

  it("adds the slope reference for the scaling kind", () => {
    const lines = ["h,shift,tau,c_alpha,kappa,kappa_jacobi"];
    for (const h of [0.2, 0.1, 0.05]) {
      lines.push(`${h},0,0.1,0.001,${1e5 * h ** -3},${50 / h}`);
    }
    const path = write("scaling.csv", lines.join("\n") + "\n");
    const svg = renderFigure({ kind: "condition-scaling", inputs: [path] });
    expect(svg).toContain("slope -3");
    const series = conditionSeries([readTable(path)], "condition-scaling");
    expect(loglogSlope(series[0].points)).toBeCloseTo(-3, 9);
  });

  it("splits one curve per c_alpha and keeps shift linear for variation", () => {
    const lines = ["h,shift,tau,c_alpha,kappa,kappa_jacobi"];
    for (const ca of [0, 0.001]) {
      for (const s of [0, 0.5, 1]) {
        lines.push(`0.1,${s},0.1,${ca},${1e4 + s * 1e3 + ca * 1e9},${40 + s}`);
      }
    }
    const path = write("var.csv", lines.join("\n") + "\n");
    const series = conditionSeries([readTable(path)], "condition-variation");
    expect(series.map((s) => s.label)).toEqual([
      "c_alpha=0",
      "c_alpha=0 (jacobi)",
      "c_alpha=0.001",
      "c_alpha=0.001 (jacobi)",
    ]);
    const svg = renderFigure({ kind: "condition-variation", inputs: [path] });
    expect(svg).toContain("shift s");
  });
});

describe("invariants", () => {
  it("plotting leaves the input CSV byte-identical", () => {
    const path = write("untouched.csv", cubicConvergenceCsv());
    const before = createHash("sha256").update(readFileSync(path)).digest("hex");
    renderFigure({ kind: "convergence", inputs: [path] });
    const after = createHash("sha256").update(readFileSync(path)).digest("hex");
    expect(after).toBe(before);
  });

  it("refuses non-SVG outputs", () => {
    const path = write("png-in.csv", cubicConvergenceCsv());
    const code = runCli(["convergence", "--in", path, "--out", join(dir, "fig.png")]);
    expect(code).toBe(1);
  });

  it("fails cleanly on a missing input file", () => {
    const code = runCli([
      "convergence",
      "--in",
      join(dir, "no-such.csv"),
      "--out",
      join(dir, "fig.svg"),
    ]);
    expect(code).toBe(1);
  });
});
