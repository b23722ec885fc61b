import { describe, expect, it } from "vitest";
import { linearScale, loglogSlope, logScale, tickLabel } from "../src/scale";

describe("linearScale", () => {
  it("maps the domain endpoints to the range endpoints", () => {
    const s = linearScale([0, 1], [100, 500]);
    expect(s.map(0)).toBe(100);
    expect(s.map(1)).toBe(500);
    expect(s.map(0.5)).toBe(300);
  });

  it("produces round ticks inside the domain", () => {
    const ticks = linearScale([0, 1], [0, 1]).ticks();
    expect(ticks[0]).toBe(0);
    expect(ticks).toContain(0.2);
    expect(Math.max(...ticks)).toBeLessThanOrEqual(1);
  });
});

describe("logScale", () => {
  it("maps decades linearly", () => {
    const s = logScale([1e-3, 1e1], [0, 400]);
    expect(s.map(1e-3)).toBe(0);
    expect(s.map(1e1)).toBe(400);
    expect(s.map(1e-1)).toBeCloseTo(200, 10);
  });

  it("uses decade ticks over wide ranges", () => {
    const ticks = logScale([1e-4, 1e0], [0, 1]).ticks();
    expect(ticks).toEqual([1e-4, 1e-3, 1e-2, 1e-1, 1e0]);
  });

  it("falls back to 1-2-5 ticks inside a single decade", () => {
    const ticks = logScale([0.15, 0.8], [0, 1]).ticks();
    expect(ticks).toContain(0.2);
    expect(ticks).toContain(0.5);
  });

  it("rejects nonpositive domains", () => {
    expect(() => logScale([0, 1], [0, 1])).toThrow(/positive/);
  });
});

describe("tickLabel", () => {
  it("keeps moderate magnitudes plain and compresses extremes", () => {
    expect(tickLabel(0.2)).toBe("0.2");
    expect(tickLabel(100)).toBe("100");
    expect(tickLabel(1e-6)).toBe("1e-6");
    expect(tickLabel(1e8)).toBe("1e8");
  });
});

describe("loglogSlope", () => {
  it("recovers an exact power law", () => {
    const pts = [0.2, 0.1, 0.05, 0.025].map((x) => ({ x, y: 0.7 * x ** 3 }));
    expect(loglogSlope(pts)).toBeCloseTo(3, 10);
  });

  it("ignores points that cannot sit on a log-log plot", () => {
    const pts = [
      { x: 0.2, y: 0.04 },
      { x: 0.1, y: 0.01 },
      { x: 0.05, y: Infinity },
      { x: 0.025, y: NaN },
      { x: 0.0125, y: 0 },
    ];
    expect(loglogSlope(pts)).toBeCloseTo(2, 10);
  });

  it("is NaN with fewer than two usable points", () => {
    expect(Number.isNaN(loglogSlope([{ x: 0.1, y: 1 }]))).toBe(true);
  });
});
