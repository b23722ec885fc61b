export interface Scale {
  map(x: number): number;
  ticks(): number[];
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return {
    domain,
    map: (x) => r0 + ((x - d0) / span) * (r1 - r0),
    ticks: () => {
      const step = niceStep((d1 - d0) / 5);
      const out: number[] = [];
      for (let t = Math.ceil(d0 / step) * step; t <= d1 + step * 1e-9; t += step) {
        out.push(Math.abs(t) < step * 1e-9 ? 0 : t);
      }
      return out;
    },
  };
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) {
    throw new Error(`log scale needs positive domain, got [${d0}, ${d1}]`);
  }
  const [r0, r1] = range;
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const span = l1 - l0 || 1;
  return {
    domain,
    map: (x) => r0 + ((Math.log10(x) - l0) / span) * (r1 - r0),
    ticks: () => {
      // decade ticks; fall back to 1-2-5 mantissas when the domain spans
      // less than two decades
      const decades: number[] = [];
      for (let k = Math.ceil(l0 - 1e-9); k <= Math.floor(l1 + 1e-9); k++) {
        decades.push(Number(`1e${k}`)); // Math.pow(10, -4) !== 1e-4
      }
      if (decades.length >= 2) return decades;
      const out: number[] = [];
      for (let k = Math.floor(l0) - 1; k <= Math.ceil(l1) + 1; k++) {
        for (const m of [1, 2, 5]) {
          const t = m * Number(`1e${k}`);
          if (t >= d0 * (1 - 1e-9) && t <= d1 * (1 + 1e-9)) out.push(t);
        }
      }
      return out;
    },
  };
}

function niceStep(raw: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(Math.abs(raw) || 1)));
  const m = raw / mag;
  if (m < 1.5) return mag;
  if (m < 3.5) return 2 * mag;
  if (m < 7.5) return 5 * mag;
  return 10 * mag;
}

export function tickLabel(t: number): string {
  if (t === 0) return "0";
  const k = Math.log10(Math.abs(t));
  if (Number.isInteger(k) && (k <= -4 || k >= 5)) return `1e${k}`;
  if (Math.abs(t) >= 1e-4 && Math.abs(t) < 1e5) {
    return String(parseFloat(t.toPrecision(3)));
  }
  return t.toExponential(0).replace("e+", "e");
}

/** Least-squares slope of log10(y) against log10(x); ignores points that
 * cannot sit on a log-log plot. */
export function loglogSlope(points: { x: number; y: number }[]): number {
  const pts = points.filter(
    (p) => p.x > 0 && p.y > 0 && Number.isFinite(p.x) && Number.isFinite(p.y),
  );
  if (pts.length < 2) return NaN;
  const lx = pts.map((p) => Math.log10(p.x));
  const ly = pts.map((p) => Math.log10(p.y));
  const mx = lx.reduce((a, b) => a + b, 0) / pts.length;
  const my = ly.reduce((a, b) => a + b, 0) / pts.length;
  let num = 0;
  let den = 0;
  for (let i = 0; i < pts.length; i++) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return num / den;
}
