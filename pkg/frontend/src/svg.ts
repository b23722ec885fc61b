type Attrs = Record<string, string | number>;

function attrString(attrs: Attrs): string {
  return Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${v}"`)
    .join("");
}

function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export class Svg {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {}

  line(x1: number, y1: number, x2: number, y2: number, attrs: Attrs = {}): void {
    this.parts.push(
      `<line x1="${r(x1)}" y1="${r(y1)}" x2="${r(x2)}" y2="${r(y2)}"${attrString(attrs)}/>`,
    );
  }

  polyline(pts: { x: number; y: number }[], attrs: Attrs = {}): void {
    const coords = pts.map((p) => `${r(p.x)},${r(p.y)}`).join(" ");
    this.parts.push(`<polyline points="${coords}" fill="none"${attrString(attrs)}/>`);
  }

  polygon(pts: { x: number; y: number }[], attrs: Attrs = {}): void {
    const coords = pts.map((p) => `${r(p.x)},${r(p.y)}`).join(" ");
    this.parts.push(`<polygon points="${coords}"${attrString(attrs)}/>`);
  }

  circle(cx: number, cy: number, radius: number, attrs: Attrs = {}): void {
    this.parts.push(`<circle cx="${r(cx)}" cy="${r(cy)}" r="${radius}"${attrString(attrs)}/>`);
  }

  text(x: number, y: number, s: string, attrs: Attrs = {}): void {
    this.parts.push(
      `<text x="${r(x)}" y="${r(y)}"${attrString(attrs)}>${escapeText(s)}</text>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}" ` +
      `font-family="sans-serif" font-size="12">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function r(v: number): string {
  return String(Math.round(v * 100) / 100);
}
