import { fmt, line, tag, text } from "./svg.js";

export type MarkerKind = "circle" | "disc" | "triangle";

export interface Series {
  label: string;
  marker: MarkerKind;
  x: number[];
  y: number[];
}

export interface Axes {
  xLabel: string;
  yLabel: string;
}

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { left: 60, right: 20, top: 20, bottom: 45 };

interface Scale {
  lo: number;
  hi: number;
  ticks: number[];
  decimals: number;
}

function buildScale(values: number[]): Scale {
  let lo = Math.min(0, ...values);
  let hi = Math.max(...values);
  if (hi === lo) {
    hi = lo + 1;
  }
  const span = hi - lo;
  const raw = span / 5;
  const power = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 5, 10].map((s) => s * power).find((s) => s >= raw) as number;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(v);
  }
  const decimals = Math.max(0, -Math.floor(Math.log10(step) + 1e-9));
  return { lo, hi, ticks, decimals };
}

function marker(kind: MarkerKind, cx: number, cy: number): string {
  if (kind === "triangle") {
    const r = 5;
    const points = [
      [cx, cy - r],
      [cx - r * 0.866, cy + r * 0.5],
      [cx + r * 0.866, cy + r * 0.5],
    ]
      .map(([x, y]) => `${fmt(x)},${fmt(y)}`)
      .join(" ");
    return tag("polygon", { points, fill: "black" });
  }
  return tag("circle", {
    cx: fmt(cx),
    cy: fmt(cy),
    r: "4",
    fill: kind === "disc" ? "black" : "white",
    stroke: "black",
    "stroke-width": "1",
  });
}

/** Assemble a scatter figure as a standalone SVG document string. */
export function buildFigure(series: Series[], axes: Axes): string {
  for (const s of series) {
    if (s.x.length !== s.y.length) {
      throw new Error(
        `series "${s.label}" has ${s.x.length} x values but ${s.y.length} y values`,
      );
    }
  }
  const xScale = buildScale(series.flatMap((s) => s.x));
  const yScale = buildScale(series.flatMap((s) => s.y));
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const toX = (v: number) => MARGIN.left + ((v - xScale.lo) / (xScale.hi - xScale.lo)) * plotW;
  const toY = (v: number) => MARGIN.top + plotH - ((v - yScale.lo) / (yScale.hi - yScale.lo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
  );
  parts.push(tag("rect", { width: String(WIDTH), height: String(HEIGHT), fill: "white" }));

  const x0 = MARGIN.left;
  const y0 = MARGIN.top + plotH;
  parts.push(line(x0, MARGIN.top, x0, y0));
  parts.push(line(x0, y0, x0 + plotW, y0));

  for (const t of xScale.ticks) {
    const px = toX(t);
    parts.push(line(px, y0, px, y0 + 5));
    parts.push(
      text(px, y0 + 18, t.toFixed(xScale.decimals), { "text-anchor": "middle" }),
    );
  }
  for (const t of yScale.ticks) {
    const py = toY(t);
    parts.push(line(x0 - 5, py, x0, py));
    parts.push(
      text(x0 - 8, py + 4, t.toFixed(yScale.decimals), { "text-anchor": "end" }),
    );
  }

  parts.push(
    text(x0 + plotW / 2, HEIGHT - 8, axes.xLabel, { "text-anchor": "middle" }),
  );
  parts.push(
    text(0, 0, axes.yLabel, {
      "text-anchor": "middle",
      transform: `translate(${fmt(16)} ${fmt(MARGIN.top + plotH / 2)}) rotate(-90)`,
    }),
  );

  for (const s of series) {
    for (let i = 0; i < s.x.length; i += 1) {
      parts.push(marker(s.marker, toX(s.x[i]), toY(s.y[i])));
    }
  }

  series.forEach((s, index) => {
    const lx = MARGIN.left + 14;
    const ly = MARGIN.top + 14 + index * 18;
    parts.push(marker(s.marker, lx, ly - 4));
    parts.push(text(lx + 10, ly, s.label));
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
