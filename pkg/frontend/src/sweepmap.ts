/**
 * Sweep heat map: time on the x axis, swept parameter value on the y axis,
 * cell color = log10 of the averaged squared consensus distance.  Several
 * input files share one color normalization so their magnitudes compare
 * directly.  A single-value grid degenerates to a line plot.
 */

import { interpolateViridis } from "d3";

import type { SweepData } from "./csv.js";
import { polyline, scaleLinear, scaleLog, svgDocument, tag, xAxis, yAxisLog } from "./svg.js";

const W = 560;
const H = 360;
const MARGIN = { left: 78, right: 96, top: 34, bottom: 60 };

function positiveFloor(grids: SweepData[]): number {
  let floor = Number.POSITIVE_INFINITY;
  for (const g of grids) {
    for (const row of g.meanV) {
      for (const v of row) if (v > 0) floor = Math.min(floor, v);
    }
  }
  return Number.isFinite(floor) ? floor : 1e-300;
}

export interface SweepRendering {
  svgs: string[];
  colorDomain: [number, number];
}

export function renderSweeps(inputs: SweepData[], titles: string[]): SweepRendering {
  if (inputs.length === 0) throw new Error("no sweep inputs");
  const floor = positiveFloor(inputs);
  let lo = Number.POSITIVE_INFINITY;
  let hi = Number.NEGATIVE_INFINITY;
  for (const g of inputs) {
    for (const row of g.meanV) {
      for (const v of row) {
        const L = Math.log10(Math.max(v, floor));
        lo = Math.min(lo, L);
        hi = Math.max(hi, L);
      }
    }
  }
  if (lo === hi) hi = lo + 1;

  const svgs = inputs.map((g, i) => renderOne(g, titles[i] ?? `sweep ${i}`, lo, hi, floor));
  return { svgs, colorDomain: [lo, hi] };
}

function renderOne(
  g: SweepData,
  title: string,
  lo: number,
  hi: number,
  floor: number,
): string {
  const parts: string[] = [];
  parts.push(
    tag("text", { x: MARGIN.left, y: 20, "font-size": 12 }, title),
  );

  if (g.values.length === 1) {
    // degenerate grid: plain decay line on a log axis
    const x = scaleLinear()
      .domain([0, g.time[g.time.length - 1]])
      .range([MARGIN.left, W - MARGIN.right]);
    const positive = g.meanV[0].filter((v) => v > 0);
    const y = scaleLog()
      .domain([Math.min(...positive) / 1.5, Math.max(...positive) * 1.5])
      .range([H - MARGIN.bottom, MARGIN.top]);
    const xs: number[] = [];
    const ys: number[] = [];
    g.time.forEach((t, k) => {
      if (g.meanV[0][k] > 0) {
        xs.push(x(t));
        ys.push(y(g.meanV[0][k]));
      }
    });
    parts.push(polyline(xs, ys, "#1f77b4", { width: 2 }));
    parts.push(xAxis(x, H - MARGIN.bottom, "time"));
    parts.push(yAxisLog(y, MARGIN.left, `mean V (value ${g.values[0]})`));
    return svgDocument(W, H, parts.join("\n"));
  }

  const x = scaleLinear()
    .domain([0, g.time.length])
    .range([MARGIN.left, W - MARGIN.right]);
  const y = scaleLinear()
    .domain([0, g.values.length])
    .range([H - MARGIN.bottom, MARGIN.top]);
  const cw = x(1) - x(0);
  const ch = y(0) - y(1);

  g.values.forEach((_, i) => {
    g.time.forEach((_, k) => {
      const L = Math.log10(Math.max(g.meanV[i][k], floor));
      parts.push(
        tag("rect", {
          x: x(k).toFixed(2),
          y: y(i + 1).toFixed(2),
          width: (cw + 0.3).toFixed(2),
          height: (ch + 0.3).toFixed(2),
          fill: interpolateViridis((L - lo) / (hi - lo)),
        }),
      );
    });
  });

  // y labels: first, middle, last grid value
  const label = (i: number) =>
    tag(
      "text",
      { x: MARGIN.left - 6, y: y(i + 0.5) + 3, "text-anchor": "end", "font-size": 10 },
      String(g.values[i]),
    );
  parts.push(label(0));
  parts.push(label(Math.floor(g.values.length / 2)));
  parts.push(label(g.values.length - 1));
  parts.push(
    tag("text", {
      x: MARGIN.left - 52,
      y: (y(0) + y(g.values.length)) / 2,
      "text-anchor": "middle",
      "font-size": 11,
      transform: `rotate(-90 ${MARGIN.left - 52} ${(y(0) + y(g.values.length)) / 2})`,
    }, "parameter value"),
  );

  // x labels: step indices at a few positions
  for (const frac of [0, 0.5, 1]) {
    const k = Math.round(frac * (g.time.length - 1));
    parts.push(
      tag(
        "text",
        { x: x(k + 0.5), y: H - MARGIN.bottom + 14, "text-anchor": "middle", "font-size": 10 },
        g.time[k].toPrecision(3),
      ),
    );
  }
  parts.push(
    tag(
      "text",
      { x: (MARGIN.left + W - MARGIN.right) / 2, y: H - MARGIN.bottom + 32, "text-anchor": "middle", "font-size": 11 },
      "time",
    ),
  );

  // color bar
  const barX = W - MARGIN.right + 24;
  const barH = H - MARGIN.top - MARGIN.bottom;
  const strips = 64;
  for (let s = 0; s < strips; s++) {
    const frac = s / (strips - 1);
    parts.push(
      tag("rect", {
        x: barX,
        y: (MARGIN.top + (1 - frac) * barH - barH / strips).toFixed(2),
        width: 14,
        height: (barH / strips + 0.5).toFixed(2),
        fill: interpolateViridis(frac),
      }),
    );
  }
  parts.push(
    tag("text", { x: barX + 18, y: MARGIN.top + 8, "font-size": 9 }, `1e${hi.toFixed(1)}`),
  );
  parts.push(
    tag("text", { x: barX + 18, y: MARGIN.top + barH, "font-size": 9 }, `1e${lo.toFixed(1)}`),
  );

  return svgDocument(W, H, parts.join("\n"));
}
