/**
 * Decay-curve figure: mean squared consensus distance on a log axis, with
 * dotted theoretical reference lines exp(-rate t) anchored at the first
 * value.  The caption reports the fitted log-slope and its residual against
 * each overlay rate.
 */

import type { McMeanData } from "./csv.js";
import { logSlope } from "./fit.js";
import { esc, polyline, scaleLinear, scaleLog, svgDocument, tag, xAxis, yAxisLog } from "./svg.js";

export interface RateOverlay {
  label: string;
  /** positive decay rate: reference curve is v0 * exp(-rate * t) */
  rate: number;
}

export interface DecayRendering {
  svg: string;
  fittedSlope: number;
  /** |fitted + rate| per overlay, same order */
  residuals: number[];
}

const W = 640;
const H = 420;
const MARGIN = { left: 70, right: 20, top: 20, bottom: 64 };

export function renderDecay(data: McMeanData, overlays: RateOverlay[]): DecayRendering {
  const positive = data.meanV.filter((v) => v > 0);
  if (positive.length < 3) {
    throw new Error("mean_v has fewer than 3 positive values; nothing to plot");
  }
  const tMax = data.time[data.time.length - 1];
  const vMin = Math.min(...positive);
  const vMax = Math.max(...positive);

  const x = scaleLinear().domain([0, tMax]).range([MARGIN.left, W - MARGIN.right]);
  const y = scaleLog()
    .domain([vMin / 1.5, vMax * 1.5])
    .range([H - MARGIN.bottom, MARGIN.top]);

  const parts: string[] = [];
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < data.time.length; i++) {
    if (data.meanV[i] > 0) {
      xs.push(x(data.time[i]));
      ys.push(y(data.meanV[i]));
    }
  }
  parts.push(polyline(xs, ys, "#1f77b4", { width: 2 }));

  const colors = ["#d62728", "#2ca02c", "#9467bd", "#8c564b"];
  const fittedSlope = logSlope(data.time, data.meanV);
  const residuals: number[] = [];
  overlays.forEach((overlay, idx) => {
    const v0 = data.meanV.find((v) => v > 0)!;
    const rxs: number[] = [];
    const rys: number[] = [];
    for (const t of data.time) {
      const v = v0 * Math.exp(-overlay.rate * t);
      if (v >= y.domain()[0]) {
        rxs.push(x(t));
        rys.push(y(v));
      }
    }
    const color = colors[idx % colors.length];
    parts.push(polyline(rxs, rys, color, { dash: "4 4", width: 1.5 }));
    parts.push(
      tag(
        "text",
        { x: W - MARGIN.right - 4, y: MARGIN.top + 14 * (idx + 1), "text-anchor": "end", "font-size": 10, fill: color },
        esc(`${overlay.label}: rate ${overlay.rate.toPrecision(6)}`),
      ),
    );
    residuals.push(Math.abs(fittedSlope + overlay.rate));
  });

  parts.push(xAxis(x, H - MARGIN.bottom, "time"));
  parts.push(yAxisLog(y, MARGIN.left, "mean squared distance to consensus"));

  const residualText = overlays.length
    ? overlays
        .map((o, i) => `${o.label}: |slope residual| = ${residuals[i].toExponential(3)}`)
        .join("; ")
    : "no reference rates";
  parts.push(
    tag(
      "text",
      { x: MARGIN.left, y: H - 8, "font-size": 10, fill: "#333" },
      esc(`fitted log-slope ${fittedSlope.toPrecision(6)}; ${residualText}`),
    ),
  );

  return { svg: svgDocument(W, H, parts.join("\n")), fittedSlope, residuals };
}
