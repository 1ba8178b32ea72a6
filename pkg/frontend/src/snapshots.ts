/**
 * Four-panel particle snapshot figure: agents scattered over the objective
 * surface at selected steps, with the consensus point marked in each panel.
 * Two-dimensional data only (the background is a painted surface).
 */

import { interpolateViridis } from "d3";

import type { SnapshotsData, TrajectoryData } from "./csv.js";
import { surfaceByName } from "./objectives.js";
import { scaleLinear, svgDocument, tag } from "./svg.js";

const PANEL = 230;
const GAP = 14;
const TOP = 30;
const BOTTOM = 16;
const CELLS = 48;

export const DEFAULT_PANEL_STEPS = [0, 15, 40, 99];

export function renderSnapshots(
  traj: TrajectoryData,
  snaps: SnapshotsData,
  objectiveName: string,
  steps: number[] = DEFAULT_PANEL_STEPS,
): string {
  if (snaps.dim !== 2) {
    throw new Error(`snapshot panels need 2-D data, got dim ${snaps.dim}`);
  }
  if (traj.dim !== 2) {
    throw new Error(`trajectory needs 2-D consensus data, got dim ${traj.dim}`);
  }
  const available = [...snaps.byStep.keys()].sort((a, b) => a - b);
  for (const s of steps) {
    if (!snaps.byStep.has(s)) {
      throw new Error(
        `snapshot step ${s} not present (available: ${available.join(", ")})`,
      );
    }
  }
  const surface = surfaceByName(objectiveName);

  // shared bounds over the selected panels, padded a little
  let lo = Number.POSITIVE_INFINITY;
  let hi = Number.NEGATIVE_INFINITY;
  for (const s of steps) {
    for (const p of snaps.byStep.get(s)!) {
      lo = Math.min(lo, p[0], p[1]);
      hi = Math.max(hi, p[0], p[1]);
    }
  }
  const pad = 0.06 * (hi - lo || 1);
  lo -= pad;
  hi += pad;

  // one shared color normalization for the painted surface
  let fLo = Number.POSITIVE_INFINITY;
  let fHi = Number.NEGATIVE_INFINITY;
  for (let i = 0; i < CELLS; i++) {
    for (let j = 0; j < CELLS; j++) {
      const v = surface(
        lo + ((i + 0.5) / CELLS) * (hi - lo),
        lo + ((j + 0.5) / CELLS) * (hi - lo),
      );
      fLo = Math.min(fLo, v);
      fHi = Math.max(fHi, v);
    }
  }
  const span = fHi - fLo || 1;

  const width = steps.length * PANEL + (steps.length - 1) * GAP + 2 * GAP;
  const height = TOP + PANEL + BOTTOM;
  const parts: string[] = [];

  steps.forEach((step, panelIdx) => {
    const x0 = GAP + panelIdx * (PANEL + GAP);
    const sx = scaleLinear().domain([lo, hi]).range([x0, x0 + PANEL]);
    const sy = scaleLinear().domain([lo, hi]).range([TOP + PANEL, TOP]);

    const cell = PANEL / CELLS;
    for (let i = 0; i < CELLS; i++) {
      for (let j = 0; j < CELLS; j++) {
        const cx = lo + ((i + 0.5) / CELLS) * (hi - lo);
        const cy = lo + ((j + 0.5) / CELLS) * (hi - lo);
        const norm = (surface(cx, cy) - fLo) / span;
        parts.push(
          tag("rect", {
            x: (sx(cx) - cell / 2).toFixed(2),
            y: (sy(cy) - cell / 2).toFixed(2),
            width: cell.toFixed(2),
            height: cell.toFixed(2),
            fill: interpolateViridis(norm),
          }),
        );
      }
    }

    for (const p of snaps.byStep.get(step)!) {
      parts.push(
        tag("circle", {
          cx: sx(p[0]).toFixed(2),
          cy: sy(p[1]).toFixed(2),
          r: 2,
          fill: "white",
          stroke: "black",
          "stroke-width": 0.5,
        }),
      );
    }

    const row = traj.step.indexOf(step);
    if (row >= 0) {
      const [cx, cy] = traj.consensus[row];
      const px = sx(cx);
      const py = sy(cy);
      parts.push(
        `<path d="M ${px - 6} ${py} H ${px + 6} M ${px} ${py - 6} V ${py + 6}" ` +
          `stroke="red" stroke-width="2" fill="none"/>`,
      );
      parts.push(
        tag("circle", { cx: px.toFixed(2), cy: py.toFixed(2), r: 3, fill: "none", stroke: "red", "stroke-width": 1.5 }),
      );
    }

    const t = row >= 0 ? traj.time[row] : Number.NaN;
    parts.push(
      tag(
        "text",
        { x: x0 + PANEL / 2, y: TOP - 8, "text-anchor": "middle", "font-size": 11 },
        Number.isNaN(t) ? `step ${step}` : `step ${step} (t = ${t.toPrecision(3)})`,
      ),
    );
    parts.push(
      tag("rect", {
        x: x0,
        y: TOP,
        width: PANEL,
        height: PANEL,
        fill: "none",
        stroke: "black",
        "stroke-width": 0.75,
      }),
    );
  });

  return svgDocument(width, height, parts.join("\n"));
}
