/** Minimal SVG assembly: d3 supplies scales and color maps, strings do the rest. */

import { scaleLinear, scaleLog } from "d3";

export type LinearScale = ReturnType<typeof scaleLinear<number, number>>;
export type LogScale = ReturnType<typeof scaleLog<number, number>>;

export function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function tag(
  name: string,
  attrs: Record<string, string | number>,
  body = "",
): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${v}"`)
    .join(" ");
  return body === "" && name !== "text"
    ? `<${name} ${parts}/>`
    : `<${name} ${parts}>${body}</${name}>`;
}

export function svgDocument(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n` +
    body +
    "\n</svg>\n"
  );
}

export function polyline(
  xs: number[],
  ys: number[],
  stroke: string,
  opts: { width?: number; dash?: string } = {},
): string {
  const pts = xs.map((x, i) => `${x.toFixed(2)},${ys[i].toFixed(2)}`).join(" ");
  const dash = opts.dash ? ` stroke-dasharray="${opts.dash}"` : "";
  return (
    `<polyline points="${pts}" fill="none" stroke="${stroke}" ` +
    `stroke-width="${opts.width ?? 1.5}"${dash}/>`
  );
}

export function xAxis(
  scale: LinearScale,
  y: number,
  label: string,
  ticks = 6,
): string {
  const [x0, x1] = scale.range();
  const parts = [
    `<line x1="${x0}" y1="${y}" x2="${x1}" y2="${y}" stroke="black"/>`,
  ];
  for (const t of scale.ticks(ticks)) {
    const x = scale(t);
    parts.push(`<line x1="${x}" y1="${y}" x2="${x}" y2="${y + 4}" stroke="black"/>`);
    parts.push(
      tag(
        "text",
        { x, y: y + 16, "text-anchor": "middle", "font-size": 10 },
        String(t),
      ),
    );
  }
  const mid = (x0 + x1) / 2;
  parts.push(
    tag("text", { x: mid, y: y + 32, "text-anchor": "middle", "font-size": 11 }, esc(label)),
  );
  return parts.join("\n");
}

export function yAxisLog(scale: LogScale, x: number, label: string): string {
  const [y1, y0] = scale.range(); // log scale maps increasing to decreasing y
  const parts = [
    `<line x1="${x}" y1="${Math.min(y0, y1)}" x2="${x}" y2="${Math.max(y0, y1)}" stroke="black"/>`,
  ];
  const [lo, hi] = scale.domain();
  for (
    let p = Math.ceil(Math.log10(lo));
    p <= Math.floor(Math.log10(hi));
    p++
  ) {
    const v = 10 ** p;
    const y = scale(v);
    parts.push(`<line x1="${x - 4}" y1="${y}" x2="${x}" y2="${y}" stroke="black"/>`);
    parts.push(
      tag(
        "text",
        { x: x - 6, y: y + 3, "text-anchor": "end", "font-size": 10 },
        `1e${p}`,
      ),
    );
  }
  parts.push(
    tag("text", {
      x: x - 38,
      y: (y0 + y1) / 2,
      "text-anchor": "middle",
      "font-size": 11,
      transform: `rotate(-90 ${x - 38} ${(y0 + y1) / 2})`,
    }, esc(label)),
  );
  return parts.join("\n");
}

export { scaleLinear, scaleLog };
