/** Least-squares slope of ln(values) against times, for caption residuals. */
export function logSlope(times: number[], values: number[]): number {
  const pts: Array<[number, number]> = [];
  for (let i = 0; i < times.length; i++) {
    if (values[i] > 0) pts.push([times[i], Math.log(values[i])]);
  }
  if (pts.length < 3) {
    throw new Error(`need at least 3 positive points for a slope, got ${pts.length}`);
  }
  const n = pts.length;
  const tBar = pts.reduce((s, p) => s + p[0], 0) / n;
  const yBar = pts.reduce((s, p) => s + p[1], 0) / n;
  let num = 0;
  let den = 0;
  for (const [t, y] of pts) {
    num += (t - tBar) * (y - yBar);
    den += (t - tBar) * (t - tBar);
  }
  return num / den;
}
