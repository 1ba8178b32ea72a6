/** 2-D benchmark surfaces, used only to paint contour backgrounds. */

export type Surface = (x: number, y: number) => number;

export function rastrigin2d(x: number, y: number): number {
  return (
    20 +
    (x * x - 10 * Math.cos(2 * Math.PI * x)) +
    (y * y - 10 * Math.cos(2 * Math.PI * y))
  );
}

export function rosenbrock2d(x: number, y: number): number {
  return (1 - x) ** 2 + 100 * (y - x * x) ** 2;
}

export function discontinuous2d(x: number, y: number): number {
  return x <= 0.5 && y <= 0.5 ? -Math.exp(5 * x + 5 * y) : 0;
}

const SURFACES: Record<string, Surface> = {
  rastrigin: rastrigin2d,
  rosenbrock: rosenbrock2d,
  discontinuous: discontinuous2d,
};

export function surfaceByName(name: string): Surface {
  const surface = SURFACES[name];
  if (!surface) {
    throw new Error(
      `no contour surface for objective '${name}' (have: ${Object.keys(SURFACES).join(", ")})`,
    );
  }
  return surface;
}
