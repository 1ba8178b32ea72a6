/**
 * Plot CLI: reads cbolab CSV outputs, writes SVG figures.
 *
 *   node dist/cli.js decay --input mc_mean.csv --output decay.svg \
 *       [--rate label=value ...]
 *   node dist/cli.js snapshots --trajectory trajectory.csv \
 *       --snapshots snapshots.csv --objective rastrigin --output snap.svg \
 *       [--steps 0,15,40,99]
 *   node dist/cli.js sweep --input sweep.csv [--input more.csv ...] \
 *       --output sweep.svg
 *
 * The decay command prints the fitted slope and per-overlay residuals as
 * JSON on stdout so callers can gate on them.
 */

import { writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";

import { readMcMean, readSnapshots, readSweep, readTrajectory } from "./csv.js";
import { renderDecay, type RateOverlay } from "./decay.js";
import { DEFAULT_PANEL_STEPS, renderSnapshots } from "./snapshots.js";
import { renderSweeps } from "./sweepmap.js";

interface Flags {
  single: Map<string, string>;
  multi: Map<string, string[]>;
}

function parseFlags(argv: string[], multiKeys: string[]): Flags {
  const single = new Map<string, string>();
  const multi = new Map<string, string[]>(multiKeys.map((k) => [k, []]));
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new Error(`malformed arguments near '${key}'`);
    }
    const name = key.slice(2);
    if (multi.has(name)) {
      multi.get(name)!.push(value);
    } else {
      single.set(name, value);
    }
  }
  return { single, multi };
}

function required(flags: Flags, name: string): string {
  const value = flags.single.get(name);
  if (value === undefined) throw new Error(`missing required flag --${name}`);
  return value;
}

function cmdDecay(argv: string[]): number {
  const flags = parseFlags(argv, ["rate"]);
  const input = required(flags, "input");
  const output = required(flags, "output");
  const overlays: RateOverlay[] = flags.multi.get("rate")!.map((spec) => {
    const idx = spec.lastIndexOf("=");
    if (idx < 1) throw new Error(`--rate expects label=value, got '${spec}'`);
    const rate = Number(spec.slice(idx + 1));
    if (Number.isNaN(rate)) throw new Error(`--rate value in '${spec}' is not numeric`);
    return { label: spec.slice(0, idx), rate };
  });
  const rendering = renderDecay(readMcMean(input), overlays);
  writeFileSync(output, rendering.svg);
  process.stdout.write(
    JSON.stringify(
      {
        output,
        fitted_slope: rendering.fittedSlope,
        residuals: overlays.map((o, i) => ({ label: o.label, residual: rendering.residuals[i] })),
      },
      null,
      2,
    ) + "\n",
  );
  return 0;
}

function cmdSnapshots(argv: string[]): number {
  const flags = parseFlags(argv, []);
  const traj = readTrajectory(required(flags, "trajectory"));
  const snaps = readSnapshots(required(flags, "snapshots"));
  const objective = required(flags, "objective");
  const output = required(flags, "output");
  const stepsFlag = flags.single.get("steps");
  const steps = stepsFlag
    ? stepsFlag.split(",").map((s) => Number(s.trim()))
    : DEFAULT_PANEL_STEPS;
  if (steps.some((s) => !Number.isInteger(s) || s < 0)) {
    throw new Error(`--steps must be nonnegative integers, got '${stepsFlag}'`);
  }
  writeFileSync(output, renderSnapshots(traj, snaps, objective, steps));
  process.stdout.write(JSON.stringify({ output, steps }, null, 2) + "\n");
  return 0;
}

function cmdSweep(argv: string[]): number {
  const flags = parseFlags(argv, ["input"]);
  const inputs = flags.multi.get("input")!;
  if (inputs.length === 0) throw new Error("missing required flag --input");
  const output = required(flags, "output");
  const rendering = renderSweeps(inputs.map(readSweep), inputs);
  if (inputs.length === 1) {
    writeFileSync(output, rendering.svgs[0]);
  } else {
    // several inputs: one file per input, suffixed before the extension
    rendering.svgs.forEach((svg, i) => {
      const path = output.replace(/(\.[a-z]+)?$/i, (ext) => `_${i}${ext || ".svg"}`);
      writeFileSync(path, svg);
    });
  }
  process.stdout.write(
    JSON.stringify({ output, color_domain: rendering.colorDomain }, null, 2) + "\n",
  );
  return 0;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    switch (command) {
      case "decay":
        return cmdDecay(rest);
      case "snapshots":
        return cmdSnapshots(rest);
      case "sweep":
        return cmdSweep(rest);
      default:
        throw new Error(
          `unknown command '${command ?? ""}' (expected decay, snapshots or sweep)`,
        );
    }
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : String(err)}\n`);
    return 1;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
