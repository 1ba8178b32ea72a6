/**
 * Readers for the cbolab CSV contracts.
 *
 * These scripts never recompute dynamics: they parse the documented column
 * schemas and render them.  Schema violations fail fast, naming the file and
 * the offending column.
 */

import { readFileSync } from "node:fs";

export interface Table {
  header: string[];
  /** column-major numeric cells, same order as header */
  columns: Map<string, number[]>;
  rows: number;
}

export function parseCsvText(text: string, file: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error(`${file}: empty CSV`);
  }
  const header = lines[0].split(",");
  const columns = new Map<string, number[]>(header.map((h) => [h, []]));
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== header.length) {
      throw new Error(
        `${file}: row ${i} has ${parts.length} fields, header has ${header.length}`,
      );
    }
    for (let j = 0; j < header.length; j++) {
      const value = Number(parts[j]);
      if (Number.isNaN(value)) {
        throw new Error(`${file}: row ${i}, column '${header[j]}' is not numeric`);
      }
      columns.get(header[j])!.push(value);
    }
  }
  return { header, columns, rows: lines.length - 1 };
}

export function readTable(file: string): Table {
  return parseCsvText(readFileSync(file, "utf8"), file);
}

export function requireColumns(table: Table, required: string[], file: string): void {
  for (const name of required) {
    if (!table.columns.has(name)) {
      throw new Error(
        `${file}: missing required column '${name}' (have: ${table.header.join(", ")})`,
      );
    }
  }
}

export interface McMeanData {
  step: number[];
  time: number[];
  meanV: number[];
  stderrV: number[];
}

export function readMcMean(file: string): McMeanData {
  const t = readTable(file);
  requireColumns(t, ["step", "time", "mean_v", "stderr_v"], file);
  return {
    step: t.columns.get("step")!,
    time: t.columns.get("time")!,
    meanV: t.columns.get("mean_v")!,
    stderrV: t.columns.get("stderr_v")!,
  };
}

export interface TrajectoryData {
  step: number[];
  time: number[];
  v: number[];
  eNorm: number[];
  bestF: number[];
  /** consensus[k] = consensus point at step k, length dim */
  consensus: number[][];
  dim: number;
}

export function readTrajectory(file: string): TrajectoryData {
  const t = readTable(file);
  requireColumns(t, ["step", "time", "v", "e_norm", "best_f"], file);
  const consensusCols = t.header.filter((h) => h.startsWith("consensus_"));
  if (consensusCols.length === 0) {
    throw new Error(`${file}: missing required column 'consensus_0'`);
  }
  const dim = consensusCols.length;
  const consensus: number[][] = [];
  for (let k = 0; k < t.rows; k++) {
    consensus.push(consensusCols.map((c) => t.columns.get(c)![k]));
  }
  return {
    step: t.columns.get("step")!,
    time: t.columns.get("time")!,
    v: t.columns.get("v")!,
    eNorm: t.columns.get("e_norm")!,
    bestF: t.columns.get("best_f")!,
    consensus,
    dim,
  };
}

export interface SnapshotsData {
  /** positions per recorded step: step -> array of [coord_0, ..., coord_{D-1}] */
  byStep: Map<number, number[][]>;
  dim: number;
}

export function readSnapshots(file: string): SnapshotsData {
  const t = readTable(file);
  requireColumns(t, ["step", "agent", "coord_0"], file);
  const coordCols = t.header.filter((h) => h.startsWith("coord_"));
  const dim = coordCols.length;
  const byStep = new Map<number, number[][]>();
  const steps = t.columns.get("step")!;
  for (let k = 0; k < t.rows; k++) {
    const step = steps[k];
    if (!byStep.has(step)) byStep.set(step, []);
    byStep.get(step)!.push(coordCols.map((c) => t.columns.get(c)![k]));
  }
  return { byStep, dim };
}

export interface SweepData {
  /** distinct grid values in file order */
  values: number[];
  /** shared time axis */
  time: number[];
  /** meanV[i][k]: grid value i, step k */
  meanV: number[][];
}

export function readSweep(file: string): SweepData {
  const t = readTable(file);
  requireColumns(t, ["param_value", "step", "time", "mean_v"], file);
  const pv = t.columns.get("param_value")!;
  const time = t.columns.get("time")!;
  const mv = t.columns.get("mean_v")!;
  const values: number[] = [];
  const meanV: number[][] = [];
  const sharedTime: number[] = [];
  let current = Number.NaN;
  for (let k = 0; k < t.rows; k++) {
    if (pv[k] !== current) {
      current = pv[k];
      values.push(current);
      meanV.push([]);
    }
    meanV[meanV.length - 1].push(mv[k]);
    if (values.length === 1) sharedTime.push(time[k]);
  }
  const len = meanV[0].length;
  for (const row of meanV) {
    if (row.length !== len) {
      throw new Error(`${file}: ragged sweep grid (rows per value differ)`);
    }
  }
  return { values, time: sharedTime, meanV };
}
