import { describe, expect, it } from "vitest";

import { parseCsvText, readMcMean, readSnapshots, readSweep, readTrajectory } from "../src/csv.js";

const FIX = new URL("./fixtures/", import.meta.url).pathname;

describe("parseCsvText", () => {
  it("parses numeric cells column-major", () => {
    const t = parseCsvText("a,b\n1,2\n3,4\n", "x.csv");
    expect(t.rows).toBe(2);
    expect(t.columns.get("a")).toEqual([1, 3]);
    expect(t.columns.get("b")).toEqual([2, 4]);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsvText("a,b\n1\n", "x.csv")).toThrow(/row 1 has 1 fields/);
  });

  it("rejects non-numeric cells naming the column", () => {
    expect(() => parseCsvText("a,b\n1,oops\n", "x.csv")).toThrow(/column 'b'/);
  });

  it("rejects empty files", () => {
    expect(() => parseCsvText("", "x.csv")).toThrow(/empty/);
  });
});

describe("schema readers", () => {
  it("reads mc_mean.csv", () => {
    const d = readMcMean(FIX + "mc_mean.csv");
    expect(d.step[0]).toBe(0);
    expect(d.meanV.length).toBe(d.time.length);
    expect(d.stderrV.every((s) => s === 0)).toBe(true); // deterministic fixture
  });

  it("reads trajectory.csv with consensus columns", () => {
    const d = readTrajectory(FIX + "trajectory.csv");
    expect(d.dim).toBe(2);
    expect(d.consensus[0].length).toBe(2);
    expect(d.v.length).toBe(101);
  });

  it("reads snapshots.csv grouped by step", () => {
    const d = readSnapshots(FIX + "snapshots.csv");
    expect(d.dim).toBe(2);
    expect(d.byStep.get(0)!.length).toBe(30);
    expect(d.byStep.has(99)).toBe(true);
  });

  it("reads sweep.csv as a rectangular grid", () => {
    const d = readSweep(FIX + "sweep.csv");
    expect(d.values).toEqual([10, 50, 90]);
    expect(d.meanV.length).toBe(3);
    expect(d.meanV[0].length).toBe(d.time.length);
  });

  it("missing column errors name the column", () => {
    expect(() => readMcMean(FIX + "trajectory.csv")).toThrow(/missing required column 'mean_v'/);
  });
});
