/**
 * End-to-end curator loop against the real service.
 *
 * Spawns the backend CLI (synth + serve) and drives it exclusively through
 * the client modules: a status-quo-weighted solve whose diff view shows
 * essentially no change, and a locked placement that survives a re-solve.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ServiceClient } from "../src/api.js";
import { DashboardController } from "../src/controller.js";
import { diffVsBaseline } from "../src/diff.js";
import { latestResult } from "../src/state.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;

async function waitForHealth(timeoutMs = 60_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      const response = await fetch(`${BASE}/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      throw new Error("backend service did not come up");
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
}

beforeAll(async () => {
  const workdir = mkdtempSync(join(tmpdir(), "curalloc-e2e-"));
  const datasetDir = join(workdir, "dataset");
  const synth = spawnSync(
    "python3",
    [
      "-m", "curalloc.cli", "synth",
      "--out", datasetDir,
      "--objects", "40", "--locations", "8", "--users", "400",
      "--skew", "0.7", "--seed", "5",
    ],
    { encoding: "utf-8" },
  );
  if (synth.status !== 0) {
    throw new Error(`synth failed: ${synth.stderr}`);
  }
  const configPath = join(workdir, "config.json");
  writeFileSync(
    configPath,
    JSON.stringify({ max_iters: 500, step_mode: "theoretical" }),
  );
  server = spawn(
    "python3",
    [
      "-m", "curalloc.cli",
      "--config", configPath,
      "serve", "--dataset", datasetDir, "--port", String(PORT),
    ],
    { stdio: "ignore" },
  );
  await waitForHealth();
}, 120_000);

afterAll(() => {
  server?.kill();
});

describe("curator loop", () => {
  it("status-quo weighting leaves the diff view empty", async () => {
    const controller = new DashboardController(new ServiceClient(BASE), 3);
    await controller.openSession();
    expect(controller.state.baseline?.label).toContain("baseline");

    controller.state = { ...controller.state, tauBar: 10_000 };
    await controller.whatIfSolve({ intervalMs: 250, timeoutMs: 90_000 });

    const result = latestResult(controller.state)!;
    const diff = diffVsBaseline(result.assignment);
    expect(diff.totalEntries).toBe(8 * 40);
    expect(diff.changedFraction).toBeLessThan(0.001);
  }, 120_000);

  it("a locked placement survives a re-solve at full weight", async () => {
    const controller = new DashboardController(new ServiceClient(BASE), 3);
    await controller.openSession();
    const baseline = controller.state.baseline!;
    const locationId = baseline.location_ids[0]!;
    const objectId = baseline.object_ids[7]!;

    // badge state mirrors the acknowledgment
    await controller.setLocks([
      { location_id: locationId, object_id: objectId, weight: 1.0 },
    ]);
    expect(controller.state.locks).toEqual([
      { location_id: locationId, object_id: objectId, weight: 1.0 },
    ]);

    await controller.whatIfSolve({ intervalMs: 250, timeoutMs: 90_000 });
    const result = latestResult(controller.state)!;
    const n = result.assignment.location_ids.indexOf(locationId);
    const m = result.assignment.object_ids.indexOf(objectId);
    expect(result.assignment.entries[n]![m]!).toBeGreaterThanOrEqual(0.99);
  }, 120_000);

  it("two successive solves stay retained for comparison", async () => {
    const controller = new DashboardController(new ServiceClient(BASE), 3);
    await controller.openSession();

    controller.state = { ...controller.state, tauBar: 1 };
    await controller.whatIfSolve({ intervalMs: 250, timeoutMs: 90_000 });
    controller.state = { ...controller.state, tauBar: 100 };
    await controller.whatIfSolve({ intervalMs: 250, timeoutMs: 90_000 });

    expect(controller.state.results).toHaveLength(2);
    const [latest, previous] = controller.state.results;
    expect(latest!.report.iterations_run).toBe(500);
    expect(previous!.report.iterations_run).toBe(500);
    const movedLatest = diffVsBaseline(latest!.assignment).l1Distance;
    const movedPrevious = diffVsBaseline(previous!.assignment).l1Distance;
    // the stronger status-quo weight moves less
    expect(movedLatest).toBeLessThan(movedPrevious);
  }, 240_000);

  it("server-reported fairness arrives with both assignments", async () => {
    const controller = new DashboardController(new ServiceClient(BASE), 3);
    await controller.openSession();
    await controller.whatIfSolve({ intervalMs: 250, timeoutMs: 90_000 });
    const fairness = latestResult(controller.state)!.fairness;
    const labels = Object.keys(fairness);
    expect(labels.some((l) => l.startsWith("baseline"))).toBe(true);
    expect(labels).toContain("optimized");
    for (const cells of Object.values(fairness)) {
      for (const cell of Object.values(cells)) {
        expect(cell.gap_per_round).toHaveLength(3);
        expect(cell.mean_gap).toBeTypeOf("number");
      }
    }
  }, 120_000);
});
