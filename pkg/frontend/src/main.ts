/**
 * Browser entry point: mounts the dashboard, wires the controls to the
 * controller, and keeps a solve-disabled state while a job runs.
 */

import { ServiceClient } from "./api.js";
import { DashboardController } from "./controller.js";
import { renderDashboard } from "./dashboard.js";
import { rowAsCsv } from "./diff.js";
import { applySliders, betaFromSlider, latestResult, sliderFromBeta } from "./state.js";

const SERVICE_URL =
  new URLSearchParams(window.location.search).get("service") ??
  "http://127.0.0.1:8000";

const client = new ServiceClient(SERVICE_URL);
const controller = new DashboardController(client);
const root = document.getElementById("app")!;

let fairness: Awaited<ReturnType<typeof client.fairness>> | null = null;

function redraw(): void {
  root.innerHTML = renderDashboard(controller.state, fairness);
  wire();
}

function wire(): void {
  const slider = document.getElementById("beta-slider") as HTMLInputElement | null;
  if (slider) {
    slider.value = String(sliderFromBeta(controller.state.beta));
    slider.addEventListener("change", () => {
      controller.state = applySliders(controller.state, {
        beta: betaFromSlider(Number(slider.value)),
      });
      redraw();
    });
  }
  const lambda = document.getElementById("lambda-input") as HTMLInputElement | null;
  lambda?.addEventListener("change", () => {
    controller.state = applySliders(controller.state, {
      lambdaBar: Number(lambda.value),
    });
    redraw();
  });
  const tau = document.getElementById("tau-input") as HTMLInputElement | null;
  tau?.addEventListener("change", () => {
    controller.state = applySliders(controller.state, { tauBar: Number(tau.value) });
    redraw();
  });
  document.getElementById("solve-button")?.addEventListener("click", () => {
    void runSolve();
  });
  document.getElementById("retry-button")?.addEventListener("click", () => {
    void runSolve();
  });
  document.querySelectorAll<HTMLAnchorElement>(".download-row").forEach((link) => {
    link.addEventListener("click", (event) => {
      event.preventDefault();
      const locationId = link.dataset.loc!;
      const payload =
        latestResult(controller.state)?.assignment ?? controller.state.baseline;
      if (!payload) return;
      const blob = new Blob([rowAsCsv(payload, locationId)], { type: "text/csv" });
      const anchor = document.createElement("a");
      anchor.href = URL.createObjectURL(blob);
      anchor.download = `${locationId}.csv`;
      anchor.click();
      URL.revokeObjectURL(anchor.href);
    });
  });
}

async function runSolve(): Promise<void> {
  redraw();
  try {
    const outcome = await controller.whatIfSolve({
      onProgress: () => redraw(),
    });
    fairness = outcome.fairness;
  } catch {
    // controller.state.lastError carries the server's report
  }
  redraw();
}

async function boot(): Promise<void> {
  try {
    await controller.openSession();
    fairness = await client.fairness(controller.state.sessionId!, 5);
  } catch (error) {
    controller.state = { ...controller.state, lastError: String(error) };
  }
  redraw();
}

void boot();
