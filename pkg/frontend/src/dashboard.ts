/**
 * HTML builders for the dashboard panels. Pure string templates over the
 * view state so they are testable without a browser; main.ts mounts them.
 */

import type { FairnessPayload, GroupCell, SolveReportPayload } from "./api.js";
import { diffVsBaseline, topObjectsPerLocation } from "./diff.js";
import {
  displayedGap,
  latestResult,
  previousResult,
  type ViewState,
} from "./state.js";

const esc = (value: string) =>
  value.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

const fmt = (value: number, digits = 3) =>
  Number.isFinite(value) ? value.toFixed(digits) : "-";

export function renderHyperPanel(state: ViewState): string {
  return `
  <section class="panel" id="hyper-panel">
    <h2>Weights</h2>
    <label>beta (log scale)
      <input id="beta-slider" type="range" min="0" max="1" step="0.001">
      <span id="beta-value">${state.beta.toExponential(2)}</span>
    </label>
    <label>capacity weight multiplier
      <input id="lambda-input" type="number" min="1" max="10000" value="${state.lambdaBar}">
    </label>
    <label>status-quo weight multiplier
      <input id="tau-input" type="number" min="1" max="10000" value="${state.tauBar}">
    </label>
    <button id="solve-button" ${state.solveInProgress ? "disabled" : ""}>
      ${state.solveInProgress ? "solving…" : "solve"}
    </button>
  </section>`;
}

export function renderLockBadges(state: ViewState): string {
  if (state.locks.length === 0) {
    return `<p class="muted">no placements locked</p>`;
  }
  const badges = state.locks
    .map(
      (lock) =>
        `<span class="badge" data-loc="${esc(lock.location_id)}" data-obj="${esc(
          lock.object_id,
        )}">${esc(lock.object_id)} @ ${esc(lock.location_id)} (${lock.weight})</span>`,
    )
    .join(" ");
  return `<div class="badges">${badges}</div>`;
}

export function renderFairnessPanel(
  fairness: FairnessPayload,
  complementView: boolean,
): string {
  const rows: string[] = [];
  for (const [label, cells] of Object.entries(fairness)) {
    for (const [group, cell] of Object.entries(cells) as [string, GroupCell][]) {
      const gap = displayedGap(cell, complementView);
      rows.push(`
      <tr>
        <td>${esc(label)}</td>
        <td>${esc(group)}</td>
        <td>${fmt(cell.group_mean)} &plusmn; ${fmt(cell.group_std)}</td>
        <td>${fmt(cell.complement_mean)} &plusmn; ${fmt(cell.complement_std)}</td>
        <td class="${gap >= 0 ? "gap-pos" : "gap-neg"}">${fmt(gap)}</td>
      </tr>`);
    }
  }
  return `
  <section class="panel" id="fairness-panel">
    <h2>Group exposure <small>(zero line marks parity)</small></h2>
    <table>
      <thead><tr><th>assignment</th><th>group</th><th>group mean</th>
      <th>complement mean</th><th>gap</th></tr></thead>
      <tbody>${rows.join("")}</tbody>
    </table>
  </section>`;
}

export function renderTraceSparkline(report: SolveReportPayload, width = 240, height = 40): string {
  const trace = report.objective_trace;
  if (trace.length === 0) return "";
  const lo = Math.min(...trace);
  const hi = Math.max(...trace);
  const span = hi - lo || 1;
  const step = Math.max(1, Math.floor(trace.length / width));
  const points: string[] = [];
  for (let i = 0; i < trace.length; i += step) {
    const x = (i / (trace.length - 1 || 1)) * width;
    const y = height - ((trace[i]! - lo) / span) * height;
    points.push(`${x.toFixed(1)},${y.toFixed(1)}`);
  }
  return `<svg class="sparkline" viewBox="0 0 ${width} ${height}">
    <polyline fill="none" stroke="currentColor" stroke-width="1" points="${points.join(" ")}"/>
  </svg>`;
}

export function renderAssignmentPanel(state: ViewState): string {
  const result = latestResult(state);
  const payload = result?.assignment ?? state.baseline;
  if (!payload) {
    return `<section class="panel" id="assignment-panel"><p>no data yet</p></section>`;
  }
  const top = topObjectsPerLocation(payload, 5);
  const blocks: string[] = [];
  for (const [locationId, objects] of top) {
    const items = objects
      .map((o) => `<li>${esc(o.objectId)} <small>${fmt(o.weight)}</small></li>`)
      .join("");
    const selected = state.selectedLocation === locationId ? " selected" : "";
    blocks.push(
      `<div class="building${selected}" data-loc="${esc(locationId)}">
         <h3>${esc(locationId)}</h3><ol>${items}</ol>
         <a href="#" class="download-row" data-loc="${esc(locationId)}">full row</a>
       </div>`,
    );
  }
  return `
  <section class="panel" id="assignment-panel">
    <h2>${esc(payload.label)} — top objects per building</h2>
    <div class="buildings">${blocks.join("")}</div>
  </section>`;
}

export function renderDiffPanel(state: ViewState): string {
  const result = latestResult(state);
  if (!result) {
    return `<section class="panel" id="diff-panel"><p>solve to see changes vs the baseline</p></section>`;
  }
  const diff = diffVsBaseline(result.assignment);
  const previous = previousResult(state);
  const vsPrevious = previous
    ? `<p>vs previous solve: objective ${fmt(
        result.report.objective_trace[result.report.objective_trace.length - 1] ?? NaN,
        6,
      )} (was ${fmt(
        previous.report.objective_trace[previous.report.objective_trace.length - 1] ?? NaN,
        6,
      )})</p>`
    : "";
  const movers = diff.topMovers
    .map(
      (m) =>
        `<tr><td>${esc(m.locationId)}</td><td>${esc(m.objectId)}</td>
         <td>${fmt(m.before)}</td><td>${fmt(m.after)}</td></tr>`,
    )
    .join("");
  return `
  <section class="panel" id="diff-panel">
    <h2>Changes vs baseline</h2>
    <p>${diff.changedEntries} of ${diff.totalEntries} entries changed
       (${(100 * diff.changedFraction).toFixed(2)}%),
       total movement ${fmt(diff.l1Distance, 4)}</p>
    ${vsPrevious}
    ${renderTraceSparkline(result.report)}
    <table>
      <thead><tr><th>building</th><th>object</th><th>before</th><th>after</th></tr></thead>
      <tbody>${movers}</tbody>
    </table>
  </section>`;
}

export function renderErrorBanner(state: ViewState): string {
  if (!state.lastError) return "";
  return `<div class="banner error">
    ${esc(state.lastError)} <button id="retry-button">retry</button>
  </div>`;
}

export function renderDashboard(state: ViewState, fairness: FairnessPayload | null): string {
  return [
    renderErrorBanner(state),
    renderHyperPanel(state),
    `<section class="panel" id="lock-panel"><h2>Locks</h2>${renderLockBadges(state)}</section>`,
    renderAssignmentPanel(state),
    renderDiffPanel(state),
    fairness ? renderFairnessPanel(fairness, state.complementView) : "",
  ].join("\n");
}
