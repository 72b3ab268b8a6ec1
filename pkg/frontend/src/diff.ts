/**
 * Display models for the assignment panels: per-building top weights and
 * the diff against a reference matrix. Pure functions over server-reported
 * matrices; a 23 x 2146 grid is never rendered raw.
 */

import type { AssignmentPayload } from "./api.js";

/** Entries moving less than this are displayed as unchanged. */
export const CHANGE_THRESHOLD = 1e-3;

export interface TopObject {
  objectId: string;
  weight: number;
}

export function topObjectsPerLocation(
  payload: AssignmentPayload,
  limit = 5,
): Map<string, TopObject[]> {
  const out = new Map<string, TopObject[]>();
  payload.location_ids.forEach((locationId, n) => {
    const row = payload.entries[n] ?? [];
    const ranked = row
      .map((weight, m) => ({ objectId: payload.object_ids[m] ?? `#${m}`, weight }))
      .sort((a, b) => b.weight - a.weight)
      .slice(0, limit);
    out.set(locationId, ranked);
  });
  return out;
}

export interface DiffSummary {
  changedEntries: number;
  totalEntries: number;
  changedFraction: number;
  l1Distance: number;
  maxEntryChange: number;
  topMovers: {
    locationId: string;
    objectId: string;
    before: number;
    after: number;
  }[];
}

export function diffAgainst(
  current: number[][],
  reference: number[][],
  locationIds: string[],
  objectIds: string[],
  threshold = CHANGE_THRESHOLD,
  topMoverCount = 10,
): DiffSummary {
  let changed = 0;
  let total = 0;
  let l1 = 0;
  let maxChange = 0;
  const movers: DiffSummary["topMovers"] = [];
  current.forEach((row, n) => {
    const refRow = reference[n] ?? [];
    row.forEach((value, m) => {
      const before = refRow[m] ?? 0;
      const delta = Math.abs(value - before);
      total += 1;
      l1 += delta;
      if (delta > maxChange) maxChange = delta;
      if (delta > threshold) {
        changed += 1;
        movers.push({
          locationId: locationIds[n] ?? `#${n}`,
          objectId: objectIds[m] ?? `#${m}`,
          before,
          after: value,
        });
      }
    });
  });
  movers.sort(
    (a, b) => Math.abs(b.after - b.before) - Math.abs(a.after - a.before),
  );
  return {
    changedEntries: changed,
    totalEntries: total,
    changedFraction: total === 0 ? 0 : changed / total,
    l1Distance: l1,
    maxEntryChange: maxChange,
    topMovers: movers.slice(0, topMoverCount),
  };
}

export function diffVsBaseline(payload: AssignmentPayload): DiffSummary {
  return diffAgainst(
    payload.entries,
    payload.baseline_entries,
    payload.location_ids,
    payload.object_ids,
  );
}

/** One row of the downloadable full-row CSV for a selected building. */
export function rowAsCsv(payload: AssignmentPayload, locationId: string): string {
  const n = payload.location_ids.indexOf(locationId);
  if (n < 0) {
    throw new Error(`unknown location ${locationId}`);
  }
  const header = ["object_id", "weight"].join(",");
  const lines = (payload.entries[n] ?? []).map(
    (weight, m) => `${payload.object_ids[m]},${weight}`,
  );
  return [header, ...lines].join("\n");
}
