/**
 * Client view state: slider values clamped to their legal ranges, the lock
 * list mirrored from server acknowledgments, and the last two solve
 * results kept side by side for diffing.
 */

import type {
  AssignmentPayload,
  FairnessPayload,
  LockEntry,
  SessionState,
  SolveReportPayload,
} from "./api.js";

export const BETA_RANGE = { min: 1e-1, max: 1e15 } as const;
export const BAR_RANGE = { min: 1, max: 10_000 } as const;

export function clampBeta(value: number): number {
  if (!Number.isFinite(value)) return BETA_RANGE.min;
  return Math.min(Math.max(value, BETA_RANGE.min), BETA_RANGE.max);
}

export function clampBar(value: number): number {
  if (!Number.isFinite(value)) return BAR_RANGE.min;
  return Math.min(Math.max(value, BAR_RANGE.min), BAR_RANGE.max);
}

/** Slider positions are linear in log10(beta). */
export function betaFromSlider(position: number): number {
  const t = Math.min(Math.max(position, 0), 1);
  const logMin = Math.log10(BETA_RANGE.min);
  const logMax = Math.log10(BETA_RANGE.max);
  return 10 ** (logMin + t * (logMax - logMin));
}

export function sliderFromBeta(beta: number): number {
  const clamped = clampBeta(beta);
  const logMin = Math.log10(BETA_RANGE.min);
  const logMax = Math.log10(BETA_RANGE.max);
  return (Math.log10(clamped) - logMin) / (logMax - logMin);
}

export interface SolveOutcome {
  report: SolveReportPayload;
  assignment: AssignmentPayload;
  fairness: FairnessPayload;
}

export interface ViewState {
  sessionId: string | null;
  beta: number;
  lambdaBar: number;
  tauBar: number;
  selectedLocation: string | null;
  locks: LockEntry[];
  /** newest first; at most two retained for the diff view */
  results: SolveOutcome[];
  baseline: AssignmentPayload | null;
  solveInProgress: boolean;
  lastError: string | null;
  /** which side of the group is displayed as "the group" in the U panel */
  complementView: boolean;
}

export function initialViewState(): ViewState {
  return {
    sessionId: null,
    beta: 100,
    lambdaBar: 1,
    tauBar: 1,
    selectedLocation: null,
    locks: [],
    results: [],
    baseline: null,
    solveInProgress: false,
    lastError: null,
    complementView: false,
  };
}

export function applySliders(
  state: ViewState,
  update: { beta?: number; lambdaBar?: number; tauBar?: number },
): ViewState {
  return {
    ...state,
    beta: update.beta === undefined ? state.beta : clampBeta(update.beta),
    lambdaBar:
      update.lambdaBar === undefined ? state.lambdaBar : clampBar(update.lambdaBar),
    tauBar: update.tauBar === undefined ? state.tauBar : clampBar(update.tauBar),
  };
}

/** Locks only change after a server acknowledgment carrying the new list. */
export function acknowledgeServerState(
  state: ViewState,
  ack: SessionState,
): ViewState {
  return {
    ...state,
    sessionId: ack.session_id,
    locks: [...ack.locks],
    beta: clampBeta(ack.hyperparams.beta),
    lambdaBar: clampBar(ack.hyperparams.lambda_bar),
    tauBar: clampBar(ack.hyperparams.tau_bar),
  };
}

export function recordOutcome(state: ViewState, outcome: SolveOutcome): ViewState {
  return {
    ...state,
    results: [outcome, ...state.results].slice(0, 2),
    solveInProgress: false,
    lastError: null,
  };
}

export function latestResult(state: ViewState): SolveOutcome | null {
  return state.results[0] ?? null;
}

export function previousResult(state: ViewState): SolveOutcome | null {
  return state.results[1] ?? null;
}

/**
 * The displayed gap: the server reports E[group] - E[complement]; viewing
 * the complement as "the group" negates it, nothing is recomputed.
 */
export function displayedGap(cell: { mean_gap: number }, complementView: boolean): number {
  return complementView ? -cell.mean_gap : cell.mean_gap;
}
