/**
 * The what-if loop: push the current weights and locks, launch a solve,
 * poll it to completion, pull the fresh report/assignment/fairness, and
 * retain the previous result for comparison.
 */

import type { JobStatus, LockEntry, ServiceClient } from "./api.js";
import { pollJob, SolveFailedError, type PollOptions } from "./polling.js";
import {
  acknowledgeServerState,
  initialViewState,
  recordOutcome,
  type SolveOutcome,
  type ViewState,
} from "./state.js";

export class DashboardController {
  state: ViewState = initialViewState();

  constructor(
    private readonly client: ServiceClient,
    private readonly fairnessRounds = 5,
  ) {}

  async openSession(): Promise<ViewState> {
    const sid = await this.client.createSession();
    const ack = await this.client.sessionState(sid);
    this.state = acknowledgeServerState(this.state, ack);
    this.state = { ...this.state, baseline: await this.client.assignment(sid) };
    return this.state;
  }

  private requireSession(): string {
    if (!this.state.sessionId) {
      throw new Error("no active session");
    }
    return this.state.sessionId;
  }

  async pushHyperparams(): Promise<ViewState> {
    const sid = this.requireSession();
    const ack = await this.client.updateHyperparams(sid, {
      beta: this.state.beta,
      lambda_bar: this.state.lambdaBar,
      tau_bar: this.state.tauBar,
    });
    this.state = acknowledgeServerState(this.state, ack);
    return this.state;
  }

  /** Lock badges reflect the server's acknowledged list, never local intent. */
  async setLocks(locks: LockEntry[], clear = false): Promise<ViewState> {
    const sid = this.requireSession();
    const ack = await this.client.setLocks(sid, locks, clear);
    this.state = acknowledgeServerState(this.state, ack);
    return this.state;
  }

  async whatIfSolve(poll: PollOptions = {}): Promise<SolveOutcome> {
    const sid = this.requireSession();
    if (this.state.solveInProgress) {
      throw new Error("solve in progress");
    }
    await this.pushHyperparams();
    this.state = { ...this.state, solveInProgress: true, lastError: null };
    try {
      const job = await this.client.startSolve(sid);
      await pollJob(this.client, sid, job.job_id, poll);
      const outcome: SolveOutcome = {
        report: await this.client.report(sid),
        assignment: await this.client.assignment(sid),
        fairness: await this.client.fairness(sid, this.fairnessRounds),
      };
      this.state = recordOutcome(this.state, outcome);
      return outcome;
    } catch (error) {
      this.state = {
        ...this.state,
        solveInProgress: false,
        lastError:
          error instanceof SolveFailedError
            ? (error.status.error ?? "solve failed")
            : String(error),
      };
      throw error;
    }
  }

  toggleComplementView(): ViewState {
    this.state = { ...this.state, complementView: !this.state.complementView };
    return this.state;
  }
}
