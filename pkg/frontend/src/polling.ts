/**
 * Poll a solve job until it reaches a terminal state.
 *
 * The interval floor keeps one in-flight request at a time and avoids
 * hammering the service; progress ticks surface iteration/objective so the
 * dashboard can render a live trace.
 */

import type { JobStatus, ServiceClient } from "./api.js";

export const MIN_POLL_INTERVAL_MS = 250;

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
  onProgress?: (status: JobStatus) => void;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) =>
  new Promise<void>((resolve) => setTimeout(resolve, ms));

export class SolveFailedError extends Error {
  constructor(readonly status: JobStatus) {
    // the server's failure report is surfaced verbatim
    super(status.error ?? "solve failed");
  }
}

export async function pollJob(
  client: ServiceClient,
  sessionId: string,
  jobId: string,
  options: PollOptions = {},
): Promise<JobStatus> {
  const interval = Math.max(options.intervalMs ?? MIN_POLL_INTERVAL_MS, MIN_POLL_INTERVAL_MS);
  const timeout = options.timeoutMs ?? 120_000;
  const sleep = options.sleep ?? defaultSleep;
  const started = Date.now();
  for (;;) {
    const status = await client.jobStatus(sessionId, jobId);
    options.onProgress?.(status);
    if (status.state === "done") {
      return status;
    }
    if (status.state === "failed") {
      throw new SolveFailedError(status);
    }
    if (Date.now() - started > timeout) {
      throw new Error(`solve ${jobId} still ${status.state} after ${timeout}ms`);
    }
    await sleep(interval);
  }
}
