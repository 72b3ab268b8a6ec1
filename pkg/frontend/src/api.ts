/**
 * Typed client for the assignment service.
 *
 * Every mutation of optimization state goes through these endpoints; the
 * dashboard never recomputes the math core, it only renders what the
 * server reports.
 */

export interface Hyperparams {
  alpha: number;
  beta: number;
  lambda_bar: number;
  tau_bar: number;
  step_mode: string;
  max_iters: number;
}

export interface LockEntry {
  location_id: string;
  object_id: string;
  weight: number;
}

export interface SessionState {
  session_id: string;
  seed: number;
  hyperparams: Hyperparams;
  locks: LockEntry[];
  active_job: string | null;
  has_report: boolean;
}

export interface JobStatus {
  job_id: string;
  state: "queued" | "running" | "done" | "failed";
  iteration?: number;
  objective?: number;
  error?: string;
}

export interface AssignmentPayload {
  label: string;
  location_ids: string[];
  object_ids: string[];
  entries: number[][];
  baseline_entries: number[][];
}

export interface SolveReportPayload {
  objective_trace: number[];
  f1: number;
  f2: number;
  f3: number;
  iterations_run: number;
  capacity_residual: number;
  initialization: string;
  step_size: number;
}

export interface GroupCell {
  group_mean: number;
  group_std: number;
  complement_mean: number;
  complement_std: number;
  mean_gap: number;
  gap_per_round: number[];
}

export type FairnessPayload = Record<string, Record<string, GroupCell>>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: unknown,
  ) {
    super(`API error ${status}: ${JSON.stringify(body)}`);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, body);
    }
    return body as T;
  }

  private post<T>(path: string, payload?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: payload === undefined ? "{}" : JSON.stringify(payload),
    });
  }

  health(): Promise<{ status: string; locations: number; objects: number }> {
    return this.request("/health");
  }

  async createSession(): Promise<string> {
    const body = await this.post<{ session_id: string }>("/sessions");
    return body.session_id;
  }

  sessionState(sid: string): Promise<SessionState> {
    return this.request(`/sessions/${sid}`);
  }

  updateHyperparams(
    sid: string,
    update: Partial<Hyperparams> & { seed?: number },
  ): Promise<SessionState> {
    return this.post(`/sessions/${sid}/hyperparams`, update);
  }

  setLocks(
    sid: string,
    locks: LockEntry[],
    clear = false,
  ): Promise<SessionState> {
    return this.post(`/sessions/${sid}/locks`, { locks, clear });
  }

  startSolve(sid: string): Promise<JobStatus> {
    return this.post(`/sessions/${sid}/solve`);
  }

  jobStatus(sid: string, jobId: string): Promise<JobStatus> {
    return this.request(`/sessions/${sid}/jobs/${jobId}`);
  }

  report(sid: string): Promise<SolveReportPayload> {
    return this.request(`/sessions/${sid}/report`);
  }

  assignment(sid: string): Promise<AssignmentPayload> {
    return this.request(`/sessions/${sid}/assignment`);
  }

  fairness(sid: string, rounds = 10): Promise<FairnessPayload> {
    return this.request(`/sessions/${sid}/fairness?rounds=${rounds}`);
  }
}
