import { describe, expect, it, vi } from "vitest";

import { ApiError, ServiceClient, type JobStatus } from "../src/api.js";
import { MIN_POLL_INTERVAL_MS, pollJob, SolveFailedError } from "../src/polling.js";

const jsonResponse = (body: unknown, status = 200) =>
  new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });

function clientWith(handler: (url: string, init?: RequestInit) => Response) {
  const calls: { url: string; init?: RequestInit }[] = [];
  const client = new ServiceClient("http://svc", async (url, init) => {
    calls.push({ url, init });
    return handler(url, init);
  });
  return { client, calls };
}

describe("ServiceClient", () => {
  it("posts JSON bodies to the mutation endpoints", async () => {
    const { client, calls } = clientWith(() =>
      jsonResponse({ session_id: "abc" }),
    );
    await client.createSession();
    expect(calls[0]!.url).toBe("http://svc/sessions");
    expect(calls[0]!.init?.method).toBe("POST");

    await client.updateHyperparams("abc", { tau_bar: 10000 });
    expect(calls[1]!.url).toBe("http://svc/sessions/abc/hyperparams");
    expect(JSON.parse(String(calls[1]!.init?.body))).toEqual({ tau_bar: 10000 });

    await client.setLocks("abc", [
      { location_id: "L0", object_id: "a1", weight: 1 },
    ]);
    expect(JSON.parse(String(calls[2]!.init?.body))).toMatchObject({
      clear: false,
      locks: [{ location_id: "L0", object_id: "a1", weight: 1 }],
    });
  });

  it("wraps non-2xx replies in ApiError with the server body", async () => {
    const { client } = clientWith(() =>
      jsonResponse({ error: "unknown session" }, 404),
    );
    await expect(client.sessionState("ghost")).rejects.toThrowError(ApiError);
    await client.sessionState("ghost").catch((error: ApiError) => {
      expect(error.status).toBe(404);
      expect(error.body).toEqual({ error: "unknown session" });
    });
  });
});

describe("pollJob", () => {
  const sequence = (states: JobStatus[]) => {
    let i = 0;
    return clientWith(() => jsonResponse(states[Math.min(i++, states.length - 1)]));
  };

  it("resolves on done and reports progress along the way", async () => {
    const { client } = sequence([
      { job_id: "j", state: "queued" },
      { job_id: "j", state: "running", iteration: 40, objective: 1.5 },
      { job_id: "j", state: "done" },
    ]);
    const seen: string[] = [];
    const status = await pollJob(client, "s", "j", {
      sleep: async () => {},
      onProgress: (s) => seen.push(s.state),
    });
    expect(status.state).toBe("done");
    expect(seen).toEqual(["queued", "running", "done"]);
  });

  it("surfaces the server's failure report verbatim", async () => {
    const { client } = sequence([
      { job_id: "j", state: "failed", error: "ValueError: degenerate scaling" },
    ]);
    await expect(pollJob(client, "s", "j", { sleep: async () => {} })).rejects.toThrow(
      "ValueError: degenerate scaling",
    );
    await pollJob(client, "s", "j", { sleep: async () => {} }).catch(
      (error: SolveFailedError) => {
        expect(error.status.error).toBe("ValueError: degenerate scaling");
      },
    );
  });

  it("never polls faster than the interval floor", async () => {
    const { client } = sequence([
      { job_id: "j", state: "running" },
      { job_id: "j", state: "done" },
    ]);
    const sleeps: number[] = [];
    await pollJob(client, "s", "j", {
      intervalMs: 10,
      sleep: async (ms) => {
        sleeps.push(ms);
      },
    });
    expect(sleeps.every((ms) => ms >= MIN_POLL_INTERVAL_MS)).toBe(true);
  });

  it("times out with the last known state", async () => {
    const { client } = sequence([{ job_id: "j", state: "running" }]);
    vi.useFakeTimers();
    try {
      const pending = pollJob(client, "s", "j", {
        timeoutMs: 1,
        sleep: async () => {
          vi.advanceTimersByTime(500);
        },
      });
      await expect(pending).rejects.toThrow(/still running/);
    } finally {
      vi.useRealTimers();
    }
  });
});
