import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { Store } from "../src/state.js";
import type { WitnessView } from "../src/types.js";
import { maskedWitness } from "./fixtures.js";

/** In-memory stand-in for the service, switchable between online,
 * network-down, and rejecting modes. */
class FakeBackend {
  witnesses: WitnessView[] = [maskedWitness()];
  mode: "online" | "down" | "reject" = "online";
  posted: string[] = [];

  fetch = async (input: string, init?: RequestInit): Promise<Response> => {
    if (this.mode === "down") {
      throw new TypeError("fetch failed: network down");
    }
    if (input.endsWith("/judgments")) {
      if (this.mode === "reject") {
        return new Response(JSON.stringify({ error: "unknown fingerprint" }), {
          status: 404,
        });
      }
      const body = JSON.parse(String(init!.body)) as {
        fingerprint: string;
        verdict: WitnessView["verdict"];
      };
      this.posted.push(`${body.fingerprint}:${body.verdict}`);
      this.witnesses = this.witnesses.map((w) =>
        w.fingerprint === body.fingerprint ? { ...w, verdict: body.verdict } : w,
      );
      return new Response(null, { status: 204 });
    }
    if (input.endsWith("/witnesses")) {
      return new Response(JSON.stringify(this.witnesses), { status: 200 });
    }
    throw new Error(`unexpected request ${input}`);
  };
}

describe("Store", () => {
  let backend: FakeBackend;
  let store: Store;

  beforeEach(async () => {
    backend = new FakeBackend();
    store = new Store(new ApiClient("http://svc", null, backend.fetch), "s1");
    await store.refresh();
  });

  it("applies a judgment optimistically and persists it", async () => {
    const seen: string[] = [];
    store.subscribe((s) => seen.push(s.verdictOf("fp-guard")!));
    await store.judge({ fingerprint: "fp-guard", verdict: "inappropriate" });
    expect(seen[0]).toBe("inappropriate");
    expect(backend.posted).toEqual(["fp-guard:inappropriate"]);
    await store.refresh();
    expect(store.verdictOf("fp-guard")).toBe("inappropriate");
    expect(store.offline).toBe(false);
  });

  it("queues judgments while offline instead of dropping them", async () => {
    backend.mode = "down";
    await store.judge({ fingerprint: "fp-guard", verdict: "inappropriate" });
    // the optimistic verdict stays visible and the write is queued
    expect(store.verdictOf("fp-guard")).toBe("inappropriate");
    expect(store.offline).toBe(true);
    expect(store.pending).toHaveLength(1);
    expect(backend.posted).toEqual([]);
  });

  it("retryPending flushes the queue in order once the service returns", async () => {
    backend.mode = "down";
    await store.judge({ fingerprint: "fp-guard", verdict: "appropriate" });
    await store.judge({ fingerprint: "fp-guard", verdict: "inappropriate" });
    expect(store.pending).toHaveLength(2);

    backend.mode = "online";
    const sent = await store.retryPending();
    expect(sent).toBe(2);
    expect(store.offline).toBe(false);
    expect(backend.posted).toEqual([
      "fp-guard:appropriate",
      "fp-guard:inappropriate",
    ]);
    await store.refresh();
    // the server keeps the latest judgment
    expect(store.verdictOf("fp-guard")).toBe("inappropriate");
  });

  it("retryPending stops at the first item if still offline", async () => {
    backend.mode = "down";
    await store.judge({ fingerprint: "fp-guard", verdict: "inappropriate" });
    const sent = await store.retryPending();
    expect(sent).toBe(0);
    expect(store.pending).toHaveLength(1);
  });

  it("rolls back the optimistic verdict when the server rejects", async () => {
    backend.mode = "reject";
    await expect(
      store.judge({ fingerprint: "fp-guard", verdict: "inappropriate" }),
    ).rejects.toThrowError(ApiError);
    expect(store.verdictOf("fp-guard")).toBe("undecided");
    expect(store.offline).toBe(false);
  });

  it("notifies subscribers on refresh and on local changes", async () => {
    let ticks = 0;
    store.subscribe(() => {
      ticks += 1;
    });
    await store.refresh();
    await store.judge({ fingerprint: "fp-guard", verdict: "appropriate" });
    expect(ticks).toBeGreaterThanOrEqual(2);
  });
});
