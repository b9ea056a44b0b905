/** Session store: witness list with optimistic judgment updates and an
 * offline queue. A judgment is applied to the local view immediately,
 * sent to the service, and reconciled against the next server fetch. If
 * the network is down the judgment is queued and retried; nothing is
 * silently dropped. */

import type { ApiClient } from "./api.js";
import { ApiError } from "./api.js";
import type { JudgmentBody, Verdict, WitnessView } from "./types.js";

export type Listener = (store: Store) => void;

export interface PendingJudgment {
  body: JudgmentBody;
  error: string;
}

export class Store {
  readonly sessionId: string;
  private api: ApiClient;
  witnesses: WitnessView[] = [];
  pending: PendingJudgment[] = [];
  private listeners: Listener[] = [];

  constructor(api: ApiClient, sessionId: string) {
    this.api = api;
    this.sessionId = sessionId;
  }

  subscribe(fn: Listener): void {
    this.listeners.push(fn);
  }

  private notify(): void {
    for (const fn of this.listeners) fn(this);
  }

  verdictOf(fingerprint: string): Verdict | null {
    const w = this.witnesses.find((x) => x.fingerprint === fingerprint);
    return w ? w.verdict : null;
  }

  get offline(): boolean {
    return this.pending.length > 0;
  }

  async refresh(): Promise<void> {
    this.witnesses = await this.api.witnesses(this.sessionId);
    this.notify();
  }

  /** Optimistically set the verdict locally, then persist it. Server
   * rejections (unknown fingerprint, bad verdict) roll the local change
   * back; network failures keep it and queue the write for retry. */
  async judge(body: JudgmentBody): Promise<void> {
    const prior = this.verdictOf(body.fingerprint);
    this.applyLocal(body.fingerprint, body.verdict);
    try {
      await this.api.postJudgment(this.sessionId, body);
    } catch (err) {
      if (err instanceof ApiError) {
        if (prior !== null) this.applyLocal(body.fingerprint, prior);
        throw err;
      }
      this.pending.push({ body, error: String(err) });
      this.notify();
    }
  }

  /** Retry everything in the offline queue, preserving order. Stops at
   * the first judgment that still cannot reach the service. */
  async retryPending(): Promise<number> {
    let sent = 0;
    while (this.pending.length > 0) {
      const item = this.pending[0]!;
      try {
        await this.api.postJudgment(this.sessionId, item.body);
      } catch (err) {
        if (err instanceof ApiError) {
          // the server saw it and said no; drop it and surface the error
          this.pending.shift();
          this.notify();
          throw err;
        }
        item.error = String(err);
        this.notify();
        return sent;
      }
      this.pending.shift();
      sent += 1;
      this.notify();
    }
    return sent;
  }

  private applyLocal(fingerprint: string, verdict: Verdict): void {
    this.witnesses = this.witnesses.map((w) =>
      w.fingerprint === fingerprint ? { ...w, verdict } : w,
    );
    this.notify();
  }
}
