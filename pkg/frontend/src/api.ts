/** Thin typed client for the review service. */

import type {
  DiffPayload,
  JudgmentBody,
  RepairResult,
  SessionForm,
  SubexprPayload,
  WitnessView,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  status: number;
  payload: unknown;

  constructor(status: number, message: string, payload: unknown = null) {
    super(message);
    this.status = status;
    this.payload = payload;
  }
}

/** Repair blocked on witnesses nobody has judged yet (HTTP 409). */
export class UndecidedError extends ApiError {
  undecided: WitnessView[];

  constructor(payload: { error: string; undecided: WitnessView[] }) {
    super(409, payload.error, payload);
    this.undecided = payload.undecided;
  }
}

export class ApiClient {
  private base: string;
  private token: string | null;
  private fetchImpl: FetchLike;

  constructor(base: string, token: string | null = null, fetchImpl?: FetchLike) {
    this.base = base.replace(/\/+$/, "");
    this.token = token;
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private headers(json: boolean): Record<string, string> {
    const h: Record<string, string> = {};
    if (json) h["content-type"] = "application/json";
    if (this.token) h["x-proxy-audit-token"] = this.token;
    return h;
  }

  private async request(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<Response> {
    const resp = await this.fetchImpl(this.base + path, {
      method,
      headers: this.headers(body !== undefined),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) {
      let payload: unknown = null;
      try {
        payload = await resp.json();
      } catch {
        payload = null;
      }
      if (resp.status === 409 && payload && typeof payload === "object"
          && "undecided" in (payload as object)) {
        throw new UndecidedError(
          payload as { error: string; undecided: WitnessView[] },
        );
      }
      const msg = payload && typeof payload === "object"
        && "error" in (payload as object)
        ? String((payload as { error: unknown }).error)
        : `HTTP ${resp.status}`;
      throw new ApiError(resp.status, msg, payload);
    }
    return resp;
  }

  async createSession(form: SessionForm): Promise<string> {
    const resp = await this.request("POST", "/sessions", form);
    const data = (await resp.json()) as { id: string };
    return data.id;
  }

  async witnesses(sid: string): Promise<WitnessView[]> {
    const resp = await this.request("GET", `/sessions/${sid}/witnesses`);
    return (await resp.json()) as WitnessView[];
  }

  async subexpressions(sid: string): Promise<SubexprPayload> {
    const resp = await this.request("GET", `/sessions/${sid}/subexpressions`);
    return (await resp.json()) as SubexprPayload;
  }

  async postJudgment(sid: string, body: JudgmentBody): Promise<void> {
    await this.request("POST", `/sessions/${sid}/judgments`, body);
  }

  async runRepair(sid: string): Promise<RepairResult> {
    const resp = await this.request("POST", `/sessions/${sid}/repair`);
    return (await resp.json()) as RepairResult;
  }

  async programDiff(sid: string): Promise<DiffPayload> {
    const resp = await this.request("GET", `/sessions/${sid}/program?form=diff`);
    return (await resp.json()) as DiffPayload;
  }

  async programText(sid: string): Promise<string> {
    const resp = await this.request("GET", `/sessions/${sid}/program?form=text`);
    const data = (await resp.json()) as { text: string };
    return data.text;
  }
}
