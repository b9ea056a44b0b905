/** Browser entry point. Wires the API client, witness store, scatter
 * plot, judgment form, and repair diff to the page in static/index.html.
 * The service token, if the service requires one, is asked for once and
 * kept in session storage. */

import { ApiClient, ApiError, UndecidedError } from "./api.js";
import { buildDiff, renderDiff } from "./diff.js";
import { layoutScatter, renderScatter } from "./scatter.js";
import { Store } from "./state.js";
import type { SubexprPayload, SubexprRow, Verdict, WitnessView } from "./types.js";

const TOKEN_KEY = "proxy-audit-token";

function getToken(): string | null {
  return window.sessionStorage.getItem(TOKEN_KEY);
}

function askToken(): string | null {
  const entered = window.prompt("Service token (x-proxy-audit-token):", "");
  if (entered) {
    window.sessionStorage.setItem(TOKEN_KEY, entered);
    return entered;
  }
  return null;
}

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function fmt(x: number): string {
  return String(x);
}

interface UiState {
  selected: SubexprRow | null;
  subexpr: SubexprPayload | null;
  preRepair: SubexprPayload | null;
  epsilon: number;
  delta: number;
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const sessionId = params.get("session");
  const status = el<HTMLDivElement>("status");
  if (!sessionId) {
    status.textContent = "Open with ?session=<id> in the URL.";
    return;
  }

  let api = new ApiClient("", getToken());
  const store = new Store(api, sessionId);
  const ui: UiState = {
    selected: null,
    subexpr: null,
    preRepair: null,
    epsilon: 0.9,
    delta: 0.4,
  };

  const scatterHost = el<HTMLDivElement>("scatter");
  const overlayHost = el<HTMLDivElement>("scatter-overlay");
  const witnessHost = el<HTMLUListElement>("witness-list");
  const detailHost = el<HTMLDivElement>("detail");
  const diffHost = el<HTMLDivElement>("diff");
  const epsInput = el<HTMLInputElement>("epsilon");
  const deltaInput = el<HTMLInputElement>("delta");
  const retryBtn = el<HTMLButtonElement>("retry");
  const repairBtn = el<HTMLButtonElement>("repair");

  function drawScatter(): void {
    if (!ui.subexpr) return;
    const layout = layoutScatter(ui.subexpr.rows, ui.epsilon, ui.delta);
    renderScatter(scatterHost, layout, (row) => {
      ui.selected = row;
      drawDetail();
      drawScatter();
    }, ui.selected ? ui.selected.position : null);
    if (ui.preRepair) {
      const before = layoutScatter(ui.preRepair.rows, ui.epsilon, ui.delta);
      renderScatter(overlayHost, before, () => undefined, null);
      overlayHost.hidden = false;
    } else {
      overlayHost.hidden = true;
    }
  }

  function drawDetail(): void {
    detailHost.textContent = "";
    const row = ui.selected;
    if (!row) {
      detailHost.textContent = "Select a marker to inspect it.";
      return;
    }
    const dl = document.createElement("dl");
    const add = (k: string, v: string) => {
      const dt = document.createElement("dt");
      dt.textContent = k;
      const dd = document.createElement("dd");
      dd.textContent = v;
      dl.appendChild(dt);
      dl.appendChild(dd);
    };
    add("subprogram", row.p1);
    add("context", row.p2);
    add("positions", row.positions.join(", "));
    add("association", fmt(row.association));
    add("influence", fmt(row.influence));
    add("reach probability", fmt(row.reach_prob));
    detailHost.appendChild(dl);
  }

  function drawWitnesses(): void {
    witnessHost.textContent = "";
    if (store.witnesses.length === 0) {
      const li = document.createElement("li");
      li.className = "empty-state";
      li.textContent = "No witnesses at the current thresholds.";
      witnessHost.appendChild(li);
      return;
    }
    for (const w of store.witnesses) {
      witnessHost.appendChild(witnessItem(w));
    }
  }

  function witnessItem(w: WitnessView): HTMLLIElement {
    const li = document.createElement("li");
    li.className = `witness verdict-${w.verdict}`;
    const head = document.createElement("code");
    head.textContent = w.p1;
    li.appendChild(head);
    const meta = document.createElement("span");
    meta.className = "measures";
    meta.textContent =
      ` association ${fmt(w.association)}, influence ${fmt(w.influence)}` +
      ` [${w.verdict}]`;
    li.appendChild(meta);
    for (const verdict of ["appropriate", "inappropriate"] as Verdict[]) {
      const btn = document.createElement("button");
      btn.textContent = verdict;
      btn.addEventListener("click", async () => {
        try {
          await store.judge({ fingerprint: w.fingerprint, verdict });
          status.textContent = "";
        } catch (err) {
          status.textContent = err instanceof ApiError
            ? `Judgment rejected: ${err.message}`
            : String(err);
        }
      });
      li.appendChild(btn);
    }
    return li;
  }

  function drawStatus(): void {
    retryBtn.hidden = !store.offline;
    if (store.offline) {
      status.textContent =
        `${store.pending.length} judgment(s) queued offline; will retry.`;
    }
  }

  store.subscribe(() => {
    drawWitnesses();
    drawStatus();
  });

  epsInput.addEventListener("change", () => {
    ui.epsilon = Number(epsInput.value);
    drawScatter();
  });
  deltaInput.addEventListener("change", () => {
    ui.delta = Number(deltaInput.value);
    drawScatter();
  });

  retryBtn.addEventListener("click", async () => {
    try {
      const sent = await store.retryPending();
      status.textContent = `Resent ${sent} queued judgment(s).`;
      await store.refresh();
    } catch (err) {
      status.textContent = String(err);
    }
  });

  repairBtn.addEventListener("click", async () => {
    try {
      ui.preRepair = ui.subexpr;
      const result = await api.runRepair(sessionId);
      status.textContent =
        `Repair done in ${result.iterations} iteration(s),` +
        ` ${result.edits.length} edit(s).`;
      const [diff, sub] = await Promise.all([
        api.programDiff(sessionId),
        api.subexpressions(sessionId),
      ]);
      renderDiff(diffHost, buildDiff(diff));
      ui.subexpr = sub;
      drawScatter();
      await store.refresh();
    } catch (err) {
      ui.preRepair = null;
      if (err instanceof UndecidedError) {
        status.textContent =
          `Repair blocked: ${err.undecided.length} undecided witness(es).`;
        return;
      }
      status.textContent = String(err);
    }
  });

  async function load(): Promise<void> {
    const payload = await api.subexpressions(sessionId!);
    ui.subexpr = payload;
    ui.epsilon = payload.epsilon;
    ui.delta = payload.delta;
    epsInput.value = String(payload.epsilon);
    deltaInput.value = String(payload.delta);
    drawScatter();
    drawDetail();
    await store.refresh();
    const diff = await api.programDiff(sessionId!);
    renderDiff(diffHost, buildDiff(diff));
  }

  try {
    await load();
  } catch (err) {
    if (err instanceof ApiError && err.status === 401) {
      const token = askToken();
      if (token) {
        api = new ApiClient("", token);
        window.location.reload();
        return;
      }
    }
    status.textContent = String(err);
  }
}

boot();
