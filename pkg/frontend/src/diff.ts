/** Before/after program view with highlighted repair edits. */

import type { DiffPayload, RepairEdit } from "./types.js";

export interface Highlight {
  start: number;
  end: number;
}

export interface DiffView {
  before: string;
  after: string;
  edits: RepairEdit[];
  changed: boolean;
  beforeHighlights: Highlight[];
  afterHighlights: Highlight[];
}

function findAll(haystack: string, needle: string): Highlight[] {
  const out: Highlight[] = [];
  if (!needle) return out;
  let idx = haystack.indexOf(needle);
  while (idx !== -1) {
    out.push({ start: idx, end: idx + needle.length });
    idx = haystack.indexOf(needle, idx + 1);
  }
  return out;
}

function merge(spans: Highlight[]): Highlight[] {
  const sorted = [...spans].sort((a, b) => a.start - b.start);
  const out: Highlight[] = [];
  for (const s of sorted) {
    const last = out[out.length - 1];
    if (last && s.start <= last.end) {
      last.end = Math.max(last.end, s.end);
    } else {
      out.push({ ...s });
    }
  }
  return out;
}

/** Locate each edit's replaced text in the before program and its
 * replacement constant in the after program. Texts come from the service
 * verbatim; only the highlight offsets are computed here. */
export function buildDiff(payload: DiffPayload): DiffView {
  const beforeSpans: Highlight[] = [];
  const afterSpans: Highlight[] = [];
  for (const edit of payload.edits) {
    beforeSpans.push(...findAll(payload.before, edit.before));
    afterSpans.push(...findAll(payload.after, edit.constant));
  }
  return {
    before: payload.before,
    after: payload.after,
    edits: payload.edits,
    changed: payload.before !== payload.after,
    beforeHighlights: merge(beforeSpans),
    afterHighlights: merge(afterSpans),
  };
}

function renderText(
  doc: Document,
  host: Element,
  text: string,
  spans: Highlight[],
): void {
  let cursor = 0;
  for (const span of spans) {
    if (span.start > cursor) {
      host.appendChild(doc.createTextNode(text.slice(cursor, span.start)));
    }
    const mark = doc.createElement("mark");
    mark.textContent = text.slice(span.start, span.end);
    host.appendChild(mark);
    cursor = span.end;
  }
  if (cursor < text.length) {
    host.appendChild(doc.createTextNode(text.slice(cursor)));
  }
}

export function renderDiff(host: Element, view: DiffView): void {
  const doc = host.ownerDocument;
  host.textContent = "";
  if (!view.changed) {
    const note = doc.createElement("p");
    note.className = "diff-unchanged";
    note.textContent = "No edits: the program is unchanged.";
    host.appendChild(note);
  }
  const mk = (label: string, text: string, spans: Highlight[]) => {
    const section = doc.createElement("section");
    const h = doc.createElement("h3");
    h.textContent = label;
    section.appendChild(h);
    const pre = doc.createElement("pre");
    pre.className = `program ${label.toLowerCase()}`;
    renderText(doc, pre, text, spans);
    section.appendChild(pre);
    host.appendChild(section);
  };
  mk("Before", view.before, view.beforeHighlights);
  mk("After", view.after, view.afterHighlights);

  if (view.edits.length > 0) {
    const list = doc.createElement("ul");
    list.className = "edit-list";
    for (const edit of view.edits) {
      const li = doc.createElement("li");
      li.textContent =
        `${edit.before} -> ${edit.constant} at ${edit.positions.join(", ")}`;
      list.appendChild(li);
    }
    host.appendChild(list);
  }
}
