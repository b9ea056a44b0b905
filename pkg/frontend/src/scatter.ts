/** Witness scatter: influence on x, association on y, both axes fixed to
 * [0, 1]. Marker area scales with subterm size, connector lines join each
 * subexpression to its parent, and the region where both thresholds are
 * met is shaded. Layout is pure; rendering targets an SVG element. */

import type { SubexprRow } from "./types.js";

export interface Marker {
  row: SubexprRow;
  cx: number;
  cy: number;
  r: number;
  inRegion: boolean;
}

export interface Connector {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  from: string;
  to: string;
}

export interface Region {
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface ScatterLayout {
  width: number;
  height: number;
  pad: number;
  epsilon: number;
  delta: number;
  markers: Marker[];
  connectors: Connector[];
  region: Region;
}

export interface LayoutOptions {
  width?: number;
  height?: number;
  pad?: number;
  minRadius?: number;
  maxRadius?: number;
}

const DEFAULTS: Required<LayoutOptions> = {
  width: 560,
  height: 420,
  pad: 36,
  minRadius: 4,
  maxRadius: 14,
};

export function inRegion(row: SubexprRow, epsilon: number, delta: number): boolean {
  return row.association >= epsilon && row.influence >= delta;
}

export function layoutScatter(
  rows: SubexprRow[],
  epsilon: number,
  delta: number,
  options: LayoutOptions = {},
): ScatterLayout {
  const opts = { ...DEFAULTS, ...options };
  const { width, height, pad } = opts;
  const xScale = (v: number) => pad + v * (width - 2 * pad);
  const yScale = (v: number) => pad + (1 - v) * (height - 2 * pad);

  const maxSize = rows.reduce((m, r) => Math.max(m, r.subterm_size), 1);
  const markers: Marker[] = rows.map((row) => {
    // area proportional to subterm size, so radius goes with sqrt
    const frac = Math.sqrt(row.subterm_size / maxSize);
    return {
      row,
      cx: xScale(row.influence),
      cy: yScale(row.association),
      r: opts.minRadius + frac * (opts.maxRadius - opts.minRadius),
      inRegion: inRegion(row, epsilon, delta),
    };
  });

  const byPosition = new Map<string, Marker>();
  for (const m of markers) byPosition.set(m.row.position, m);
  const connectors: Connector[] = [];
  for (const m of markers) {
    const parent = byPosition.get(m.row.parent);
    if (!parent) continue;
    connectors.push({
      x1: parent.cx,
      y1: parent.cy,
      x2: m.cx,
      y2: m.cy,
      from: m.row.parent,
      to: m.row.position,
    });
  }

  const region: Region = {
    x: xScale(delta),
    y: yScale(1),
    width: xScale(1) - xScale(delta),
    height: yScale(epsilon) - yScale(1),
  };

  return { width, height, pad, epsilon, delta, markers, connectors, region };
}

export function markersInRegion(layout: ScatterLayout): Marker[] {
  return layout.markers.filter((m) => m.inRegion);
}

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl<K extends keyof SVGElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const el = doc.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, v);
  return el;
}

export type SelectHandler = (row: SubexprRow) => void;

/** Build the scatter plot inside `host`, replacing previous content.
 * With no rows an empty-state panel is shown instead of a blank chart. */
export function renderScatter(
  host: Element,
  layout: ScatterLayout,
  onSelect: SelectHandler = () => undefined,
  selected: string | null = null,
): void {
  const doc = host.ownerDocument;
  host.textContent = "";
  if (layout.markers.length === 0) {
    const empty = doc.createElement("div");
    empty.className = "empty-state";
    empty.textContent =
      "No subexpressions to plot. The model may be constant or the session empty.";
    host.appendChild(empty);
    return;
  }

  const svg = svgEl(doc, "svg", {
    width: String(layout.width),
    height: String(layout.height),
    viewBox: `0 0 ${layout.width} ${layout.height}`,
    role: "img",
    "aria-label": "association versus influence scatter",
  });

  svg.appendChild(svgEl(doc, "rect", {
    class: "region",
    x: String(layout.region.x),
    y: String(layout.region.y),
    width: String(Math.max(0, layout.region.width)),
    height: String(Math.max(0, layout.region.height)),
  }));

  // axes along x=0 and y=0 of the data space
  const { pad, width, height } = layout;
  svg.appendChild(svgEl(doc, "line", {
    class: "axis", x1: String(pad), y1: String(height - pad),
    x2: String(width - pad), y2: String(height - pad),
  }));
  svg.appendChild(svgEl(doc, "line", {
    class: "axis", x1: String(pad), y1: String(pad),
    x2: String(pad), y2: String(height - pad),
  }));

  for (const c of layout.connectors) {
    svg.appendChild(svgEl(doc, "line", {
      class: "connector",
      x1: String(c.x1), y1: String(c.y1),
      x2: String(c.x2), y2: String(c.y2),
      "data-from": c.from, "data-to": c.to,
    }));
  }

  for (const m of layout.markers) {
    const cls = ["marker"];
    if (m.inRegion) cls.push("in-region");
    if (selected === m.row.position) cls.push("selected");
    const circle = svgEl(doc, "circle", {
      class: cls.join(" "),
      cx: String(m.cx), cy: String(m.cy), r: String(m.r),
      tabindex: "0",
      role: "button",
      "data-position": m.row.position,
      "data-fingerprint": m.row.fingerprint,
      "aria-label":
        `${m.row.p1} association ${m.row.association} influence ${m.row.influence}`,
    });
    circle.addEventListener("click", () => onSelect(m.row));
    circle.addEventListener("keydown", (ev) => {
      const key = (ev as KeyboardEvent).key;
      if (key === "Enter" || key === " ") {
        ev.preventDefault();
        onSelect(m.row);
      }
    });
    const title = svgEl(doc, "title", {});
    title.textContent = `${m.row.p1} @ ${m.row.position}`;
    circle.appendChild(title);
    svg.appendChild(circle);
  }

  host.appendChild(svg);
}
