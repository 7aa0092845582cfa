// SVG rendering of the network with the belief overlay. Pure string
// builders so the drawing logic is testable without a DOM.

import type { Point } from "./layout.js";
import type { BeliefPayload, CandidateStatus, NetworkPayload } from "./types.js";

const PROVENANCE_DASH: Record<string, string> = {
  platform: "6 4",
  field: "2 3",
  both: "",
};

export function beliefColor(p: number): string {
  // white (unreached) to deep orange (certainly reached)
  const t = Math.max(0, Math.min(1, p));
  const r = 255;
  const g = Math.round(255 - 150 * t);
  const b = Math.round(255 - 215 * t);
  return `rgb(${r},${g},${b})`;
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export interface RenderState {
  positions: Map<string, Point>;
  belief: BeliefPayload;
  /** status per label in the currently open round, if any */
  roundStatus: Map<string, CandidateStatus>;
  width: number;
  height: number;
}

export function networkSvg(net: NetworkPayload, state: RenderState): string {
  const { positions, belief, roundStatus, width, height } = state;
  const trained = new Set(belief.trained);
  const parts: string[] = [];
  parts.push(
    `<svg viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">`,
  );

  for (const e of net.edges) {
    const a = positions.get(e.u);
    const b = positions.get(e.v);
    if (!a || !b) continue;
    const dash = PROVENANCE_DASH[e.provenance] ?? "";
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    const opacity = (0.25 + 0.75 * e.existence_prob).toFixed(3);
    parts.push(
      `<line class="edge" x1="${a.x.toFixed(1)}" y1="${a.y.toFixed(1)}"` +
        ` x2="${b.x.toFixed(1)}" y2="${b.y.toFixed(1)}"` +
        ` stroke-opacity="${opacity}"${dashAttr}>` +
        `<title>${esc(e.u)} - ${esc(e.v)} p=${e.existence_prob} (${e.provenance})</title>` +
        `</line>`,
    );
  }

  for (const node of net.nodes) {
    const pos = positions.get(node.id);
    if (!pos) continue;
    const p = belief.per_node_prob[node.id] ?? 0;
    const classes = ["node"];
    if (trained.has(node.id)) classes.push("trained");
    const status = roundStatus.get(node.id);
    if (status) classes.push(`candidate-${status}`);
    parts.push(
      `<g class="${classes.join(" ")}" data-node="${esc(node.id)}">` +
        `<circle cx="${pos.x.toFixed(1)}" cy="${pos.y.toFixed(1)}" r="11"` +
        ` fill="${beliefColor(p)}">` +
        `<title>${esc(node.id)} belief=${p.toFixed(4)}${status ? ` [${status}]` : ""}</title>` +
        `</circle>` +
        `<text x="${pos.x.toFixed(1)}" y="${(pos.y + 3.5).toFixed(1)}">${esc(node.id)}</text>` +
        `</g>`,
    );
  }

  parts.push("</svg>");
  return parts.join("");
}

export function legendHtml(): string {
  return (
    `<span class="legend-item"><span class="swatch" style="background:${beliefColor(0)}"></span>belief 0</span>` +
    `<span class="legend-item"><span class="swatch" style="background:${beliefColor(0.5)}"></span>0.5</span>` +
    `<span class="legend-item"><span class="swatch" style="background:${beliefColor(1)}"></span>1</span>` +
    `<span class="legend-item"><span class="swatch ring"></span>trained</span>` +
    `<span class="legend-item"><span class="swatch outline"></span>this round</span>`
  );
}
