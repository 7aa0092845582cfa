import { describe, expect, it } from "vitest";

import { beliefColor, networkSvg } from "../src/render.js";
import type { RenderState } from "../src/render.js";
import type { CandidateStatus, NetworkPayload } from "../src/types.js";

const NET: NetworkPayload = {
  propagation_prob: 0.5,
  nodes: [{ id: "a" }, { id: "b" }, { id: "c" }],
  edges: [
    { u: "a", v: "b", existence_prob: 1.0, provenance: "both" },
    { u: "b", v: "c", existence_prob: 0.6, provenance: "platform" },
  ],
};

function state(overrides: Partial<RenderState> = {}): RenderState {
  return {
    positions: new Map([
      ["a", { x: 10, y: 10 }],
      ["b", { x: 100, y: 10 }],
      ["c", { x: 50, y: 90 }],
    ]),
    belief: { per_node_prob: {}, round_index: 0, trained: [] },
    roundStatus: new Map(),
    width: 200,
    height: 120,
    ...overrides,
  };
}

describe("beliefColor", () => {
  it("is white at 0 and saturated at 1", () => {
    expect(beliefColor(0)).toBe("rgb(255,255,255)");
    expect(beliefColor(1)).toBe("rgb(255,105,40)");
  });

  it("clamps out-of-range beliefs", () => {
    expect(beliefColor(-0.5)).toBe(beliefColor(0));
    expect(beliefColor(1.5)).toBe(beliefColor(1));
  });

  it("moves monotonically with belief", () => {
    const green = (c: string) => Number(c.match(/rgb\(\d+,(\d+),/)![1]);
    expect(green(beliefColor(0.2))).toBeGreaterThan(green(beliefColor(0.8)));
  });
});

describe("networkSvg", () => {
  it("draws one circle per node and one line per edge", () => {
    const svg = networkSvg(NET, state());
    expect(svg.match(/<circle/g)).toHaveLength(3);
    expect(svg.match(/<line/g)).toHaveLength(2);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.endsWith("</svg>")).toBe(true);
  });

  it("fills nodes with their belief color", () => {
    const svg = networkSvg(
      NET,
      state({ belief: { per_node_prob: { a: 1, b: 0 }, round_index: 1, trained: [] } }),
    );
    expect(svg).toContain(`fill="${beliefColor(1)}"`);
    expect(svg).toContain(`fill="${beliefColor(0)}"`);
  });

  it("marks trained nodes with a class", () => {
    const svg = networkSvg(
      NET,
      state({ belief: { per_node_prob: { a: 1 }, round_index: 1, trained: ["a"] } }),
    );
    expect(svg).toContain('class="node trained"');
    expect(svg.match(/class="node trained"/g)).toHaveLength(1);
  });

  it("marks open-round candidates with their status", () => {
    const roundStatus = new Map<string, CandidateStatus>([["b", "contacted"]]);
    const svg = networkSvg(NET, state({ roundStatus }));
    expect(svg).toContain('class="node candidate-contacted"');
  });

  it("dashes platform-only edges and scales opacity by existence", () => {
    const svg = networkSvg(NET, state());
    expect(svg).toContain('stroke-dasharray="6 4"');
    expect(svg).toContain('stroke-opacity="1.000"');
    expect(svg).toContain('stroke-opacity="0.700"');
  });

  it("escapes markup in labels", () => {
    const evil: NetworkPayload = {
      propagation_prob: 0.5,
      nodes: [{ id: "<x>" }],
      edges: [],
    };
    const svg = networkSvg(evil, state({ positions: new Map([["<x>", { x: 1, y: 1 }]]) }));
    expect(svg).toContain("&lt;x&gt;");
    expect(svg).not.toContain("<x>");
  });
});
