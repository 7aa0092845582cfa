// Deterministic force-directed layout. Same nodes, edges, and seed always
// produce the same coordinates, so the network view never jumps between
// page loads and screenshots are comparable across sessions.

export interface Point {
  x: number;
  y: number;
}

export interface LayoutOptions {
  width: number;
  height: number;
  seed?: number;
  iterations?: number;
}

export const DEFAULT_SEED = 42;

// mulberry32: tiny seeded PRNG, good enough for jittering start positions
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function layoutNetwork(
  nodeIds: string[],
  edges: { u: string; v: string }[],
  opts: LayoutOptions,
): Map<string, Point> {
  const { width, height } = opts;
  const seed = opts.seed ?? DEFAULT_SEED;
  const iterations = opts.iterations ?? 250;
  const n = nodeIds.length;
  const out = new Map<string, Point>();
  if (n === 0) return out;
  if (n === 1) {
    out.set(nodeIds[0], { x: width / 2, y: height / 2 });
    return out;
  }

  const index = new Map<string, number>();
  nodeIds.forEach((id, i) => index.set(id, i));
  const links: Array<[number, number]> = [];
  for (const e of edges) {
    const a = index.get(e.u);
    const b = index.get(e.v);
    if (a === undefined || b === undefined || a === b) continue;
    links.push([a, b]);
  }

  // start on a circle with seeded jitter so symmetric graphs still spread
  const rand = mulberry32(seed);
  const radius = Math.min(width, height) * 0.35;
  const xs = new Float64Array(n);
  const ys = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    const angle = (2 * Math.PI * i) / n;
    xs[i] = width / 2 + radius * Math.cos(angle) + (rand() - 0.5) * 20;
    ys[i] = height / 2 + radius * Math.sin(angle) + (rand() - 0.5) * 20;
  }

  const area = width * height;
  const k = Math.sqrt(area / n); // ideal pairwise distance
  const dx = new Float64Array(n);
  const dy = new Float64Array(n);
  let temperature = Math.min(width, height) / 8;
  const cooling = temperature / (iterations + 1);

  for (let iter = 0; iter < iterations; iter++) {
    dx.fill(0);
    dy.fill(0);
    // repulsion between every pair
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let ex = xs[i] - xs[j];
        let ey = ys[i] - ys[j];
        let dist = Math.hypot(ex, ey);
        if (dist < 1e-9) {
          // deterministic tiny separation for coincident points
          ex = 0.01 * (i - j);
          ey = 0.01;
          dist = Math.hypot(ex, ey);
        }
        const force = (k * k) / dist;
        dx[i] += (ex / dist) * force;
        dy[i] += (ey / dist) * force;
        dx[j] -= (ex / dist) * force;
        dy[j] -= (ey / dist) * force;
      }
    }
    // attraction along edges
    for (const [a, b] of links) {
      const ex = xs[a] - xs[b];
      const ey = ys[a] - ys[b];
      const dist = Math.max(Math.hypot(ex, ey), 1e-9);
      const force = (dist * dist) / k;
      dx[a] -= (ex / dist) * force;
      dy[a] -= (ey / dist) * force;
      dx[b] += (ex / dist) * force;
      dy[b] += (ey / dist) * force;
    }
    // gentle pull to the center keeps disconnected pieces on screen
    for (let i = 0; i < n; i++) {
      dx[i] += (width / 2 - xs[i]) * 0.02;
      dy[i] += (height / 2 - ys[i]) * 0.02;
    }
    // move, capped by the cooling temperature
    for (let i = 0; i < n; i++) {
      const disp = Math.hypot(dx[i], dy[i]);
      if (disp > 1e-9) {
        const step = Math.min(disp, temperature);
        xs[i] += (dx[i] / disp) * step;
        ys[i] += (dy[i] / disp) * step;
      }
    }
    temperature = Math.max(temperature - cooling, 0.5);
  }

  // normalize into the viewport with a margin
  const margin = 28;
  let minX = Infinity,
    maxX = -Infinity,
    minY = Infinity,
    maxY = -Infinity;
  for (let i = 0; i < n; i++) {
    minX = Math.min(minX, xs[i]);
    maxX = Math.max(maxX, xs[i]);
    minY = Math.min(minY, ys[i]);
    maxY = Math.max(maxY, ys[i]);
  }
  const spanX = Math.max(maxX - minX, 1e-9);
  const spanY = Math.max(maxY - minY, 1e-9);
  for (let i = 0; i < n; i++) {
    out.set(nodeIds[i], {
      x: margin + ((xs[i] - minX) / spanX) * (width - 2 * margin),
      y: margin + ((ys[i] - minY) / spanY) * (height - 2 * margin),
    });
  }
  return out;
}
