/**
 * Dataset loading and graph packing.
 *
 * Input is the solver lab's graph dataset: JSON Lines, one record per line,
 * nodes carrying [Re b_i, Im b_i], directed edges carrying [i, j, Re a_ij,
 * Im a_ij], an optional flat 3q label and a meta object that includes the
 * record's split. Each graph is packed into dense per-node operators so the
 * whole forward pass is batched matrix products:
 *
 *   sIn[i][j]  = scale of edge j -> i   (aggregation over in-neighbors)
 *   sOut[i][j] = scale of edge i -> j   (aggregation over out-neighbors)
 *   eIn[i]     = sum of scaled edge features [Re, Im, sign] over j -> i
 *   eOut[i]    = sum of scaled edge features over i -> j
 *   attMask    = 0 on self-loops and any edge-connected pair, -1e9 elsewhere
 *
 * The scale factor folds sign, magnitude and degree together:
 * sign(a) * |a| / sqrt((1 + degIn(dst)) * (1 + degOut(src))).
 */

import * as fs from "node:fs";

export const TWO_PI = 2.0 * Math.PI;

export interface RawRecord {
  id: string;
  qubits: number;
  nodes: [number, number][];
  edges: [number, number, number, number][];
  label: number[] | null;
  meta: Record<string, unknown>;
}

export interface PackedGraph {
  id: string;
  qubits: number;
  n: number;
  x: Float32Array; // [n, 2]
  sIn: Float32Array; // [n, n]
  sOut: Float32Array; // [n, n]
  eIn: Float32Array; // [n, 3]
  eOut: Float32Array; // [n, 3]
  attMask: Float32Array; // [n, n]
  label: Float32Array | null; // [3 * qubits]
  split: string;
}

/** Sign of a complex weight: real part decides, imaginary part breaks ties. */
export function edgeSign(re: number, im: number): number {
  if (re !== 0) return re > 0 ? 1 : -1;
  if (im !== 0) return im > 0 ? 1 : -1;
  throw new Error("zero edge weight has no sign");
}

export function parseRecord(line: string, lineNo: number): RawRecord {
  let obj: any;
  try {
    obj = JSON.parse(line);
  } catch (err) {
    throw new Error(`line ${lineNo}: ${(err as Error).message}`);
  }
  for (const key of ["id", "qubits", "nodes", "edges"]) {
    if (!(key in obj)) throw new Error(`line ${lineNo}: missing field ${key}`);
  }
  const q = Number(obj.qubits);
  const n = obj.nodes.length;
  if (n !== 1 << q) {
    throw new Error(`line ${lineNo}: ${n} nodes for ${q} qubits`);
  }
  const label = obj.label ?? null;
  if (label !== null && label.length !== 3 * q) {
    throw new Error(`line ${lineNo}: label length ${label.length}, expected ${3 * q}`);
  }
  return {
    id: String(obj.id),
    qubits: q,
    nodes: obj.nodes,
    edges: obj.edges ?? [],
    label,
    meta: obj.meta ?? {},
  };
}

export function loadDataset(path: string): RawRecord[] {
  const text = fs.readFileSync(path, "utf8");
  const records: RawRecord[] = [];
  let lineNo = 0;
  for (const line of text.split("\n")) {
    lineNo += 1;
    if (line.trim() === "") continue;
    records.push(parseRecord(line, lineNo));
  }
  return records;
}

export function packGraph(rec: RawRecord, wrapLabels = false): PackedGraph {
  const n = rec.nodes.length;
  const x = new Float32Array(n * 2);
  for (let i = 0; i < n; i++) {
    x[2 * i] = rec.nodes[i][0];
    x[2 * i + 1] = rec.nodes[i][1];
  }

  const degIn = new Float32Array(n);
  const degOut = new Float32Array(n);
  for (const [src, dst] of rec.edges) {
    degOut[src] += 1;
    degIn[dst] += 1;
  }

  const sIn = new Float32Array(n * n);
  const sOut = new Float32Array(n * n);
  const eIn = new Float32Array(n * 3);
  const eOut = new Float32Array(n * 3);
  const attMask = new Float32Array(n * n).fill(-1e9);
  for (let i = 0; i < n; i++) attMask[i * n + i] = 0;

  for (const [src, dst, re, im] of rec.edges) {
    const sign = edgeSign(re, im);
    const mag = Math.hypot(re, im);
    const scale = (sign * mag) / Math.sqrt((1 + degIn[dst]) * (1 + degOut[src]));
    sIn[dst * n + src] += scale;
    sOut[src * n + dst] += scale;
    eIn[dst * 3] += scale * re;
    eIn[dst * 3 + 1] += scale * im;
    eIn[dst * 3 + 2] += scale * sign;
    eOut[src * 3] += scale * re;
    eOut[src * 3 + 1] += scale * im;
    eOut[src * 3 + 2] += scale * sign;
    attMask[dst * n + src] = 0;
    attMask[src * n + dst] = 0;
  }

  let label: Float32Array | null = null;
  if (rec.label !== null) {
    label = Float32Array.from(
      rec.label,
      (v) => (wrapLabels ? ((v % TWO_PI) + TWO_PI) % TWO_PI : v),
    );
  }

  return {
    id: rec.id,
    qubits: rec.qubits,
    n,
    x,
    sIn,
    sOut,
    eIn,
    eOut,
    attMask,
    label,
    split: String(rec.meta["split"] ?? "all"),
  };
}

export function forQubits(records: RawRecord[], q: number): RawRecord[] {
  return records.filter((r) => r.qubits === q);
}

export function bySplit(graphs: PackedGraph[], split: string): PackedGraph[] {
  return graphs.filter((g) => g.split === split);
}

/** Deterministic PRNG (mulberry32) so shuffles reproduce across runs. */
export function rng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function shuffled<T>(items: T[], random: () => number): T[] {
  const out = items.slice();
  for (let i = out.length - 1; i > 0; i--) {
    const j = Math.floor(random() * (i + 1));
    [out[i], out[j]] = [out[j], out[i]];
  }
  return out;
}
