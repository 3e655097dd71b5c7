import { RawRecord } from "../src/data.js";

export function makeRecord(
  id: string,
  qubits: number,
  edges: [number, number, number, number][],
  label: number[] | null = null,
  split?: string,
): RawRecord {
  const n = 1 << qubits;
  const nodes: [number, number][] = [];
  for (let i = 0; i < n; i++) {
    nodes.push([Math.cos(i + 1), Math.sin(2 * i + 1)]);
  }
  return {
    id,
    qubits,
    nodes,
    edges,
    label,
    meta: split === undefined ? {} : { split },
  };
}

/** Small random labeled corpus, deterministic in the seed. */
export function toyCorpus(
  count: number,
  qubits: number,
  seed: number,
): RawRecord[] {
  let state = seed >>> 0;
  const next = () => {
    state = (1103515245 * state + 12345) >>> 0;
    return state / 4294967296;
  };
  const n = 1 << qubits;
  const records: RawRecord[] = [];
  for (let k = 0; k < count; k++) {
    const edges: [number, number, number, number][] = [];
    for (let i = 0; i < n; i++) {
      edges.push([i, i, 1 + next(), 0]);
      const j = Math.floor(next() * n);
      if (j !== i) edges.push([i, j, next() - 0.5, next() - 0.5]);
    }
    const label = Array.from({ length: 3 * qubits }, () => next() * 2 * Math.PI);
    records.push(makeRecord(`toy${k}`, qubits, edges, label));
  }
  return records;
}
