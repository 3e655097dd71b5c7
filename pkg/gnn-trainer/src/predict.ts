/**
 * Inference: one JSONL prediction line per input record, in input order,
 * angles reduced into [0, 2pi). Per-sample wall time is measured one record
 * at a time (batch of one) because warm-start consumers load predictions
 * individually.
 */

import * as fs from "node:fs";
import { performance } from "node:perf_hooks";

import { RawRecord, TWO_PI, packGraph } from "./data.js";
import { SignedGraphModel, disposeBatch, packBatch } from "./model.js";

export interface Prediction {
  id: string;
  qubits: number;
  params: number[][];
}

export interface PredictResult {
  predictions: Prediction[];
  meanMs: number;
}

export function predict(
  model: SignedGraphModel,
  records: RawRecord[],
): PredictResult {
  const q = model.config.qubits;
  const predictions: Prediction[] = [];
  let totalMs = 0;
  for (const rec of records) {
    if (rec.qubits !== q) {
      throw new Error(
        `record ${rec.id} has ${rec.qubits} qubits, checkpoint expects ${q}`,
      );
    }
    const batch = packBatch([packGraph(rec)]);
    const t0 = performance.now();
    const out = model.forward(batch);
    const flat = out.dataSync();
    totalMs += performance.now() - t0;
    out.dispose();
    disposeBatch(batch);

    const params: number[][] = [];
    for (let j = 0; j < q; j++) {
      const row: number[] = [];
      for (let s = 0; s < 3; s++) {
        const v = flat[3 * j + s];
        row.push(((v % TWO_PI) + TWO_PI) % TWO_PI);
      }
      params.push(row);
    }
    predictions.push({ id: rec.id, qubits: q, params });
  }
  return {
    predictions,
    meanMs: records.length > 0 ? totalMs / records.length : NaN,
  };
}

export function writePredictions(predictions: Prediction[], path: string): void {
  const lines = predictions.map((p) => JSON.stringify(p));
  fs.writeFileSync(path, lines.join("\n") + "\n");
}
