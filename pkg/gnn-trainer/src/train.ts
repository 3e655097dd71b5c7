/**
 * Adam / MSE training over labeled graph records.
 *
 * Records are grouped by the split recorded in their meta (train/val); the
 * learning rate starts at config.lr and decays linearly to zero across the
 * epoch budget. Metrics row 0 is the pre-training loss so "trained below
 * where it started" is checkable from the CSV alone. Runs are deterministic
 * for a fixed seed on the CPU backend: seeded weight init, seeded shuffles,
 * and single-threaded kernels (the framework offers no determinism knob
 * beyond that).
 */

import * as fs from "node:fs";

import * as tf from "@tensorflow/tfjs";

import { PackedGraph, RawRecord, packGraph, rng, shuffled } from "./data.js";
import {
  Batch,
  ModelConfig,
  SignedGraphModel,
  buildModel,
  disposeBatch,
  packBatch,
} from "./model.js";

export interface MetricsRow {
  epoch: number;
  trainMse: number;
  valMse: number | null;
}

export interface TrainResult {
  model: SignedGraphModel;
  metrics: MetricsRow[];
  flagged: boolean;
}

/** Learning rate before epoch `epoch` of `epochs`: linear from lr to 0. */
export function lrAt(epoch: number, lr: number, epochs: number): number {
  return lr * (1 - epoch / epochs);
}

function mse(model: SignedGraphModel, batch: Batch): tf.Scalar {
  if (batch.labels === null) throw new Error("batch has no labels");
  const pred = model.forward(batch);
  const out = pred.sub(batch.labels).square().mean() as tf.Scalar;
  pred.dispose();
  return out;
}

export function evaluateMse(
  model: SignedGraphModel,
  graphs: PackedGraph[],
  batchSize: number,
): number {
  if (graphs.length === 0) return NaN;
  let total = 0;
  for (let k = 0; k < graphs.length; k += batchSize) {
    const chunk = graphs.slice(k, k + batchSize);
    const batch = packBatch(chunk);
    const loss = tf.tidy(() => mse(model, batch));
    total += loss.dataSync()[0] * chunk.length;
    loss.dispose();
    disposeBatch(batch);
  }
  return total / graphs.length;
}

export function train(
  records: RawRecord[],
  config: ModelConfig,
  log: (line: string) => void = () => {},
): TrainResult {
  const labeled = records.filter(
    (r) => r.qubits === config.qubits && r.label !== null,
  );
  if (labeled.length === 0) {
    throw new Error(`no labeled records for ${config.qubits} qubits`);
  }
  const graphs = labeled.map((r) => packGraph(r, config.wrapLabels));
  // hand-built corpora without split metadata train on everything
  const trainSet = graphs.filter((g) => g.split === "train" || g.split === "all");
  const valSet = graphs.filter((g) => g.split === "val");
  if (trainSet.length === 0) {
    throw new Error("no records in the train split");
  }

  const model = buildModel(config);
  const optimizer = tf.train.adam(config.lr);
  const random = rng(config.seed * 2654435761 + 1);
  const metrics: MetricsRow[] = [];

  const record = (epoch: number) => {
    const row: MetricsRow = {
      epoch,
      trainMse: evaluateMse(model, trainSet, config.batch),
      valMse: valSet.length > 0 ? evaluateMse(model, valSet, config.batch) : null,
    };
    metrics.push(row);
    return row;
  };

  const first = record(0);
  log(`epoch 0 train_mse ${first.trainMse.toFixed(6)}`);
  for (let epoch = 0; epoch < config.epochs; epoch++) {
    (optimizer as unknown as { learningRate: number }).learningRate = lrAt(
      epoch,
      config.lr,
      config.epochs,
    );
    const order = shuffled(trainSet, random);
    for (let k = 0; k < order.length; k += config.batch) {
      const batch = packBatch(order.slice(k, k + config.batch));
      optimizer.minimize(() => mse(model, batch), false, model.trainableVariables());
      disposeBatch(batch);
    }
    const row = record(epoch + 1);
    log(
      `epoch ${epoch + 1} train_mse ${row.trainMse.toFixed(6)}` +
        (row.valMse !== null ? ` val_mse ${row.valMse.toFixed(6)}` : ""),
    );
  }
  optimizer.dispose();

  const flagged = metrics[metrics.length - 1].trainMse >= metrics[0].trainMse;
  if (flagged) {
    log("flagged: final train MSE did not improve on the pre-training value");
  }
  return { model, metrics, flagged };
}

export function writeMetricsCsv(metrics: MetricsRow[], path: string): void {
  const lines = ["epoch,train_mse,val_mse"];
  for (const row of metrics) {
    const val = row.valMse === null ? "" : String(row.valMse);
    lines.push(`${row.epoch},${row.trainMse},${val}`);
  }
  fs.writeFileSync(path, lines.join("\n") + "\n");
}
