#!/usr/bin/env node
/**
 * Command line: `gnn-trainer train` fits one model per qubit count on a
 * labeled graph dataset; `gnn-trainer predict` writes warm-start angle
 * predictions for a checkpoint. Exit code 0 on success, 1 on any error.
 */

import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { RawRecord, bySplit, forQubits, loadDataset, packGraph } from "./data.js";
import { defaultConfig, loadCheckpoint, saveCheckpoint } from "./model.js";
import { train, writeMetricsCsv } from "./train.js";
import { predict, writePredictions } from "./predict.js";

function usage(): string {
  return [
    "usage:",
    "  gnn-trainer train --data graphs.jsonl --qubits 4 --out model.json",
    "      [--metrics metrics.csv] [--epochs 50] [--lr 0.005] [--batch 32]",
    "      [--hidden 64] [--blocks 3] [--seed 0] [--wrap-labels]",
    "  gnn-trainer predict --model model.json --data graphs.jsonl --out preds.jsonl",
    "      [--split test]",
  ].join("\n");
}

function need(values: Record<string, unknown>, name: string): string {
  const v = values[name];
  if (v === undefined) throw new Error(`--${name} is required\n${usage()}`);
  return String(v);
}

function intOf(values: Record<string, unknown>, name: string, fallback: number): number {
  const v = values[name];
  if (v === undefined) return fallback;
  const parsed = Number(v);
  if (!Number.isInteger(parsed)) throw new Error(`--${name} must be an integer`);
  return parsed;
}

function cmdTrain(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      data: { type: "string" },
      qubits: { type: "string" },
      out: { type: "string" },
      metrics: { type: "string" },
      epochs: { type: "string" },
      lr: { type: "string" },
      batch: { type: "string" },
      hidden: { type: "string" },
      blocks: { type: "string" },
      seed: { type: "string" },
      "wrap-labels": { type: "boolean" },
    },
  });
  const qubits = intOf(values, "qubits", NaN);
  if (!Number.isInteger(qubits)) throw new Error(`--qubits is required\n${usage()}`);
  const config = defaultConfig(qubits, intOf(values, "seed", 0));
  config.epochs = intOf(values, "epochs", config.epochs);
  config.batch = intOf(values, "batch", config.batch);
  config.hidden = intOf(values, "hidden", config.hidden);
  config.blocks = intOf(values, "blocks", config.blocks);
  if (values.lr !== undefined) config.lr = Number(values.lr);
  config.wrapLabels = values["wrap-labels"] === true;

  const records = loadDataset(need(values, "data"));
  const { model, metrics, flagged } = train(records, config, console.log);
  saveCheckpoint(model, need(values, "out"));
  if (values.metrics !== undefined) {
    writeMetricsCsv(metrics, String(values.metrics));
  }
  console.log(
    `saved checkpoint for ${qubits} qubits after ${config.epochs} epochs` +
      (flagged ? " (flagged)" : ""),
  );
  model.dispose();
  return 0;
}

function cmdPredict(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      model: { type: "string" },
      data: { type: "string" },
      out: { type: "string" },
      split: { type: "string" },
    },
  });
  const model = loadCheckpoint(need(values, "model"));
  let records: RawRecord[] = forQubits(
    loadDataset(need(values, "data")),
    model.config.qubits,
  );
  if (values.split !== undefined && values.split !== "all") {
    const wanted = String(values.split);
    records = records.filter(
      (r) => packGraph(r).split === wanted,
    );
  }
  if (records.length === 0) throw new Error("no records to predict");
  const { predictions, meanMs } = predict(model, records);
  writePredictions(predictions, need(values, "out"));
  console.log(
    `wrote ${predictions.length} predictions; mean inference ${meanMs.toFixed(3)} ms/sample`,
  );
  model.dispose();
  return 0;
}

export function main(argv: string[]): number {
  try {
    const [command, ...rest] = argv;
    if (command === "train") return cmdTrain(rest);
    if (command === "predict") return cmdPredict(rest);
    throw new Error(`unknown command ${command ?? "(none)"}\n${usage()}`);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
