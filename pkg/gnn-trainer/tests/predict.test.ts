import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { describe, expect, it } from "vitest";

import { buildModel, defaultConfig } from "../src/model.js";
import { predict, writePredictions } from "../src/predict.js";
import { toyCorpus } from "./fixtures.js";

const TWO_PI = 2 * Math.PI;

function smallModel(qubits: number, seed: number) {
  return buildModel({
    ...defaultConfig(qubits, seed),
    hidden: 8,
    blocks: 1,
  });
}

describe("predict", () => {
  it("returns one prediction per record in input order", () => {
    const records = toyCorpus(5, 1, 11);
    const shuffledIds = ["toy3", "toy0", "toy4", "toy1", "toy2"];
    const byId = new Map(records.map((r) => [r.id, r]));
    const input = shuffledIds.map((id) => byId.get(id)!);
    const model = smallModel(1, 0);
    const { predictions, meanMs } = predict(model, input);
    expect(predictions.map((p) => p.id)).toEqual(shuffledIds);
    expect(Number.isFinite(meanMs)).toBe(true);
    expect(meanMs).toBeGreaterThanOrEqual(0);
    model.dispose();
  });

  it("emits angle triples per qubit wrapped into [0, 2*pi)", () => {
    const records = toyCorpus(4, 2, 12);
    const model = smallModel(2, 1);
    const { predictions } = predict(model, records);
    for (const p of predictions) {
      expect(p.qubits).toBe(2);
      expect(p.params).toHaveLength(2);
      for (const row of p.params) {
        expect(row).toHaveLength(3);
        for (const angle of row) {
          expect(angle).toBeGreaterThanOrEqual(0);
          expect(angle).toBeLessThan(TWO_PI);
          expect(Number.isFinite(angle)).toBe(true);
        }
      }
    }
    model.dispose();
  });

  it("is deterministic for a fixed model", () => {
    const records = toyCorpus(3, 1, 13);
    const model = smallModel(1, 5);
    const a = predict(model, records).predictions;
    const b = predict(model, records).predictions;
    expect(a).toEqual(b);
    model.dispose();
  });

  it("rejects records whose size differs from the model's", () => {
    const records = toyCorpus(2, 2, 14);
    const model = smallModel(1, 0);
    expect(() => predict(model, records)).toThrow(/expects 1/);
    model.dispose();
  });

  it("round-trips predictions through the JSONL writer", () => {
    const records = toyCorpus(3, 1, 15);
    const model = smallModel(1, 2);
    const { predictions } = predict(model, records);
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "gnnpred-"));
    const file = path.join(dir, "predictions.jsonl");
    writePredictions(predictions, file);
    const lines = fs.readFileSync(file, "utf8").trimEnd().split("\n");
    expect(lines).toHaveLength(3);
    const parsed = lines.map((line) => JSON.parse(line));
    expect(parsed.map((p) => p.id)).toEqual(predictions.map((p) => p.id));
    for (let k = 0; k < parsed.length; k += 1) {
      expect(parsed[k].qubits).toBe(1);
      expect(parsed[k].params).toEqual(predictions[k].params);
    }
    fs.rmSync(dir, { recursive: true });
  });
});
