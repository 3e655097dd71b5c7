/**
 * Signed directed graph regression model.
 *
 * Stack: three message-passing blocks, one graph-attention layer, global
 * mean pooling, linear readout of width 3q. Each block aggregates incoming
 * and outgoing messages with separate parameter sets,
 *
 *   x_i' = LN(relu(W_self x_i + sum_j sIn[i][j] W_in x_j + E_in[i] W_eIn
 *                             + sum_j sOut[i][j] W_out x_j + E_out[i] W_eOut + b))
 *
 * where the sIn/sOut/E operators already carry the sign-aware degree scaling
 * computed in data.ts, so negative edges push messages with opposite sign.
 * The attention layer scores every edge-connected pair (plus self-loops),
 * softmax-normalizes per node and mixes the projected features.
 *
 * Exact layer sizes (hidden 64, 3 blocks) are defaults, not tuned claims.
 */

import * as fs from "node:fs";

import * as tf from "@tensorflow/tfjs";

import { PackedGraph } from "./data.js";

export interface ModelConfig {
  qubits: number;
  hidden: number;
  blocks: number;
  epochs: number;
  lr: number;
  batch: number;
  seed: number;
  wrapLabels: boolean;
}

export function defaultConfig(qubits: number, seed = 0): ModelConfig {
  return {
    qubits,
    hidden: 64,
    blocks: 3,
    epochs: 50,
    lr: 0.005,
    batch: 32,
    seed,
    wrapLabels: false,
  };
}

export interface Batch {
  x: tf.Tensor3D; // [B, n, 2]
  sIn: tf.Tensor3D; // [B, n, n]
  sOut: tf.Tensor3D; // [B, n, n]
  eIn: tf.Tensor3D; // [B, n, 3]
  eOut: tf.Tensor3D; // [B, n, 3]
  attMask: tf.Tensor3D; // [B, n, n]
  labels: tf.Tensor2D | null; // [B, 3q]
}

export function packBatch(graphs: PackedGraph[]): Batch {
  const b = graphs.length;
  if (b === 0) throw new Error("empty batch");
  const n = graphs[0].n;
  const q = graphs[0].qubits;
  for (const g of graphs) {
    if (g.n !== n) throw new Error(`mixed node counts in batch: ${g.n} vs ${n}`);
  }
  const cat = (
    field: (g: PackedGraph) => Float32Array,
    width: number,
  ): Float32Array => {
    const out = new Float32Array(b * width);
    graphs.forEach((g, k) => out.set(field(g), k * width));
    return out;
  };
  const labeled = graphs.every((g) => g.label !== null);
  return {
    x: tf.tensor3d(cat((g) => g.x, n * 2), [b, n, 2]),
    sIn: tf.tensor3d(cat((g) => g.sIn, n * n), [b, n, n]),
    sOut: tf.tensor3d(cat((g) => g.sOut, n * n), [b, n, n]),
    eIn: tf.tensor3d(cat((g) => g.eIn, n * 3), [b, n, 3]),
    eOut: tf.tensor3d(cat((g) => g.eOut, n * 3), [b, n, 3]),
    attMask: tf.tensor3d(cat((g) => g.attMask, n * n), [b, n, n]),
    labels: labeled
      ? tf.tensor2d(cat((g) => g.label as Float32Array, 3 * q), [b, 3 * q])
      : null,
  };
}

export function disposeBatch(batch: Batch): void {
  batch.x.dispose();
  batch.sIn.dispose();
  batch.sOut.dispose();
  batch.eIn.dispose();
  batch.eOut.dispose();
  batch.attMask.dispose();
  batch.labels?.dispose();
}

/** y = x @ w for x [B, n, f] and w [f, h], via a flat 2-D matmul. */
function mix(x: tf.Tensor3D, w: tf.Tensor2D): tf.Tensor3D {
  const [b, n, f] = x.shape;
  return x
    .reshape([b * n, f])
    .matMul(w)
    .reshape([b, n, w.shape[1]]) as tf.Tensor3D;
}

function layerNorm(
  x: tf.Tensor3D,
  gain: tf.Tensor1D,
  shift: tf.Tensor1D,
): tf.Tensor3D {
  const { mean, variance } = tf.moments(x, -1, true);
  return x
    .sub(mean)
    .div(variance.add(1e-5).sqrt())
    .mul(gain)
    .add(shift) as tf.Tensor3D;
}

export class SignedGraphModel {
  readonly config: ModelConfig;
  readonly variables: Map<string, tf.Variable> = new Map();

  constructor(config: ModelConfig) {
    if (config.qubits < 1) throw new Error("qubits must be >= 1");
    if (config.hidden < 1 || config.blocks < 1) {
      throw new Error("hidden and blocks must be >= 1");
    }
    this.config = config;
  }

  private addVariable(name: string, tensor: tf.Tensor): tf.Variable {
    // Names are kept in this map only; the engine assigns its own unique ids
    // so several models can coexist in one process.
    const v = tf.variable(tensor, true);
    this.variables.set(name, v);
    return v;
  }

  /** Seeded Xavier-normal weights; call exactly once. */
  initialize(): void {
    if (this.variables.size > 0) throw new Error("model already initialized");
    const { hidden, blocks, qubits, seed } = this.config;
    let k = 0;
    const normal = (shape: number[], fanIn: number, fanOut: number) => {
      k += 1;
      const std = Math.sqrt(2.0 / (fanIn + fanOut));
      return tf.randomNormal(shape, 0, std, "float32", seed * 7919 + k);
    };
    for (let b = 0; b < blocks; b++) {
      const fin = b === 0 ? 2 : hidden;
      for (const name of ["self", "in", "out"]) {
        this.addVariable(`block${b}/w_${name}`, normal([fin, hidden], fin, hidden));
      }
      for (const name of ["ein", "eout"]) {
        this.addVariable(`block${b}/w_${name}`, normal([3, hidden], 3, hidden));
      }
      this.addVariable(`block${b}/bias`, tf.zeros([hidden]));
      this.addVariable(`block${b}/ln_gain`, tf.ones([hidden]));
      this.addVariable(`block${b}/ln_shift`, tf.zeros([hidden]));
    }
    this.addVariable("att/w", normal([hidden, hidden], hidden, hidden));
    this.addVariable("att/a_src", normal([hidden, 1], hidden, 1));
    this.addVariable("att/a_dst", normal([hidden, 1], hidden, 1));
    this.addVariable("att/bias", tf.zeros([hidden]));
    this.addVariable("att/ln_gain", tf.ones([hidden]));
    this.addVariable("att/ln_shift", tf.zeros([hidden]));
    this.addVariable("read/w", normal([hidden, 3 * qubits], hidden, 3 * qubits));
    this.addVariable("read/bias", tf.zeros([3 * qubits]));
  }

  private v(name: string): tf.Variable {
    const found = this.variables.get(name);
    if (!found) throw new Error(`missing variable ${name}`);
    return found;
  }

  /** Pooled readout, shape [B, 3q]. */
  forward(batch: Batch): tf.Tensor2D {
    return tf.tidy(() => {
      let h = batch.x as tf.Tensor3D;
      for (let b = 0; b < this.config.blocks; b++) {
        const messages = mix(h, this.v(`block${b}/w_self`) as tf.Tensor2D)
          .add(batch.sIn.matMul(mix(h, this.v(`block${b}/w_in`) as tf.Tensor2D)))
          .add(batch.sOut.matMul(mix(h, this.v(`block${b}/w_out`) as tf.Tensor2D)))
          .add(mix(batch.eIn, this.v(`block${b}/w_ein`) as tf.Tensor2D))
          .add(mix(batch.eOut, this.v(`block${b}/w_eout`) as tf.Tensor2D))
          .add(this.v(`block${b}/bias`));
        h = layerNorm(
          messages.relu() as tf.Tensor3D,
          this.v(`block${b}/ln_gain`) as tf.Tensor1D,
          this.v(`block${b}/ln_shift`) as tf.Tensor1D,
        );
      }

      const projected = mix(h, this.v("att/w") as tf.Tensor2D);
      const srcScore = mix(projected, this.v("att/a_src") as tf.Tensor2D);
      const dstScore = mix(projected, this.v("att/a_dst") as tf.Tensor2D);
      const scores = dstScore
        .add(srcScore.transpose([0, 2, 1]))
        .leakyRelu(0.2)
        .add(batch.attMask);
      const attended = tf
        .softmax(scores, -1)
        .matMul(projected)
        .add(this.v("att/bias"))
        .relu() as tf.Tensor3D;
      const normed = layerNorm(
        attended,
        this.v("att/ln_gain") as tf.Tensor1D,
        this.v("att/ln_shift") as tf.Tensor1D,
      );

      const pooled = normed.mean(1) as tf.Tensor2D;
      return pooled
        .matMul(this.v("read/w") as tf.Tensor2D)
        .add(this.v("read/bias")) as tf.Tensor2D;
    });
  }

  trainableVariables(): tf.Variable[] {
    return Array.from(this.variables.values());
  }

  restore(variables: Checkpoint["variables"]): void {
    if (this.variables.size > 0) throw new Error("model already initialized");
    for (const [name, { shape, data }] of Object.entries(variables)) {
      this.addVariable(name, tf.tensor(data, shape));
    }
  }

  dispose(): void {
    for (const v of this.variables.values()) v.dispose();
    this.variables.clear();
  }
}

export function buildModel(config: ModelConfig): SignedGraphModel {
  const model = new SignedGraphModel(config);
  model.initialize();
  return model;
}

export interface Checkpoint {
  version: string;
  config: ModelConfig;
  variables: Record<string, { shape: number[]; data: number[] }>;
}

export function saveCheckpoint(model: SignedGraphModel, path: string): void {
  const variables: Checkpoint["variables"] = {};
  for (const [name, v] of model.variables) {
    variables[name] = {
      shape: v.shape.slice(),
      data: Array.from(v.dataSync()),
    };
  }
  const payload: Checkpoint = { version: "0.1.0", config: model.config, variables };
  fs.writeFileSync(path, JSON.stringify(payload));
}

export function loadCheckpoint(path: string): SignedGraphModel {
  if (!fs.existsSync(path)) throw new Error(`no checkpoint at ${path}`);
  const payload = JSON.parse(fs.readFileSync(path, "utf8")) as Checkpoint;
  const model = new SignedGraphModel(payload.config);
  const readout = payload.variables["read/w"];
  if (!readout || readout.shape[1] !== 3 * payload.config.qubits) {
    throw new Error("checkpoint readout width does not match its qubit count");
  }
  model.restore(payload.variables);
  return model;
}
