/**
 * Two-layer fully connected regression head: inputDim -> 2048 -> 1 with
 * ReLU after each layer, trained with mean absolute error under plain
 * SGD with momentum. Written directly on Float64Array so training is
 * deterministic and gradient checks are exact to float64 precision.
 *
 * The raw head output is the rectified final activation; clamping into
 * (0, 1] happens only when predictions are exported.
 */

import { Rng } from "./rng";

export interface HeadConfig {
  inputDim: number;
  hiddenDim: number;
  seed: number;
}

export interface SgdConfig {
  learningRate: number;
  momentum: number;
}

export const DEFAULT_SGD: SgdConfig = { learningRate: 0.001, momentum: 0.9 };

export class RegressionHead {
  readonly inputDim: number;
  readonly hiddenDim: number;
  readonly seed: number;
  w1: Float64Array; // hiddenDim x inputDim
  b1: Float64Array;
  w2: Float64Array; // hiddenDim
  b2: number;
  private v1: Float64Array | null = null;
  private vb1: Float64Array | null = null;
  private v2: Float64Array | null = null;
  private vb2 = 0;

  constructor(config: HeadConfig) {
    this.inputDim = config.inputDim;
    this.hiddenDim = config.hiddenDim;
    this.seed = config.seed;
    const rng = new Rng(config.seed);
    const scale1 = Math.sqrt(2 / config.inputDim);
    this.w1 = new Float64Array(config.hiddenDim * config.inputDim);
    for (let i = 0; i < this.w1.length; i++) this.w1[i] = rng.normal() * scale1;
    this.b1 = new Float64Array(config.hiddenDim);
    const scale2 = Math.sqrt(2 / config.hiddenDim);
    this.w2 = new Float64Array(config.hiddenDim);
    for (let i = 0; i < this.w2.length; i++) this.w2[i] = rng.normal() * scale2;
    this.b2 = 0.5; // start near the middle of the target range
  }

  /** hidden activations and the rectified scalar output */
  forward(x: Float64Array): { hidden: Float64Array; output: number } {
    if (x.length !== this.inputDim) {
      throw new Error(`input has ${x.length} features, expected ${this.inputDim}`);
    }
    const hidden = new Float64Array(this.hiddenDim);
    for (let i = 0; i < this.hiddenDim; i++) {
      let acc = this.b1[i];
      const row = i * this.inputDim;
      for (let j = 0; j < this.inputDim; j++) acc += this.w1[row + j] * x[j];
      hidden[i] = acc > 0 ? acc : 0;
    }
    let pre = this.b2;
    for (let i = 0; i < this.hiddenDim; i++) pre += this.w2[i] * hidden[i];
    return { hidden, output: pre > 0 ? pre : 0 };
  }

  predictRaw(x: Float64Array): number {
    return this.forward(x).output;
  }

  private subgradients(x: Float64Array, target: number,
                       reviveDeadOutput: boolean) {
    const { hidden, output } = this.forward(x);
    const loss = Math.abs(output - target);
    // subgradient of |output - target|; 0 at the kink
    let gOut = output > target ? 1 : output < target ? -1 : 0;
    if (output <= 0) {
      // a rectified-to-zero output has a true subgradient of 0, which
      // would freeze training forever; during optimization we use the
      // one-sided gradient at zero so the output can recover
      gOut = reviveDeadOutput && target > 0 ? -1 : 0;
    }
    const gW2 = new Float64Array(this.hiddenDim);
    const gHidden = new Float64Array(this.hiddenDim);
    for (let i = 0; i < this.hiddenDim; i++) {
      gW2[i] = gOut * hidden[i];
      gHidden[i] = hidden[i] > 0 ? gOut * this.w2[i] : 0;
    }
    return { loss, gOut, gW2, gHidden, hidden };
  }

  /**
   * Exact absolute-error subgradients for one example, without touching
   * the weights; matches finite differences away from kinks.
   */
  gradients(x: Float64Array, target: number) {
    return this.subgradients(x, target, false);
  }

  /** One SGD-with-momentum step on one example; returns the L1 loss. */
  trainStep(x: Float64Array, target: number, sgd: SgdConfig = DEFAULT_SGD): number {
    if (!this.v1) {
      this.v1 = new Float64Array(this.w1.length);
      this.vb1 = new Float64Array(this.b1.length);
      this.v2 = new Float64Array(this.w2.length);
      this.vb2 = 0;
    }
    const { loss, gOut, gW2, gHidden } = this.subgradients(x, target, true);
    const lr = sgd.learningRate;
    const mu = sgd.momentum;

    const v2 = this.v2!;
    for (let i = 0; i < this.hiddenDim; i++) {
      v2[i] = mu * v2[i] + gW2[i];
      this.w2[i] -= lr * v2[i];
    }
    this.vb2 = mu * this.vb2 + gOut;
    this.b2 -= lr * this.vb2;

    const v1 = this.v1!;
    const vb1 = this.vb1!;
    for (let i = 0; i < this.hiddenDim; i++) {
      const g = gHidden[i];
      vb1[i] = mu * vb1[i] + g;
      this.b1[i] -= lr * vb1[i];
      const row = i * this.inputDim;
      if (g === 0) {
        // momentum still decays even without a fresh gradient
        for (let j = 0; j < this.inputDim; j++) {
          v1[row + j] = mu * v1[row + j];
          this.w1[row + j] -= lr * v1[row + j];
        }
      } else {
        for (let j = 0; j < this.inputDim; j++) {
          v1[row + j] = mu * v1[row + j] + g * x[j];
          this.w1[row + j] -= lr * v1[row + j];
        }
      }
    }
    return loss;
  }

  /** deep copy, momentum buffers excluded (fine-tuning starts fresh) */
  clone(): RegressionHead {
    const copy = new RegressionHead({
      inputDim: this.inputDim, hiddenDim: this.hiddenDim, seed: this.seed,
    });
    copy.w1 = this.w1.slice();
    copy.b1 = this.b1.slice();
    copy.w2 = this.w2.slice();
    copy.b2 = this.b2;
    return copy;
  }

  serializeWeights(): Buffer {
    const total = this.w1.length + this.b1.length + this.w2.length + 1;
    const flat = new Float64Array(total);
    let offset = 0;
    for (const part of [this.w1, this.b1, this.w2]) {
      flat.set(part, offset);
      offset += part.length;
    }
    flat[offset] = this.b2;
    return Buffer.from(flat.buffer, 0, flat.byteLength);
  }

  loadWeights(buffer: Buffer): void {
    const expected = this.w1.length + this.b1.length + this.w2.length + 1;
    if (buffer.byteLength !== expected * 8) {
      throw new Error(
        `weight blob holds ${buffer.byteLength / 8} values, expected ${expected}`);
    }
    const flat = new Float64Array(buffer.buffer, buffer.byteOffset, expected);
    let offset = 0;
    this.w1.set(flat.subarray(offset, offset += this.w1.length));
    this.b1.set(flat.subarray(offset, offset += this.b1.length));
    this.w2.set(flat.subarray(offset, offset += this.w2.length));
    this.b2 = flat[offset];
    this.v1 = this.vb1 = this.v2 = null;
    this.vb2 = 0;
  }
}

/** export-time clamp into (0, 1] with a small positive floor */
export function clampPrediction(raw: number, floor = 1e-6): number {
  return Math.min(1, Math.max(floor, raw));
}
