/**
 * Per-face feature extraction behind a pluggable interface.
 *
 * The default backbone is a frozen random projection: the face is
 * resized to a fixed grid, projected through a weight matrix drawn once
 * from a fixed seed, shifted, and rectified. It is deterministic,
 * dependency-free, and produces the contract width of 2048 features per
 * face; any stronger (e.g. pretrained CNN) extractor can be swapped in
 * by implementing the same interface, since downstream only the feature
 * width matters.
 */

import { GrayImage, resize } from "./image";
import { Rng } from "./rng";

export const FEATURES_PER_FACE = 2048;

// per-face feature norm after rectification; calibrated so the head's
// fixed learning-rate/momentum training neither diverges nor stalls
export const FACE_FEATURE_NORM = 0.5;

export interface Backbone {
  readonly name: string;
  readonly featureDim: number;
  extract(face: GrayImage): Float64Array;
}

export class FrozenProjectionBackbone implements Backbone {
  readonly name: string;
  readonly featureDim = FEATURES_PER_FACE;
  readonly inputSide: number;
  private readonly weights: Float64Array;
  private readonly bias: Float64Array;
  private readonly grayResponse: Float64Array;

  constructor(seed = 360360, inputSide = 32) {
    this.name = `frozen-projection-${seed}-${inputSide}`;
    this.inputSide = inputSide;
    const inputDim = inputSide * inputSide;
    const rng = new Rng(seed);
    this.weights = new Float64Array(this.featureDim * inputDim);
    const scale = 1 / Math.sqrt(inputDim);
    for (let i = 0; i < this.weights.length; i++) {
      this.weights[i] = rng.normal() * scale;
    }
    this.bias = new Float64Array(this.featureDim);
    for (let i = 0; i < this.featureDim; i++) {
      this.bias[i] = 0.05 * rng.normal();
    }
    // each row's response to a mid-gray image; subtracted so overall
    // brightness does not dominate every feature the same way
    this.grayResponse = new Float64Array(this.featureDim);
    for (let i = 0; i < this.featureDim; i++) {
      let acc = 0;
      for (let j = 0; j < inputDim; j++) acc += this.weights[i * inputDim + j];
      this.grayResponse[i] = 0.5 * acc;
    }
  }

  extract(face: GrayImage): Float64Array {
    const grid = face.width === this.inputSide && face.height === this.inputSide
      ? face
      : resize(face, this.inputSide);
    const inputDim = this.inputSide * this.inputSide;
    const out = new Float64Array(this.featureDim);
    let sumSq = 0;
    for (let i = 0; i < this.featureDim; i++) {
      let acc = this.bias[i] - this.grayResponse[i];
      const row = i * inputDim;
      for (let j = 0; j < inputDim; j++) {
        acc += this.weights[row + j] * grid.data[j];
      }
      const v = acc > 0 ? acc : 0;
      out[i] = v;
      sumSq += v * v;
    }
    // fixed per-face scale: keeps the head's fixed learning rate stable
    // regardless of image size or brightness
    if (sumSq > 1e-24) {
      const inv = FACE_FEATURE_NORM / Math.sqrt(sumSq);
      for (let i = 0; i < this.featureDim; i++) out[i] *= inv;
    }
    return out;
  }
}
