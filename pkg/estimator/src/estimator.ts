/**
 * The full estimator: featurizer plus regression head, with model
 * persistence (manifest.json + weights.bin in a model directory). The
 * manifest records the scheme, seed, and hyperparameters of the run
 * that produced the weights.
 */

import * as fs from "fs";
import * as path from "path";
import { FrozenProjectionBackbone } from "./backbone";
import { CONCAT_DIM, Featurizer } from "./features";
import { RegressionHead, clampPrediction } from "./head";
import { GrayImage } from "./image";
import { TrainScheme } from "./train";

export const HIDDEN_DIM = 2048;

export interface ModelManifest {
  scheme: TrainScheme | null;
  backbone: string;
  inputDim: number;
  hiddenDim: number;
  headSeed: number;
  trainedOn: string[];
  tunedFrames: number[];
}

export class CvvpEstimator {
  readonly featurizer: Featurizer;
  readonly head: RegressionHead;
  manifest: ModelManifest;

  constructor(featurizer: Featurizer, head: RegressionHead,
              manifest?: ModelManifest) {
    this.featurizer = featurizer;
    this.head = head;
    this.manifest = manifest ?? {
      scheme: null,
      backbone: featurizer.backbone.name,
      inputDim: head.inputDim,
      hiddenDim: head.hiddenDim,
      headSeed: head.seed,
      trainedOn: [],
      tunedFrames: [],
    };
  }

  static create(headSeed = 1): CvvpEstimator {
    const featurizer = new Featurizer(new FrozenProjectionBackbone());
    const head = new RegressionHead({
      inputDim: CONCAT_DIM, hiddenDim: HIDDEN_DIM, seed: headSeed,
    });
    return new CvvpEstimator(featurizer, head);
  }

  features(frame: GrayImage): Float64Array {
    return this.featurizer.featurize(frame).concatenated;
  }

  predictRaw(frame: GrayImage): number {
    return this.head.predictRaw(this.features(frame));
  }

  /** prediction in (0, 1], as the export schema requires */
  predict(frame: GrayImage): number {
    return clampPrediction(this.predictRaw(frame));
  }

  save(dir: string): void {
    fs.mkdirSync(dir, { recursive: true });
    fs.writeFileSync(path.join(dir, "manifest.json"),
                     JSON.stringify(this.manifest, null, 2) + "\n");
    fs.writeFileSync(path.join(dir, "weights.bin"),
                     this.head.serializeWeights());
  }

  static load(dir: string): CvvpEstimator {
    const manifest = JSON.parse(
      fs.readFileSync(path.join(dir, "manifest.json"), "utf-8"),
    ) as ModelManifest;
    const featurizer = new Featurizer(new FrozenProjectionBackbone());
    if (featurizer.backbone.name !== manifest.backbone) {
      throw new Error(
        `model was built with backbone ${manifest.backbone}, ` +
        `this build provides ${featurizer.backbone.name}`);
    }
    const head = new RegressionHead({
      inputDim: manifest.inputDim, hiddenDim: manifest.hiddenDim,
      seed: manifest.headSeed,
    });
    head.loadWeights(fs.readFileSync(path.join(dir, "weights.bin")));
    return new CvvpEstimator(featurizer, head, manifest);
  }
}
