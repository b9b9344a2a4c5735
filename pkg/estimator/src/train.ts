/**
 * Training schemes over featurized videos.
 *
 * leave-one-out: train on every video except the held-out one.
 * tune-1sec / tune-3sec: additionally fine-tune the held-out model on 1
 * or 3 randomly chosen seconds (contiguous fps-frame windows, seeded) of
 * the held-out video's ground truth.
 */

import { DEFAULT_SGD, RegressionHead, SgdConfig } from "./head";
import { Rng } from "./rng";

export type SchemeKind = "leave-one-out" | "tune-1sec" | "tune-3sec";

export interface TrainScheme {
  kind: SchemeKind;
  learningRate: number;
  momentum: number;
  epochs: number;
  fps: number;
  seed: number;
}

export function defaultScheme(kind: SchemeKind, fps: number, seed = 0): TrainScheme {
  return { kind, learningRate: 0.001, momentum: 0.9, epochs: 100, fps, seed };
}

export interface Example {
  features: Float64Array;
  target: number;
}

export interface FeaturizedVideo {
  video: string;
  examples: Example[];
}

export interface EpochStat {
  epoch: number;
  mae: number;
}

export interface TrainOptions {
  /** stop once the post-epoch training MAE drops below this */
  stopAtMae?: number;
  onEpoch?: (stat: EpochStat) => void;
}

function evaluateMae(head: RegressionHead, examples: Example[]): number {
  let total = 0;
  for (const ex of examples) {
    total += Math.abs(head.predictRaw(ex.features) - ex.target);
  }
  return total / examples.length;
}

/**
 * Epochs of per-example SGD over a seeded shuffle; returns per-epoch
 * training MAE (measured after the epoch's updates).
 */
export function fitHead(head: RegressionHead, examples: Example[],
                        epochs: number, sgd: SgdConfig, rng: Rng,
                        options: TrainOptions = {}): EpochStat[] {
  if (examples.length === 0) throw new Error("no training examples");
  const stats: EpochStat[] = [];
  const order = examples.map((_, i) => i);
  for (let epoch = 0; epoch < epochs; epoch++) {
    rng.shuffle(order);
    for (const index of order) {
      head.trainStep(examples[index].features, examples[index].target, sgd);
    }
    const stat = { epoch, mae: evaluateMae(head, examples) };
    stats.push(stat);
    options.onEpoch?.(stat);
    if (options.stopAtMae !== undefined && stat.mae < options.stopAtMae) break;
  }
  return stats;
}

/**
 * The tuning windows: `count` distinct contiguous fps-frame blocks of
 * the held-out video, chosen by seeded draw. Returns frame indices.
 */
export function selectTuningFrames(frameCount: number, fps: number,
                                   count: number, rng: Rng): number[] {
  const fullSeconds = Math.floor(frameCount / fps);
  if (fullSeconds < count) {
    throw new Error(
      `video has ${fullSeconds} full seconds, cannot pick ${count} windows`);
  }
  const seconds: number[] = [];
  const available = Array.from({ length: fullSeconds }, (_, i) => i);
  for (let pick = 0; pick < count; pick++) {
    const index = rng.int(available.length);
    seconds.push(available[index]);
    available.splice(index, 1);
  }
  seconds.sort((a, b) => a - b);
  const frames: number[] = [];
  for (const second of seconds) {
    for (let f = second * fps; f < (second + 1) * fps; f++) frames.push(f);
  }
  return frames;
}

export interface TrainResult {
  head: RegressionHead;
  baseStats: EpochStat[];
  tuneStats: EpochStat[];
  tunedFrames: number[];
  trainedOn: string[];
}

/** Run one scheme for one held-out video. */
export function trainScheme(videos: FeaturizedVideo[], holdout: string,
                            scheme: TrainScheme, head: RegressionHead,
                            options: TrainOptions = {}): TrainResult {
  const trainVideos = videos.filter((v) => v.video !== holdout);
  const heldOut = videos.find((v) => v.video === holdout);
  if (trainVideos.length === 0) {
    throw new Error("leave-one-out needs at least one other video");
  }
  const sgd: SgdConfig = {
    learningRate: scheme.learningRate, momentum: scheme.momentum,
  };
  const rng = new Rng(scheme.seed);
  const pool = trainVideos.flatMap((v) => v.examples);
  const baseStats = fitHead(head, pool, scheme.epochs, sgd, rng, options);

  let tuneStats: EpochStat[] = [];
  let tunedFrames: number[] = [];
  if (scheme.kind !== "leave-one-out") {
    if (!heldOut) throw new Error(`held-out video ${holdout} not in dataset`);
    const windows = scheme.kind === "tune-1sec" ? 1 : 3;
    tunedFrames = selectTuningFrames(heldOut.examples.length, scheme.fps,
                                     windows, rng);
    const tuneExamples = tunedFrames.map((f) => heldOut.examples[f]);
    tuneStats = fitHead(head, tuneExamples, scheme.epochs, sgd, rng, options);
  }
  return {
    head, baseStats, tuneStats, tunedFrames,
    trainedOn: trainVideos.map((v) => v.video),
  };
}
