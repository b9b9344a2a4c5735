#!/usr/bin/env node
/**
 * CLI: synthesize demo datasets, train under a scheme, export
 * predictions in the pipeline's file schema.
 */

import * as fs from "fs";
import * as path from "path";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { framePath, listVideos, loadCvvp, loadVideo, savePredictions } from "./data";
import { CvvpEstimator } from "./estimator";
import { loadPng, savePng, synthFrame } from "./image";
import { FeaturizedVideo, SchemeKind, defaultScheme, trainScheme } from "./train";

function synthDataset(outDir: string, videos: number, seconds: number,
                      fps: number, width: number, seed: number): void {
  fs.mkdirSync(outDir, { recursive: true });
  for (let v = 0; v < videos; v++) {
    const video = `clip${v}`;
    const dir = path.join(outDir, "frames", video);
    fs.mkdirSync(dir, { recursive: true });
    const lines = [JSON.stringify({ video })];
    for (let frame = 0; frame < seconds * fps; frame++) {
      // convergence drifts slowly between 0.2 and 1.0; the frame's blob
      // sharpness tracks it so the value is learnable from pixels
      const phase = frame / fps + v * 31;
      const truth = 0.6 + 0.4 * Math.sin(phase * 0.5);
      const clamped = Math.min(1, Math.max(0.2, truth));
      const img = synthFrame(width, width / 2, clamped * 4 + v, seed + frame);
      savePng(img, framePath(outDir, video, frame));
      lines.push(JSON.stringify({ video, frame, cvvp: clamped }));
    }
    fs.writeFileSync(path.join(outDir, `gt_${video}.jsonl`),
                     lines.join("\n") + "\n");
    console.log(`wrote ${video}: ${seconds * fps} frames under ${outDir}`);
  }
}

function featurizeDataset(estimator: CvvpEstimator, dataDir: string,
                          videos: string[]): FeaturizedVideo[] {
  return videos.map((video) => {
    const data = loadVideo(dataDir, video);
    console.log(`featurizing ${video} (${data.frames.length} frames)`);
    return {
      video,
      examples: data.frames.map((frame, i) => ({
        features: estimator.features(frame),
        target: data.truth[i],
      })),
    };
  });
}

function cmdTrain(args: {
  data: string; holdout: string; scheme: string; model: string;
  epochs: number; fps: number; seed: number; stopAtMae?: number;
}): void {
  const videos = listVideos(args.data);
  if (!videos.includes(args.holdout)) {
    throw new Error(`holdout ${args.holdout} not in dataset (${videos})`);
  }
  const estimator = CvvpEstimator.create(args.seed + 1);
  const featurized = featurizeDataset(estimator, args.data, videos);
  const scheme = {
    ...defaultScheme(args.scheme as SchemeKind, args.fps, args.seed),
    epochs: args.epochs,
  };
  const result = trainScheme(featurized, args.holdout, scheme, estimator.head, {
    stopAtMae: args.stopAtMae,
    onEpoch: (stat) => {
      if (stat.epoch % 5 === 0 || stat.epoch === scheme.epochs - 1) {
        console.log(`epoch ${stat.epoch}: train mae ${stat.mae.toFixed(4)}`);
      }
    },
  });
  estimator.manifest = {
    ...estimator.manifest,
    scheme,
    trainedOn: result.trainedOn,
    tunedFrames: result.tunedFrames,
  };
  estimator.save(args.model);
  console.log(`model saved to ${args.model}`);
}

function cmdPredict(args: { data: string; video: string; model: string;
                            out: string }): void {
  const estimator = CvvpEstimator.load(args.model);
  const truthPath = path.join(args.data, `gt_${args.video}.jsonl`);
  let frameCount: number;
  if (fs.existsSync(truthPath)) {
    frameCount = loadCvvp(truthPath).values.length;
  } else {
    frameCount = fs.readdirSync(path.join(args.data, "frames", args.video))
      .filter((f) => f.endsWith(".png")).length;
  }
  const raw: number[] = [];
  for (let frame = 0; frame < frameCount; frame++) {
    raw.push(estimator.predictRaw(
      loadPng(framePath(args.data, args.video, frame))));
  }
  savePredictions(args.video, raw, args.out);
  console.log(`wrote ${frameCount} predictions to ${args.out}`);
}

function cmdDemo(workdir: string): void {
  const dataDir = path.join(workdir, "data");
  const modelDir = path.join(workdir, "model");
  const predPath = path.join(workdir, "pred_clip1.jsonl");
  synthDataset(dataDir, 2, 3, 4, 128, 0);
  cmdTrain({
    data: dataDir, holdout: "clip1", scheme: "tune-1sec", model: modelDir,
    epochs: 15, fps: 4, seed: 0, stopAtMae: 0.02,
  });
  cmdPredict({ data: dataDir, video: "clip1", model: modelDir, out: predPath });
  const pred = loadCvvp(predPath);
  const truth = loadCvvp(path.join(dataDir, "gt_clip1.jsonl"));
  let mae = 0;
  pred.values.forEach((v, i) => { mae += Math.abs(v - truth.values[i]); });
  console.log(`held-out mae: ${(mae / pred.values.length).toFixed(4)}`);

  // close the loop through the pipeline when it is installed: its
  // stabilize stage must accept the exported prediction file
  try {
    const { execFileSync } = require("child_process") as
      typeof import("child_process");
    const schedulePath = path.join(workdir, "schedule_clip1.jsonl");
    execFileSync("python3", ["-m", "cvvp360.cli", "stabilize",
                             "--cvvp", predPath, "--out", schedulePath,
                             "--fps", "4", "--t-min", "2", "--clip-len", "3"],
                 { stdio: "inherit" });
    console.log("pipeline stabilize accepted the exported predictions");
  } catch {
    console.log("pipeline not installed; skipped the stabilize cross-check");
  }
  console.log(`demo artifacts under ${workdir}`);
}

export function main(argv: string[]): void {
  yargs(argv)
    .command(
      "synth-dataset", "generate a synthetic frame/ground-truth dataset",
      (y) => y
        .option("out", { type: "string", demandOption: true })
        .option("videos", { type: "number", default: 2 })
        .option("seconds", { type: "number", default: 4 })
        .option("fps", { type: "number", default: 5 })
        .option("width", { type: "number", default: 128 })
        .option("seed", { type: "number", default: 0 }),
      (a) => synthDataset(a.out, a.videos, a.seconds, a.fps, a.width, a.seed),
    )
    .command(
      "train", "train under a scheme with one held-out video",
      (y) => y
        .option("data", { type: "string", demandOption: true })
        .option("holdout", { type: "string", demandOption: true })
        .option("scheme", {
          type: "string", default: "leave-one-out",
          choices: ["leave-one-out", "tune-1sec", "tune-3sec"],
        })
        .option("model", { type: "string", demandOption: true })
        .option("epochs", { type: "number", default: 100 })
        .option("fps", { type: "number", default: 30 })
        .option("seed", { type: "number", default: 0 })
        .option("stop-at-mae", { type: "number" }),
      (a) => cmdTrain({
        data: a.data, holdout: a.holdout, scheme: a.scheme, model: a.model,
        epochs: a.epochs, fps: a.fps, seed: a.seed, stopAtMae: a.stopAtMae,
      }),
    )
    .command(
      "predict", "export predictions for a video in the pipeline schema",
      (y) => y
        .option("data", { type: "string", demandOption: true })
        .option("video", { type: "string", demandOption: true })
        .option("model", { type: "string", demandOption: true })
        .option("out", { type: "string", demandOption: true }),
      (a) => cmdPredict({ data: a.data, video: a.video, model: a.model,
                          out: a.out }),
    )
    .command(
      "demo", "synthesize, train, predict, and report held-out error",
      (y) => y.option("workdir", { type: "string", default: ".demo" }),
      (a) => cmdDemo(a.workdir),
    )
    .demandCommand(1)
    .strict()
    .parseSync();
}

if (require.main === module) {
  main(hideBin(process.argv));
}
