/**
 * Dataset access in the pipeline's JSON-lines formats.
 *
 * The estimator trains against ground-truth convergence files in the
 * prediction schema ({"video","frame","cvvp"}), which the pipeline's
 * cvvp-gt stage derives from label traces, and it writes its own
 * predictions in the same schema so they slot straight back in.
 *
 * A dataset directory holds, per video:
 *   gt_<video>.jsonl            ground-truth convergence values
 *   frames/<video>/NNNNNN.png   equirectangular frames, zero-padded ids
 */

import * as fs from "fs";
import * as path from "path";
import { GrayImage, loadPng } from "./image";
import { clampPrediction } from "./head";

export interface CvvpSeries {
  video: string;
  values: number[];
}

function parseLines(filePath: string): Array<Record<string, unknown>> {
  if (!fs.existsSync(filePath)) {
    throw new Error(`${filePath}: file does not exist`);
  }
  const out: Array<Record<string, unknown>> = [];
  const lines = fs.readFileSync(filePath, "utf-8").split("\n");
  lines.forEach((line, index) => {
    const trimmed = line.trim();
    if (!trimmed) return;
    let record: unknown;
    try {
      record = JSON.parse(trimmed);
    } catch (err) {
      throw new Error(`${filePath}:${index + 1}: invalid JSON`);
    }
    if (typeof record !== "object" || record === null) {
      throw new Error(`${filePath}:${index + 1}: record is not an object`);
    }
    out.push(record as Record<string, unknown>);
  });
  if (out.length === 0) throw new Error(`${filePath}: no records`);
  return out;
}

/** Read a cvvp file (ground truth or predictions): contiguous frames, (0,1]. */
export function loadCvvp(filePath: string): CvvpSeries {
  const records = parseLines(filePath);
  let video: string | null = null;
  const byFrame = new Map<number, number>();
  for (const rec of records) {
    if (!("frame" in rec)) {
      if (typeof rec.video === "string") video = rec.video;
      continue; // header
    }
    const frame = rec.frame;
    const value = rec.cvvp;
    if (typeof frame !== "number" || !Number.isInteger(frame) || frame < 0) {
      throw new Error(`${filePath}: bad frame id ${String(frame)}`);
    }
    if (typeof value !== "number" || !(value > 0 && value <= 1)) {
      throw new Error(`${filePath}: cvvp ${String(value)} outside (0, 1]`);
    }
    if (typeof rec.video === "string") {
      if (video === null) video = rec.video;
      else if (video !== rec.video) {
        throw new Error(`${filePath}: multiple videos in one file`);
      }
    }
    if (byFrame.has(frame)) throw new Error(`${filePath}: duplicate frame ${frame}`);
    byFrame.set(frame, value);
  }
  if (video === null) throw new Error(`${filePath}: no video id`);
  const values: number[] = [];
  for (let i = 0; i < byFrame.size; i++) {
    const v = byFrame.get(i);
    if (v === undefined) {
      throw new Error(`${filePath}: frames not contiguous (missing ${i})`);
    }
    values.push(v);
  }
  return { video, values };
}

/** Write predictions, clamping each raw value into (0, 1]. */
export function savePredictions(video: string, rawValues: number[],
                                filePath: string): void {
  const lines = [JSON.stringify({ video })];
  rawValues.forEach((raw, frame) => {
    lines.push(JSON.stringify({ video, frame, cvvp: clampPrediction(raw) }));
  });
  fs.writeFileSync(filePath, lines.join("\n") + "\n");
}

export interface LabelInfo {
  video: string;
  fps: number;
  frameCount: number;
  viewerCount: number;
}

/** Minimal label-file read: identity, fps and coverage only. */
export function loadLabelInfo(filePath: string): LabelInfo {
  const records = parseLines(filePath);
  let video: string | null = null;
  let fps = 30;
  const frames = new Set<number>();
  const viewers = new Set<string>();
  for (const rec of records) {
    if (!("frame" in rec)) {
      if (typeof rec.fps === "number") fps = rec.fps;
      if (typeof rec.video === "string") video = rec.video;
      continue;
    }
    if (typeof rec.video === "string" && video === null) video = rec.video;
    if (typeof rec.frame === "number") frames.add(rec.frame);
    if (rec.viewer !== undefined) viewers.add(String(rec.viewer));
  }
  if (video === null) throw new Error(`${filePath}: no video id`);
  return { video, fps, frameCount: frames.size, viewerCount: viewers.size };
}

export interface VideoData {
  video: string;
  truth: number[];
  frames: GrayImage[];
}

export function frameDir(datasetDir: string, video: string): string {
  return path.join(datasetDir, "frames", video);
}

export function framePath(datasetDir: string, video: string, frame: number): string {
  return path.join(frameDir(datasetDir, video), `${String(frame).padStart(6, "0")}.png`);
}

export function listVideos(datasetDir: string): string[] {
  return fs.readdirSync(datasetDir)
    .filter((name) => name.startsWith("gt_") && name.endsWith(".jsonl"))
    .map((name) => name.slice(3, -6))
    .sort();
}

export function loadVideo(datasetDir: string, video: string): VideoData {
  const truth = loadCvvp(path.join(datasetDir, `gt_${video}.jsonl`));
  if (truth.video !== video) {
    throw new Error(`gt_${video}.jsonl declares video ${truth.video}`);
  }
  const frames: GrayImage[] = [];
  for (let i = 0; i < truth.values.length; i++) {
    frames.push(loadPng(framePath(datasetDir, video, i)));
  }
  return { video, truth: truth.values, frames };
}
