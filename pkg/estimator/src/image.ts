/**
 * Grayscale image container plus PNG I/O and a synthetic-frame
 * generator. Frames are equirectangular (width = 2 x height); pixel
 * values live in [0, 1] as float64.
 */

import * as fs from "fs";
import { PNG } from "pngjs";
import { Rng } from "./rng";

export interface GrayImage {
  width: number;
  height: number;
  /** row-major, length width*height, values in [0, 1] */
  data: Float64Array;
}

export function assertEquirect(img: GrayImage): void {
  if (img.width !== 2 * img.height) {
    throw new Error(
      `equirectangular frame must be 2:1, got ${img.width}x${img.height}`,
    );
  }
}

export function loadPng(path: string): GrayImage {
  const png = PNG.sync.read(fs.readFileSync(path));
  const data = new Float64Array(png.width * png.height);
  for (let i = 0; i < data.length; i++) {
    const r = png.data[4 * i];
    const g = png.data[4 * i + 1];
    const b = png.data[4 * i + 2];
    data[i] = (0.299 * r + 0.587 * g + 0.114 * b) / 255;
  }
  return { width: png.width, height: png.height, data };
}

export function savePng(img: GrayImage, path: string): void {
  const png = new PNG({ width: img.width, height: img.height });
  for (let i = 0; i < img.data.length; i++) {
    const v = Math.round(Math.min(1, Math.max(0, img.data[i])) * 255);
    png.data[4 * i] = v;
    png.data[4 * i + 1] = v;
    png.data[4 * i + 2] = v;
    png.data[4 * i + 3] = 255;
  }
  fs.writeFileSync(path, PNG.sync.write(png));
}

/**
 * Synthetic equirectangular frame: smooth direction-dependent bands
 * plus a bright blob whose center moves with the phase parameter, so
 * consecutive frames differ in a controlled way.
 */
export function synthFrame(
  width: number,
  height: number,
  phase: number,
  seed = 0,
): GrayImage {
  const rng = new Rng(seed * 7919 + 1);
  const blobYaw = -Math.PI + ((phase * 0.7) % 2) * Math.PI;
  const blobPitch = 0.6 * Math.sin(phase * 1.3);
  const jitter = 0.05 * rng.normal();
  const data = new Float64Array(width * height);
  for (let row = 0; row < height; row++) {
    const pitch = Math.PI / 2 - ((row + 0.5) / height) * Math.PI;
    for (let col = 0; col < width; col++) {
      const yaw = ((col + 0.5) / width) * 2 * Math.PI - Math.PI;
      const bands =
        0.35 + 0.15 * Math.sin(3 * yaw + phase) * Math.cos(2 * pitch);
      let dyaw = Math.abs(yaw - blobYaw);
      if (dyaw > Math.PI) dyaw = 2 * Math.PI - dyaw;
      const dist2 = dyaw * dyaw + (pitch - blobPitch) ** 2;
      const blob = 0.6 * Math.exp(-dist2 / (0.08 + Math.abs(jitter)));
      data[row * width + col] = Math.min(1, bands + blob);
    }
  }
  return { width, height, data };
}

/** bilinear resize to a square side x side image */
export function resize(img: GrayImage, side: number): GrayImage {
  const out = new Float64Array(side * side);
  for (let row = 0; row < side; row++) {
    const y = ((row + 0.5) / side) * img.height - 0.5;
    const y0 = Math.floor(y);
    const fy = y - y0;
    const r0 = Math.min(Math.max(y0, 0), img.height - 1);
    const r1 = Math.min(Math.max(y0 + 1, 0), img.height - 1);
    for (let col = 0; col < side; col++) {
      const x = ((col + 0.5) / side) * img.width - 0.5;
      const x0 = Math.floor(x);
      const fx = x - x0;
      const c0 = Math.min(Math.max(x0, 0), img.width - 1);
      const c1 = Math.min(Math.max(x0 + 1, 0), img.width - 1);
      const top =
        img.data[r0 * img.width + c0] * (1 - fx) +
        img.data[r0 * img.width + c1] * fx;
      const bot =
        img.data[r1 * img.width + c0] * (1 - fx) +
        img.data[r1 * img.width + c1] * fx;
      out[row * side + col] = top * (1 - fy) + bot * fy;
    }
  }
  return { width: side, height: side, data: out };
}
