/**
 * Equirectangular-to-cubemap resampling, matching the conventions the
 * pipeline documents in docs/formats.md: yaw 0 / pitch 0 at the image
 * center, yaw increasing rightward, half-texel sampling, and six
 * 90-degree faces named front, back, left, right, up, down.
 */

import { GrayImage, assertEquirect } from "./image";

export const FACE_ORDER = [
  "front",
  "back",
  "left",
  "right",
  "up",
  "down",
] as const;

export type FaceName = (typeof FACE_ORDER)[number];

const FACE_CENTERS: Record<FaceName, [number, number]> = {
  front: [0, 0],
  back: [180, 0],
  left: [-90, 0],
  right: [90, 0],
  up: [0, 90],
  down: [0, -90],
};

export type CubemapFaces = Record<FaceName, GrayImage>;

function sampleBilinear(img: GrayImage, yawDeg: number, pitchDeg: number): number {
  const x = ((yawDeg + 180) / 360) * img.width - 0.5;
  const y = ((90 - pitchDeg) / 180) * img.height - 0.5;
  const x0 = Math.floor(x);
  const y0 = Math.floor(y);
  const fx = x - x0;
  const fy = y - y0;
  const w = img.width;
  const c0 = ((x0 % w) + w) % w;
  const c1 = ((x0 + 1) % w + w) % w;
  const r0 = Math.min(Math.max(y0, 0), img.height - 1);
  const r1 = Math.min(Math.max(y0 + 1, 0), img.height - 1);
  const top = img.data[r0 * w + c0] * (1 - fx) + img.data[r0 * w + c1] * fx;
  const bot = img.data[r1 * w + c0] * (1 - fx) + img.data[r1 * w + c1] * fx;
  return top * (1 - fy) + bot * fy;
}

function projectFace(frame: GrayImage, yawDeg: number, pitchDeg: number,
                     size: number): GrayImage {
  const yaw = (yawDeg * Math.PI) / 180;
  const pitch = (pitchDeg * Math.PI) / 180;
  const cy = Math.cos(yaw);
  const sy = Math.sin(yaw);
  const cp = Math.cos(pitch);
  const sp = Math.sin(pitch);
  const fwd = [cp * cy, cp * sy, sp];
  const right = [-sy, cy, 0];
  const up = [-sp * cy, -sp * sy, cp];

  const data = new Float64Array(size * size);
  for (let row = 0; row < size; row++) {
    const b = ((row + 0.5) / size) * 2 - 1;
    for (let col = 0; col < size; col++) {
      const a = ((col + 0.5) / size) * 2 - 1;
      const rx = fwd[0] + a * right[0] - b * up[0];
      const ry = fwd[1] + a * right[1] - b * up[1];
      const rz = fwd[2] + a * right[2] - b * up[2];
      const norm = Math.sqrt(rx * rx + ry * ry + rz * rz);
      const sampleYaw = (Math.atan2(ry, rx) * 180) / Math.PI;
      const sz = Math.min(1, Math.max(-1, rz / norm));
      const samplePitch = (Math.asin(sz) * 180) / Math.PI;
      data[row * size + col] = sampleBilinear(frame, sampleYaw, samplePitch);
    }
  }
  return { width: size, height: size, data };
}

export function equirectToCubemap(frame: GrayImage, faceSize: number): CubemapFaces {
  assertEquirect(frame);
  if (faceSize < 1) throw new Error("faceSize must be >= 1");
  const faces = {} as CubemapFaces;
  for (const name of FACE_ORDER) {
    const [yaw, pitch] = FACE_CENTERS[name];
    faces[name] = projectFace(frame, yaw, pitch, faceSize);
  }
  return faces;
}
