/**
 * Frame featurization: six cubemap views, one feature vector per view,
 * concatenated in the fixed face order (front, back, left, right, up,
 * down) into a single input vector for the regression head.
 */

import { Backbone, FEATURES_PER_FACE, FrozenProjectionBackbone } from "./backbone";
import { CubemapFaces, FACE_ORDER, equirectToCubemap } from "./cubemap";
import { GrayImage } from "./image";

export const CONCAT_DIM = 6 * FEATURES_PER_FACE; // 12288

export interface FrameFeatures {
  perFace: Record<string, Float64Array>;
  concatenated: Float64Array;
}

export class Featurizer {
  readonly backbone: Backbone;
  readonly faceSize: number;

  constructor(backbone?: Backbone, faceSize = 32) {
    this.backbone = backbone ?? new FrozenProjectionBackbone();
    this.faceSize = faceSize;
  }

  fromCubemap(faces: CubemapFaces): FrameFeatures {
    const perFace: Record<string, Float64Array> = {};
    const concatenated = new Float64Array(6 * this.backbone.featureDim);
    FACE_ORDER.forEach((name, index) => {
      const features = this.backbone.extract(faces[name]);
      perFace[name] = features;
      concatenated.set(features, index * this.backbone.featureDim);
    });
    return { perFace, concatenated };
  }

  featurize(frame: GrayImage): FrameFeatures {
    return this.fromCubemap(equirectToCubemap(frame, this.faceSize));
  }
}
