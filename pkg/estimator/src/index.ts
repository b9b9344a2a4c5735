export { Backbone, FEATURES_PER_FACE, FrozenProjectionBackbone } from "./backbone";
export { CubemapFaces, FACE_ORDER, FaceName, equirectToCubemap } from "./cubemap";
export { CvvpSeries, LabelInfo, loadCvvp, loadLabelInfo, loadVideo,
         savePredictions } from "./data";
export { CvvpEstimator, HIDDEN_DIM, ModelManifest } from "./estimator";
export { CONCAT_DIM, Featurizer, FrameFeatures } from "./features";
export { DEFAULT_SGD, RegressionHead, SgdConfig, clampPrediction } from "./head";
export { GrayImage, loadPng, resize, savePng, synthFrame } from "./image";
export { Rng } from "./rng";
export { EpochStat, Example, FeaturizedVideo, SchemeKind, TrainScheme,
         defaultScheme, fitHead, selectTuningFrames, trainScheme } from "./train";
