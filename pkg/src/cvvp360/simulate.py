"""Trace-driven evaluation of mode-selection strategies.

Scores what viewers actually watch: per frame, a viewer in either auto
mode watches the algorithm trajectory direction, and a viewer in manual
mode watches their own labeled direction. The per-frame score is the
fraction of viewers whose watched direction is important to them, which
reduces to the overall-importance definition whenever all viewers watch
the same direction.

Three strategies are compared: enforced auto throughout, free weak/man
throughout (a seeded random toggle stands in for viewer behavior), and
the schedule-driven mix. With an all-ones schedule the mix degenerates
to the first strategy, with an all-zeros schedule and the same seed to
the second; both identities are exact and tested.

Per-video evaluations are independent; report aggregation is a plain
reduction. Fixed seeds give byte-identical reports.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .cvvp import ImportanceParams, cvvp_values, video_cvvp_series
from .decision import DecisionConfig, ViewMode, run_session
from .geometry import direction_to_unit_vector
from .stabilize import (ModeSchedule, NormalizedSeries, StabilizeParams,
                        normalize, per_second_average, stabilize_video)
from .traces import CvvpPredictionFile, LabelTraceSet, Trajectory, save_schedule

CDF_STEP = 0.01


class StrategyKind(Enum):
    AUTO_ENFORCED_ONLY = "AutoEnforcedOnly"
    WEAK_MAN_ONLY = "WeakManOnly"
    TRIPLE_VIEW = "TripleView"


@dataclass(frozen=True)
class StrategyConfig:
    kind: StrategyKind
    rng_seed: int = 0
    switch_prob_per_second: float = 0.05
    weak_man_start: ViewMode = ViewMode.AUTO_OPTIONAL
    manual_miss_prob: float = 0.0  # chance a manual viewer misses their view
    params: StabilizeParams = field(default_factory=StabilizeParams)

    def __post_init__(self):
        if not 0.0 <= self.switch_prob_per_second <= 1.0:
            raise ValueError("switch_prob_per_second outside [0, 1]")
        if not 0.0 <= self.manual_miss_prob <= 1.0:
            raise ValueError("manual_miss_prob outside [0, 1]")
        if self.weak_man_start is ViewMode.AUTO_ENFORCED:
            raise ValueError("weak/man start mode cannot be the enforced mode")


@dataclass(frozen=True)
class CvvpError:
    """Per-frame absolute error plus its mean and CDF (0.01 steps)."""

    errors: tuple
    mean: float
    cdf: tuple  # (threshold, fraction of frames with error <= threshold)


@dataclass(frozen=True)
class SimulationResult:
    video_id: str
    strategy: StrategyKind
    frame_importance: tuple
    mean_importance: float
    mode_traces: dict  # viewer -> tuple of ViewMode per second


def cvvp_error(pred: CvvpPredictionFile, truth_values) -> CvvpError:
    truth = list(truth_values)
    if len(truth) != pred.frame_count:
        raise ValueError(
            f"prediction covers {pred.frame_count} frames, truth {len(truth)}")
    errors = np.abs(np.asarray(pred.values) - np.asarray(truth))
    thresholds = np.arange(0.0, 1.0 + CDF_STEP / 2.0, CDF_STEP)
    cdf = tuple(
        (round(float(x), 2), float(np.mean(errors <= x))) for x in thresholds
    )
    return CvvpError(errors=tuple(float(e) for e in errors),
                     mean=float(np.mean(errors)), cdf=cdf)


def inference_accuracy(pred_schedule: ModeSchedule,
                       truth_schedule: ModeSchedule) -> float:
    """Fraction of seconds where the binarized schedules agree
    (both 1 or both 0)."""
    if pred_schedule.total_seconds != truth_schedule.total_seconds:
        raise ValueError(
            f"schedule lengths differ: {pred_schedule.total_seconds} "
            f"vs {truth_schedule.total_seconds}")
    agree = sum(a == b for a, b in zip(pred_schedule.values,
                                       truth_schedule.values))
    return agree / truth_schedule.total_seconds


def _viewer_rng(seed: int, viewer_index: int, stream: int = 0):
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(viewer_index, stream)))


def _weak_man_submodes(viewer_ids, total_seconds, strategy: StrategyConfig):
    """Seeded per-viewer random walk between manual and optional auto."""
    submodes = {}
    for idx, vid in enumerate(viewer_ids):
        rng = _viewer_rng(strategy.rng_seed, idx)
        draws = rng.random(total_seconds)
        mode = strategy.weak_man_start
        modes = [mode]
        for t in range(1, total_seconds):
            if draws[t] < strategy.switch_prob_per_second:
                mode = (ViewMode.MANUAL if mode is ViewMode.AUTO_OPTIONAL
                        else ViewMode.AUTO_OPTIONAL)
            modes.append(mode)
        submodes[vid] = tuple(modes)
    return submodes


def _mode_traces(labels: LabelTraceSet, strategy: StrategyConfig,
                 total_seconds, schedule, events, decision_config):
    kind = strategy.kind
    viewer_ids = labels.viewer_ids
    if kind is StrategyKind.AUTO_ENFORCED_ONLY:
        return {vid: (ViewMode.AUTO_ENFORCED,) * total_seconds
                for vid in viewer_ids}
    if kind is StrategyKind.WEAK_MAN_ONLY:
        return _weak_man_submodes(viewer_ids, total_seconds, strategy)

    if schedule is None:
        raise ValueError("the schedule-driven strategy requires a schedule")
    if schedule.total_seconds < total_seconds:
        raise ValueError(
            f"schedule covers {schedule.total_seconds} s but the video "
            f"spans {total_seconds} s")
    if events is not None:
        traces = run_session(schedule, events,
                             config=decision_config or DecisionConfig(),
                             viewers=viewer_ids)
        return {vid: traces[vid].modes[:total_seconds] for vid in viewer_ids}
    # no recorded requests: overlay enforcement on the same random
    # weak/man behavior model the baseline uses
    submodes = _weak_man_submodes(viewer_ids, total_seconds, strategy)
    bits = schedule.values
    return {
        vid: tuple(ViewMode.AUTO_ENFORCED if bits[t] == 1 else submodes[vid][t]
                   for t in range(total_seconds))
        for vid in viewer_ids
    }


def simulate_strategy(labels: LabelTraceSet, saliency: Trajectory,
                      strategy: StrategyConfig, schedule=None, events=None,
                      importance: ImportanceParams | None = None,
                      decision_config=None) -> SimulationResult:
    """Replay one strategy over a video and score watched directions."""
    importance = importance or ImportanceParams()
    if saliency.frame_count != labels.frame_count:
        raise ValueError(
            f"trajectory covers {saliency.frame_count} frames, labels "
            f"{labels.frame_count}")
    frame_count = labels.frame_count
    fps = labels.fps
    total_seconds = math.ceil(frame_count / fps)
    viewer_ids = labels.viewer_ids
    n = len(viewer_ids)

    traces = _mode_traces(labels, strategy, total_seconds, schedule, events,
                          decision_config)

    sal_vecs = np.array([direction_to_unit_vector(d) for d in saliency.directions])
    label_vecs = np.array(
        [[direction_to_unit_vector(labels.frames[i][vid]) for vid in viewer_ids]
         for i in range(frame_count)])
    # sal_hits[i, j]: is the trajectory direction important to viewer j
    sal_hits = np.einsum("ik,ijk->ij", sal_vecs, label_vecs) > importance.cos_th

    seconds = np.arange(frame_count) // fps
    auto_mask = np.empty((frame_count, n), dtype=bool)
    for j, vid in enumerate(viewer_ids):
        is_auto = np.array([m is not ViewMode.MANUAL for m in traces[vid]])
        auto_mask[:, j] = is_auto[seconds]

    manual_hits = np.ones((frame_count, n), dtype=bool)
    if strategy.manual_miss_prob > 0.0:
        for j in range(n):
            rng = _viewer_rng(strategy.rng_seed, j, stream=1)
            missed = rng.random(total_seconds) < strategy.manual_miss_prob
            manual_hits[:, j] = ~missed[seconds]

    hits = np.where(auto_mask, sal_hits, manual_hits)
    frame_importance = hits.mean(axis=1)
    return SimulationResult(
        video_id=labels.video_id,
        strategy=strategy.kind,
        frame_importance=tuple(float(v) for v in frame_importance),
        mean_importance=float(frame_importance.mean()),
        mode_traces=traces,
    )


@dataclass(frozen=True)
class EvaluationConfig:
    importance: ImportanceParams = field(default_factory=ImportanceParams)
    stabilize: StabilizeParams = field(default_factory=StabilizeParams)
    grid_res: float = 1.0
    rng_seed: int = 0
    switch_prob: float = 0.05
    idle_timeout: float = 10
    exclude_all_enforced: bool = True


@dataclass(frozen=True)
class VideoInputs:
    labels: LabelTraceSet
    saliency: Trajectory
    predictions: CvvpPredictionFile
    events: tuple | None = None


@dataclass(frozen=True)
class VideoReport:
    video_id: str
    truth_cvvp: tuple  # per frame
    truth_schedule: ModeSchedule
    pred_schedule: ModeSchedule
    error: CvvpError
    inference_accuracy: float
    results: dict  # strategy value -> SimulationResult
    excluded: bool


@dataclass(frozen=True)
class EvaluationReport:
    per_video: dict
    aggregate: dict
    excluded_videos: tuple


def _schedule_from_frames(values, fps, config: EvaluationConfig) -> ModeSchedule:
    seconds = per_second_average(values, fps)
    norm = normalize(seconds, config.stabilize.th_cvvp)
    return stabilize_video(norm, config.stabilize)


def evaluate_video(inputs: VideoInputs, config: EvaluationConfig) -> VideoReport:
    labels = inputs.labels
    if inputs.saliency.frame_count != labels.frame_count:
        raise ValueError(
            f"video {labels.video_id}: trajectory covers "
            f"{inputs.saliency.frame_count} frames, labels {labels.frame_count}")
    if inputs.predictions.frame_count != labels.frame_count:
        raise ValueError(
            f"video {labels.video_id}: predictions cover "
            f"{inputs.predictions.frame_count} frames, labels {labels.frame_count}")

    truth = cvvp_values(video_cvvp_series(labels, config.importance,
                                          grid_res=config.grid_res))
    truth_schedule = _schedule_from_frames(truth, labels.fps, config)
    pred_schedule = _schedule_from_frames(inputs.predictions.values,
                                          labels.fps, config)
    error = cvvp_error(inputs.predictions, truth)
    accuracy = inference_accuracy(pred_schedule, truth_schedule)

    base = dict(rng_seed=config.rng_seed,
                switch_prob_per_second=config.switch_prob,
                params=config.stabilize)
    strategies = {
        StrategyKind.AUTO_ENFORCED_ONLY:
            StrategyConfig(kind=StrategyKind.AUTO_ENFORCED_ONLY, **base),
        StrategyKind.WEAK_MAN_ONLY:
            StrategyConfig(kind=StrategyKind.WEAK_MAN_ONLY, **base),
        StrategyKind.TRIPLE_VIEW:
            StrategyConfig(kind=StrategyKind.TRIPLE_VIEW, **base),
    }
    decision_config = DecisionConfig(idle_timeout=config.idle_timeout)
    results = {}
    for kind, strategy in strategies.items():
        results[kind.value] = simulate_strategy(
            labels, inputs.saliency, strategy,
            schedule=pred_schedule if kind is StrategyKind.TRIPLE_VIEW else None,
            events=inputs.events if kind is StrategyKind.TRIPLE_VIEW else None,
            importance=config.importance, decision_config=decision_config)

    excluded = (config.exclude_all_enforced
                and all(v == 1 for v in pred_schedule.values))
    return VideoReport(video_id=labels.video_id, truth_cvvp=tuple(truth),
                       truth_schedule=truth_schedule,
                       pred_schedule=pred_schedule, error=error,
                       inference_accuracy=accuracy, results=results,
                       excluded=excluded)


def evaluate(videos, config: EvaluationConfig) -> EvaluationReport:
    """Evaluate every video and aggregate; all-enforced videos drop out
    of the strategy-importance averages when the exclusion flag is on."""
    per_video = {}
    for inputs in videos:
        report = evaluate_video(inputs, config)
        per_video[report.video_id] = report
    if not per_video:
        raise ValueError("no videos to evaluate")

    excluded = tuple(v for v in sorted(per_video) if per_video[v].excluded)
    included = [v for v in sorted(per_video) if not per_video[v].excluded]
    aggregate = {
        "mean_cvvp_error": float(np.mean(
            [per_video[v].error.mean for v in sorted(per_video)])),
        "inference_accuracy": float(np.mean(
            [per_video[v].inference_accuracy for v in sorted(per_video)])),
        "importance": {
            kind.value: (float(np.mean(
                [per_video[v].results[kind.value].mean_importance
                 for v in included])) if included else None)
            for kind in StrategyKind
        },
    }
    return EvaluationReport(per_video=per_video, aggregate=aggregate,
                            excluded_videos=excluded)


def write_report(report: EvaluationReport, outdir) -> None:
    """Persist the full report tree deterministically.

    Layout: report.csv, summary.json, frames/ (per-frame importance and
    error series), plots/ (error CDFs and per-second series), schedules/.
    """
    outdir = Path(outdir)
    for sub in ("frames", "plots", "schedules"):
        (outdir / sub).mkdir(parents=True, exist_ok=True)

    with open(outdir / "report.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["video", "strategy", "mean_importance", "excluded"])
        for vid in sorted(report.per_video):
            vrep = report.per_video[vid]
            for kind in StrategyKind:
                writer.writerow([vid, kind.value,
                                 repr(vrep.results[kind.value].mean_importance),
                                 int(vrep.excluded)])

    summary = {
        "aggregate": report.aggregate,
        "excluded_videos": list(report.excluded_videos),
        "videos": {
            vid: {
                "mean_cvvp_error": vrep.error.mean,
                "inference_accuracy": vrep.inference_accuracy,
                "excluded": vrep.excluded,
                "importance": {
                    kind.value: vrep.results[kind.value].mean_importance
                    for kind in StrategyKind
                },
            }
            for vid, vrep in sorted(report.per_video.items())
        },
    }
    with open(outdir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")

    for vid in sorted(report.per_video):
        vrep = report.per_video[vid]
        with open(outdir / "frames" / f"error_{vid}.jsonl", "w",
                  encoding="utf-8") as fh:
            for frame, err in enumerate(vrep.error.errors):
                fh.write(json.dumps({"video": vid, "frame": frame,
                                     "value": err}) + "\n")
        for kind in StrategyKind:
            result = vrep.results[kind.value]
            path = outdir / "frames" / f"importance_{vid}_{kind.value}.jsonl"
            with open(path, "w", encoding="utf-8") as fh:
                for frame, value in enumerate(result.frame_importance):
                    fh.write(json.dumps({"video": vid, "frame": frame,
                                         "value": value}) + "\n")
        with open(outdir / "plots" / f"cdf_{vid}.csv", "w", newline="",
                  encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["error", "fraction"])
            for x, frac in vrep.error.cdf:
                writer.writerow([repr(x), repr(frac)])
        with open(outdir / "plots" / f"cvvp_{vid}.csv", "w", newline="",
                  encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["second", "truth_bit", "pred_bit"])
            for t in range(vrep.truth_schedule.total_seconds):
                writer.writerow([t, vrep.truth_schedule.values[t],
                                 vrep.pred_schedule.values[t]])
        save_schedule(vid, vrep.truth_schedule,
                      outdir / "schedules" / f"{vid}_truth.jsonl")
        save_schedule(vid, vrep.pred_schedule,
                      outdir / "schedules" / f"{vid}_pred.jsonl")


def recompute_summary(outdir) -> dict:
    """Rebuild per-video and aggregate totals from the persisted
    per-frame files; lets a reader audit summary.json independently."""
    outdir = Path(outdir)
    with open(outdir / "summary.json", "r", encoding="utf-8") as fh:
        summary = json.load(fh)

    def mean_of(path):
        values = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                values.append(json.loads(line)["value"])
        return float(np.mean(values))

    recomputed = {"videos": {}, "aggregate": {}}
    for vid in summary["videos"]:
        entry = {
            "mean_cvvp_error": mean_of(outdir / "frames" / f"error_{vid}.jsonl"),
            "importance": {
                kind.value: mean_of(
                    outdir / "frames" / f"importance_{vid}_{kind.value}.jsonl")
                for kind in StrategyKind
            },
        }
        recomputed["videos"][vid] = entry
    included = [v for v in sorted(summary["videos"])
                if not summary["videos"][v]["excluded"]]
    recomputed["aggregate"] = {
        "mean_cvvp_error": float(np.mean(
            [recomputed["videos"][v]["mean_cvvp_error"]
             for v in sorted(summary["videos"])])),
        "importance": {
            kind.value: (float(np.mean(
                [recomputed["videos"][v]["importance"][kind.value]
                 for v in included])) if included else None)
            for kind in StrategyKind
        },
    }
    return recomputed
