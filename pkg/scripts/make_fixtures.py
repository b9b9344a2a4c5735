#!/usr/bin/env python3
"""Generate a synthetic multi-video dataset for pipeline demos.

Writes labels, a saliency-style trajectory, noisy convergence
predictions, and a viewer event file per video. Label geometry alternates
convergent seconds (all viewers clustered) with divergent seconds
(viewers spread over octahedron vertices), so the resulting schedules
switch modes in a controlled way.
"""

import argparse
import math
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from cvvp360.cvvp import ImportanceParams, cvvp_values, video_cvvp_series
from cvvp360.decision import EventKind, ViewerEvent, save_events
from cvvp360.geometry import (ViewingDirection, direction_to_unit_vector,
                              unit_vector_to_direction)
from cvvp360.traces import (CvvpPredictionFile, LabelTraceSet, Trajectory,
                            save_labels, save_predictions, save_trajectory)

OCTAHEDRON = (
    ViewingDirection(0, 0), ViewingDirection(90, 0),
    ViewingDirection(180, 0), ViewingDirection(-90, 0),
    ViewingDirection(0, 90), ViewingDirection(0, -90),
)


def rotate_about(vec, axis, angle_deg):
    axis = axis / np.linalg.norm(axis)
    theta = math.radians(angle_deg)
    return (vec * math.cos(theta)
            + np.cross(axis, vec) * math.sin(theta)
            + axis * float(np.dot(axis, vec)) * (1.0 - math.cos(theta)))


def jitter(rng, direction, max_deg):
    v = direction_to_unit_vector(direction)
    helper = np.array([0.0, 0.0, 1.0]) if abs(v[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    axis = rotate_about(np.cross(v, helper), v, rng.uniform(0, 360))
    return unit_vector_to_direction(rotate_about(v, axis, rng.uniform(0, max_deg)))


def build_video(video_id, seconds, fps, run_len, rng):
    n_viewers = 6
    frames = []
    anchors = []
    for t in range(seconds):
        convergent = (t // run_len) % 2 == 0
        anchor = ViewingDirection(float(rng.uniform(-150, 150)),
                                  float(rng.uniform(-30, 30)))
        anchors.append(anchor)
        if convergent:
            base = [jitter(rng, anchor, 8.0) for _ in range(n_viewers)]
        else:
            base = [jitter(rng, v, 10.0) for v in OCTAHEDRON]
        for _ in range(fps):
            frames.append({f"viewer{j}": jitter(rng, base[j], 1.0)
                           for j in range(n_viewers)})
    labels = LabelTraceSet(video_id=video_id, fps=fps,
                           viewer_ids=tuple(sorted(frames[0])),
                           frames=tuple(frames))
    trajectory = Trajectory(
        video_id=video_id, source="saliency",
        directions=tuple(jitter(rng, anchors[i // fps], 6.0)
                         for i in range(len(frames))))
    return labels, trajectory


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--videos", type=int, default=2)
    parser.add_argument("--seconds", type=int, default=240)
    parser.add_argument("--fps", type=int, default=5)
    parser.add_argument("--run-len", type=int, default=40,
                        help="seconds per convergent/divergent stretch")
    parser.add_argument("--noise", type=float, default=0.12,
                        help="prediction noise amplitude")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    params = ImportanceParams()

    for v in range(args.videos):
        video_id = f"synth{v}"
        labels, trajectory = build_video(video_id, args.seconds, args.fps,
                                         args.run_len, rng)
        save_labels(labels, outdir / f"labels_{video_id}.jsonl")
        save_trajectory(trajectory, outdir / f"trajectory_{video_id}.jsonl")

        truth = cvvp_values(video_cvvp_series(labels, params))
        noisy = [min(1.0, max(1e-6, t + float(rng.uniform(-args.noise,
                                                          args.noise))))
                 for t in truth]
        save_predictions(CvvpPredictionFile(video_id=video_id,
                                            values=tuple(truth)),
                         outdir / f"gt_{video_id}.jsonl")
        save_predictions(CvvpPredictionFile(video_id=video_id,
                                            values=tuple(noisy)),
                         outdir / f"pred_{video_id}.jsonl")

        viewers = list(labels.viewer_ids)
        events = []
        for second in sorted(rng.integers(0, args.seconds, size=6).tolist()):
            kind = (EventKind.REQUEST_MANUAL if rng.random() < 0.6
                    else EventKind.REQUEST_AUTO_OPTIONAL)
            events.append(ViewerEvent(
                viewer_id=str(rng.choice(viewers)), second=int(second),
                kind=kind))
        save_events(events, outdir / f"events_{video_id}.jsonl")
        print(f"{video_id}: {labels.frame_count} frames, "
              f"{args.seconds} s, mean truth cvvp "
              f"{sum(truth) / len(truth):.3f}")
    print(f"fixtures written to {outdir}")


if __name__ == "__main__":
    main()
