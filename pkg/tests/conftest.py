"""Shared synthetic-data builders for the test suite.

Label sets are built from known geometry so expected convergence values
are exact: a "convergent" second clusters all viewers within a few
degrees of an anchor (value 1), a "divergent" second spreads them over
jittered octahedron vertices (pairwise > 60 degrees, value 1/N), and a
"split" second mixes k clustered viewers with N-k scattered ones
(value k/N).
"""

import math

import numpy as np
import pytest

from cvvp360.decision import EventKind, ViewerEvent
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
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    theta = math.radians(angle_deg)
    return (vec * math.cos(theta)
            + np.cross(axis, vec) * math.sin(theta)
            + axis * float(np.dot(axis, vec)) * (1.0 - math.cos(theta)))


def jitter(rng, direction, max_deg):
    """A direction at most max_deg away from the given one."""
    if max_deg == 0:
        return direction
    v = direction_to_unit_vector(direction)
    helper = np.array([0.0, 0.0, 1.0]) if abs(v[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    perp = np.cross(v, helper)
    axis = rotate_about(perp, v, rng.uniform(0.0, 360.0))
    return unit_vector_to_direction(rotate_about(v, axis, rng.uniform(0.0, max_deg)))


def phase_labels(rng, kind, n_viewers=6):
    """One frame's labels with a known exact convergence value."""
    anchor = ViewingDirection(float(rng.uniform(-150, 150)),
                              float(rng.uniform(-30, 30)))
    if kind == "convergent":
        return [jitter(rng, anchor, 8.0) for _ in range(n_viewers)]
    if kind == "divergent":
        return [jitter(rng, base, 10.0) for base in OCTAHEDRON[:n_viewers]]
    if kind == "split":  # 3 clustered at a vertex, 3 on far vertices
        near = [jitter(rng, OCTAHEDRON[0], 8.0) for _ in range(3)]
        far = [jitter(rng, base, 10.0) for base in OCTAHEDRON[1:4]]
        return near + far
    raise ValueError(kind)


def synth_labels(video_id="vid0", seconds=8, fps=5, n_viewers=6, seed=0,
                 pattern=None):
    """Per-second phases held constant across the frames of a second."""
    rng = np.random.default_rng(seed)
    if pattern is None:
        pattern = ["convergent" if (t // 4) % 2 == 0 else "divergent"
                   for t in range(seconds)]
    assert len(pattern) == seconds
    frames = []
    for t in range(seconds):
        base = phase_labels(rng, pattern[t], n_viewers)
        for _ in range(fps):
            frames.append({f"viewer{j}": jitter(rng, base[j], 1.0)
                           for j in range(n_viewers)})
    viewer_ids = tuple(sorted(frames[0]))
    return LabelTraceSet(video_id=video_id, fps=fps, viewer_ids=viewer_ids,
                         frames=tuple(frames))


def synth_trajectory(labels, seed=1, follow="first"):
    """A trajectory near the first viewer's labels (noisy saliency stand-in)."""
    rng = np.random.default_rng(seed)
    first = labels.viewer_ids[0]
    directions = tuple(jitter(rng, frame[first], 5.0) for frame in labels.frames)
    return Trajectory(video_id=labels.video_id, directions=directions,
                      source="saliency")


def synth_predictions(truth_values, video_id, seed=2, noise=0.1):
    rng = np.random.default_rng(seed)
    values = []
    for v in truth_values:
        noisy = v + float(rng.uniform(-noise, noise))
        values.append(min(1.0, max(1e-6, noisy)))
    return CvvpPredictionFile(video_id=video_id, values=tuple(values))


def synth_events(viewer_ids, seconds, seed=3, count=3):
    rng = np.random.default_rng(seed)
    events = []
    kinds = (EventKind.REQUEST_MANUAL, EventKind.REQUEST_AUTO_OPTIONAL,
             EventKind.STEERING_INPUT)
    for second in sorted(int(s) for s in rng.integers(0, seconds, size=count)):
        events.append(ViewerEvent(
            viewer_id=str(rng.choice(list(viewer_ids))), second=second,
            kind=kinds[int(rng.integers(0, 3))]))
    return events


@pytest.fixture
def small_label_set():
    return synth_labels(seconds=6, fps=5, seed=11)


@pytest.fixture
def dataset_files(tmp_path):
    """One synthetic video written out as label/trajectory files."""
    labels = synth_labels(video_id="fix0", seconds=10, fps=5, seed=21)
    traj = synth_trajectory(labels, seed=22)
    labels_path = tmp_path / "labels_fix0.jsonl"
    traj_path = tmp_path / "trajectory_fix0.jsonl"
    save_labels(labels, labels_path)
    save_trajectory(traj, traj_path)
    return {"labels": labels, "trajectory": traj,
            "labels_path": labels_path, "trajectory_path": traj_path,
            "tmp_path": tmp_path}


def write_predictions(pred, path):
    save_predictions(pred, path)
    return path


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        status = "PASS" if report.passed else "FAIL"
        print(f"\nACCEPTANCE {status}: {name}", flush=True)
