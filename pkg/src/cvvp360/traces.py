"""Ingestion, validation, and persistence of dataset artifacts.

All on-disk formats are JSON-lines with explicit keys (documented in
docs/formats.md):

* labels:      {"video", "frame", "viewer", "yaw", "pitch"}
* trajectory:  {"video", "frame", "yaw", "pitch"}
* predictions: {"video", "frame", "cvvp"}
* schedule:    {"video", "second", "value"}

A file may start with one header record (a line without a "frame" or
"second" key) carrying file-level fields: "fps" for labels (default 30),
"source" for trajectories, "t_min" for schedules. Angles are degrees as
decimals. Loaders are reentrant and the returned structures are treated
as immutable after validation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .geometry import ViewingDirection
from .stabilize import ModeSchedule, schedule_from_values

DEFAULT_FPS = 30


class TraceFormatError(ValueError):
    """A dataset file failed schema validation.

    Carries the offending path and 1-based line number when known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
            if line is not None:
                prefix += f"{line}:"
            prefix += " "
        super().__init__(prefix + message)


@dataclass(frozen=True)
class LabelTraceSet:
    """Per-frame most-important directions labeled by N viewers."""

    video_id: str
    fps: int
    viewer_ids: tuple
    frames: tuple  # frame_id -> {viewer_id: ViewingDirection}

    @property
    def viewer_count(self) -> int:
        return len(self.viewer_ids)

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    def frame_directions(self, frame_id: int) -> list:
        """Labels of one frame in stable (sorted viewer id) order."""
        labels = self.frames[frame_id]
        return [labels[v] for v in self.viewer_ids]


@dataclass(frozen=True)
class Trajectory:
    """One recommended direction per frame (saliency output or similar)."""

    video_id: str
    directions: tuple  # frame_id -> ViewingDirection
    source: str = "unknown"

    @property
    def frame_count(self) -> int:
        return len(self.directions)


@dataclass(frozen=True)
class CvvpPredictionFile:
    """Per-frame predicted convergence values, each in (0, 1]."""

    video_id: str
    values: tuple  # frame_id -> float

    @property
    def frame_count(self) -> int:
        return len(self.values)


def _read_records(path):
    path = Path(path)
    if not path.exists():
        raise TraceFormatError("file does not exist", path=path)
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise TraceFormatError(f"invalid JSON ({exc.msg})",
                                       path=path, line=lineno) from exc
            if not isinstance(rec, dict):
                raise TraceFormatError("record is not a JSON object",
                                       path=path, line=lineno)
            records.append((lineno, rec))
    if not records:
        raise TraceFormatError("file contains no records", path=path)
    return path, records


def _split_header(records, body_keys):
    first_line, first = records[0]
    if not any(k in first for k in body_keys):
        return first, records[1:]
    return {}, records


def _require(rec, key, path, line):
    if key not in rec:
        raise TraceFormatError(f"missing key {key!r}", path=path, line=line)
    return rec[key]


def _check_video(rec, video_id, path, line):
    vid = str(_require(rec, "video", path, line))
    if video_id is None:
        return vid
    if vid != video_id:
        raise TraceFormatError(
            f"video {vid!r} differs from {video_id!r}; one file holds one video",
            path=path, line=line)
    return video_id


def _int_field(rec, key, path, line):
    value = _require(rec, key, path, line)
    if isinstance(value, bool) or not isinstance(value, int):
        raise TraceFormatError(f"{key} must be an integer, got {value!r}",
                               path=path, line=line)
    if value < 0:
        raise TraceFormatError(f"{key} must be >= 0, got {value}",
                               path=path, line=line)
    return value


def _direction(rec, path, line):
    yaw = _require(rec, "yaw", path, line)
    pitch = _require(rec, "pitch", path, line)
    if not isinstance(yaw, (int, float)) or not isinstance(pitch, (int, float)):
        raise TraceFormatError("yaw/pitch must be numbers", path=path, line=line)
    try:
        return ViewingDirection(yaw=float(yaw), pitch=float(pitch))
    except ValueError as exc:
        raise TraceFormatError(str(exc), path=path, line=line) from exc


def _check_contiguous(frame_ids, path, what="frame"):
    expected = list(range(len(frame_ids)))
    if sorted(frame_ids) != expected:
        missing = sorted(set(expected) - set(frame_ids))
        hint = f"first missing {what} {missing[0]}" if missing else "duplicates present"
        raise TraceFormatError(
            f"{what} ids must be contiguous from 0 ({hint})", path=path)


def load_labels(path, fill_gaps: bool = False) -> LabelTraceSet:
    """Load and validate a viewer-label trace file.

    With fill_gaps=True, frames missing entirely are filled by repeating
    the previous frame's labels (hold last value); off by default, in
    which case any gap is an error.
    """
    path, records = _read_records(path)
    header, body = _split_header(records, ("frame",))
    fps = header.get("fps", DEFAULT_FPS)
    if not isinstance(fps, int) or fps < 1:
        raise TraceFormatError(f"fps must be a positive integer, got {fps!r}",
                               path=path, line=records[0][0])
    video_id = str(header["video"]) if "video" in header else None

    per_frame: dict = {}
    for line, rec in body:
        video_id = _check_video(rec, video_id, path, line)
        frame = _int_field(rec, "frame", path, line)
        viewer = str(_require(rec, "viewer", path, line))
        direction = _direction(rec, path, line)
        frame_labels = per_frame.setdefault(frame, {})
        if viewer in frame_labels:
            raise TraceFormatError(
                f"duplicate label for viewer {viewer!r} at frame {frame}",
                path=path, line=line)
        frame_labels[viewer] = direction
    if not per_frame:
        raise TraceFormatError("no label records", path=path)

    if fill_gaps:
        if 0 not in per_frame:
            raise TraceFormatError("frame 0 is missing; cannot gap-fill", path=path)
        last = per_frame[0]
        for frame in range(max(per_frame) + 1):
            if frame in per_frame:
                last = per_frame[frame]
            else:
                per_frame[frame] = dict(last)
    _check_contiguous(list(per_frame), path)

    viewer_ids = tuple(sorted(per_frame[0]))
    for frame in range(len(per_frame)):
        got = tuple(sorted(per_frame[frame]))
        if got != viewer_ids:
            raise TraceFormatError(
                f"incomplete viewer coverage at frame {frame}: "
                f"expected {list(viewer_ids)}, got {list(got)}", path=path)

    frames = tuple(per_frame[i] for i in range(len(per_frame)))
    return LabelTraceSet(video_id=video_id, fps=fps, viewer_ids=viewer_ids,
                         frames=frames)


def save_labels(trace: LabelTraceSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"video": trace.video_id, "fps": trace.fps}) + "\n")
        for frame_id, labels in enumerate(trace.frames):
            for viewer in trace.viewer_ids:
                d = labels[viewer]
                fh.write(json.dumps({
                    "video": trace.video_id, "frame": frame_id,
                    "viewer": viewer, "yaw": d.yaw, "pitch": d.pitch,
                }) + "\n")


def load_trajectory(path) -> Trajectory:
    path, records = _read_records(path)
    header, body = _split_header(records, ("frame",))
    source = str(header.get("source", "unknown"))
    video_id = str(header["video"]) if "video" in header else None

    directions: dict = {}
    for line, rec in body:
        video_id = _check_video(rec, video_id, path, line)
        frame = _int_field(rec, "frame", path, line)
        if frame in directions:
            raise TraceFormatError(f"duplicate frame {frame}", path=path, line=line)
        directions[frame] = _direction(rec, path, line)
    if not directions:
        raise TraceFormatError("no trajectory records", path=path)
    _check_contiguous(list(directions), path)
    return Trajectory(video_id=video_id, source=source,
                      directions=tuple(directions[i] for i in range(len(directions))))


def save_trajectory(traj: Trajectory, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"video": traj.video_id, "source": traj.source}) + "\n")
        for frame_id, d in enumerate(traj.directions):
            fh.write(json.dumps({
                "video": traj.video_id, "frame": frame_id,
                "yaw": d.yaw, "pitch": d.pitch,
            }) + "\n")


def load_predictions(path) -> CvvpPredictionFile:
    path, records = _read_records(path)
    header, body = _split_header(records, ("frame",))
    video_id = str(header["video"]) if "video" in header else None

    values: dict = {}
    for line, rec in body:
        video_id = _check_video(rec, video_id, path, line)
        frame = _int_field(rec, "frame", path, line)
        value = _require(rec, "cvvp", path, line)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise TraceFormatError(f"cvvp must be a number, got {value!r}",
                                   path=path, line=line)
        value = float(value)
        if not 0.0 < value <= 1.0:
            raise TraceFormatError(
                f"cvvp {value} outside (0, 1] at frame {frame}",
                path=path, line=line)
        if frame in values:
            raise TraceFormatError(f"duplicate frame {frame}", path=path, line=line)
        values[frame] = value
    if not values:
        raise TraceFormatError("no prediction records", path=path)
    _check_contiguous(list(values), path)
    return CvvpPredictionFile(video_id=video_id,
                              values=tuple(values[i] for i in range(len(values))))


def save_predictions(pred: CvvpPredictionFile, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"video": pred.video_id}) + "\n")
        for frame_id, value in enumerate(pred.values):
            fh.write(json.dumps({
                "video": pred.video_id, "frame": frame_id, "cvvp": value,
            }) + "\n")


def load_schedule(path) -> tuple:
    """Load a per-second mode schedule; returns (video_id, ModeSchedule)."""
    path, records = _read_records(path)
    header, body = _split_header(records, ("second",))
    t_min = header.get("t_min", 1)
    if not isinstance(t_min, int) or t_min < 1:
        raise TraceFormatError(f"t_min must be a positive integer, got {t_min!r}",
                               path=path, line=records[0][0])
    video_id = str(header["video"]) if "video" in header else None

    values: dict = {}
    for line, rec in body:
        video_id = _check_video(rec, video_id, path, line)
        second = _int_field(rec, "second", path, line)
        value = _require(rec, "value", path, line)
        if value not in (0, 1) or isinstance(value, bool):
            raise TraceFormatError(f"value must be 0 or 1, got {value!r}",
                                   path=path, line=line)
        if second in values:
            raise TraceFormatError(f"duplicate second {second}", path=path, line=line)
        values[second] = int(value)
    if not values:
        raise TraceFormatError("no schedule records", path=path)
    _check_contiguous(list(values), path, what="second")
    schedule = schedule_from_values([values[i] for i in range(len(values))], t_min)
    return video_id, schedule


def save_schedule(video_id: str, schedule: ModeSchedule, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"video": video_id, "t_min": schedule.t_min}) + "\n")
        for second, value in enumerate(schedule.values):
            fh.write(json.dumps({
                "video": video_id, "second": second, "value": value,
            }) + "\n")
