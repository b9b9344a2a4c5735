"""Per-viewer view-mode state machine driven by the binary schedule.

Seconds with schedule bit 1 force every viewer into the enforced auto
mode and viewer requests are suppressed (kept for metrics). Seconds with
bit 0 leave each viewer free to toggle between manual and optional auto
viewing; optional auto is the default, and a manual viewer who stays
idle for idle_timeout seconds falls back to it.

Mode changes happen at the schedule's one-second granularity. Each
viewer's session is strictly sequential and independent of every other
viewer's, so sessions may run in parallel.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path


class ViewMode(Enum):
    MANUAL = "Manual"
    AUTO_OPTIONAL = "AutoOptional"
    AUTO_ENFORCED = "AutoEnforced"


class EventKind(Enum):
    REQUEST_MANUAL = "RequestManual"
    REQUEST_AUTO_OPTIONAL = "RequestAutoOptional"
    STEERING_INPUT = "SteeringInput"


@dataclass(frozen=True)
class ViewerEvent:
    viewer_id: str
    second: int
    kind: EventKind

    def __post_init__(self):
        if self.second < 0:
            raise ValueError(f"event second {self.second} < 0")


@dataclass(frozen=True)
class DecisionConfig:
    """idle_timeout may be math.inf to disable the idle fallback.

    restore_manual_after_enforced switches the release behavior from the
    default (always resume optional auto) to restoring whichever of
    manual/optional the viewer held when enforcement began.
    """

    idle_timeout: float = 10
    restore_manual_after_enforced: bool = False

    def __post_init__(self):
        if not (self.idle_timeout > 0):
            raise ValueError(f"idle_timeout {self.idle_timeout} must be > 0")


@dataclass(frozen=True)
class ViewerSessionState:
    viewer_id: str
    current_mode: ViewMode = ViewMode.AUTO_OPTIONAL
    last_activity_second: int = 0
    weak_man_mode: ViewMode = ViewMode.AUTO_OPTIONAL  # sub-state to restore
    config: DecisionConfig = field(default_factory=DecisionConfig)


def mode_from_cvvp(cvvp_bit: int) -> ViewMode | None:
    """1 selects enforced auto; 0 selects the free weak/man regime, in
    which the per-viewer sub-state decides (returned as None)."""
    if cvvp_bit not in (0, 1):
        raise ValueError(f"schedule bit must be 0 or 1, got {cvvp_bit!r}")
    return ViewMode.AUTO_ENFORCED if cvvp_bit == 1 else None


def step(state: ViewerSessionState, schedule_bit: int, events_at_second,
         second: int):
    """Advance one second; returns (new state, suppressed events).

    Events must belong to this viewer and second, in application order.
    Under bit 1 all events are suppressed. Under bit 0, a release from
    enforcement lands in optional auto (or the remembered sub-state when
    configured), then events apply, then the idle fallback is checked.
    Restoring manual counts as fresh activity.
    """
    events = list(events_at_second)
    for ev in events:
        if ev.second != second:
            raise ValueError(
                f"event at second {ev.second} fed to step for second {second}")
        if ev.viewer_id != state.viewer_id:
            raise ValueError(
                f"event for viewer {ev.viewer_id!r} fed to session "
                f"{state.viewer_id!r}")

    if mode_from_cvvp(schedule_bit) is ViewMode.AUTO_ENFORCED:
        memory = state.weak_man_mode
        if state.current_mode is not ViewMode.AUTO_ENFORCED:
            memory = state.current_mode
        new = replace(state, current_mode=ViewMode.AUTO_ENFORCED,
                      weak_man_mode=memory)
        return new, events

    mode = state.current_mode
    last_activity = state.last_activity_second
    if mode is ViewMode.AUTO_ENFORCED:
        if state.config.restore_manual_after_enforced:
            mode = state.weak_man_mode
            if mode is ViewMode.MANUAL:
                last_activity = second
        else:
            mode = ViewMode.AUTO_OPTIONAL

    for ev in events:
        if ev.kind is EventKind.REQUEST_MANUAL:
            mode = ViewMode.MANUAL
            last_activity = second
        elif ev.kind is EventKind.REQUEST_AUTO_OPTIONAL:
            mode = ViewMode.AUTO_OPTIONAL
            last_activity = second
        else:  # steering
            last_activity = second

    if mode is ViewMode.MANUAL and second - last_activity >= state.config.idle_timeout:
        mode = ViewMode.AUTO_OPTIONAL

    new = replace(state, current_mode=mode, last_activity_second=last_activity,
                  weak_man_mode=mode)
    return new, []


@dataclass(frozen=True)
class SessionTrace:
    viewer_id: str
    modes: tuple  # second -> ViewMode
    suppressed: tuple  # events that arrived during enforced seconds


def run_session(schedule, events, config: DecisionConfig | None = None,
                viewers=None) -> dict:
    """Deterministically replay the state machine for every viewer.

    `schedule` is a ModeSchedule (or any object with .values); events
    must be sorted by second and fall inside the schedule horizon.
    Returns {viewer_id: SessionTrace}; viewers without events get the
    pure schedule-driven trace.
    """
    config = config or DecisionConfig()
    bits = list(schedule.values)
    T = len(bits)

    prev_second = None
    for ev in events:
        if prev_second is not None and ev.second < prev_second:
            raise ValueError(
                f"events out of order: second {ev.second} after {prev_second}")
        prev_second = ev.second
        if ev.second >= T:
            raise ValueError(
                f"event at second {ev.second} beyond schedule horizon {T}")

    ids = set(viewers or [])
    ids.update(ev.viewer_id for ev in events)
    per_viewer = {vid: [] for vid in sorted(ids)}
    for ev in events:
        per_viewer[ev.viewer_id].append(ev)

    traces = {}
    for vid, viewer_events in per_viewer.items():
        by_second: dict = {}
        for ev in viewer_events:
            by_second.setdefault(ev.second, []).append(ev)
        state = ViewerSessionState(viewer_id=vid, config=config)
        modes = []
        suppressed = []
        for second, bit in enumerate(bits):
            state, dropped = step(state, bit, by_second.get(second, ()), second)
            modes.append(state.current_mode)
            suppressed.extend(dropped)
        traces[vid] = SessionTrace(viewer_id=vid, modes=tuple(modes),
                                   suppressed=tuple(suppressed))
    return traces


def load_events(path) -> list:
    """Read a {"viewer", "second", "kind"} JSON-lines event file."""
    from .traces import TraceFormatError  # local import avoids a cycle
    path = Path(path)
    if not path.exists():
        raise TraceFormatError("file does not exist", path=path)
    events = []
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
            for key in ("viewer", "second", "kind"):
                if key not in rec:
                    raise TraceFormatError(f"missing key {key!r}",
                                           path=path, line=lineno)
            try:
                kind = EventKind(rec["kind"])
            except ValueError:
                raise TraceFormatError(
                    f"unknown event kind {rec['kind']!r}", path=path, line=lineno)
            second = rec["second"]
            if isinstance(second, bool) or not isinstance(second, int) or second < 0:
                raise TraceFormatError(f"second must be an integer >= 0, "
                                       f"got {second!r}", path=path, line=lineno)
            events.append(ViewerEvent(viewer_id=str(rec["viewer"]),
                                      second=second, kind=kind))
    return events


def save_events(events, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ev in events:
            fh.write(json.dumps({"viewer": ev.viewer_id, "second": ev.second,
                                 "kind": ev.kind.value}) + "\n")


def save_mode_traces(traces: dict, path) -> None:
    """Persist {"viewer", "second", "mode"} records for every session."""
    with open(path, "w", encoding="utf-8") as fh:
        for vid in sorted(traces):
            for second, mode in enumerate(traces[vid].modes):
                fh.write(json.dumps({"viewer": vid, "second": second,
                                     "mode": mode.value}) + "\n")
