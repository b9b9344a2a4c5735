import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvvp360.decision import (DecisionConfig, EventKind, SessionTrace,
                              ViewerEvent, ViewerSessionState, ViewMode,
                              load_events, mode_from_cvvp, run_session,
                              save_events, save_mode_traces, step)
from cvvp360.stabilize import schedule_from_values

M, AO, AE = ViewMode.MANUAL, ViewMode.AUTO_OPTIONAL, ViewMode.AUTO_ENFORCED


def ev(second, kind, viewer="a"):
    return ViewerEvent(viewer_id=viewer, second=second, kind=kind)


def run_one(bits, events, viewer="a", **config_kwargs):
    schedule = schedule_from_values(bits, t_min=1)
    traces = run_session(schedule, events,
                         config=DecisionConfig(**config_kwargs),
                         viewers=[viewer])
    return traces[viewer]


class TestModeFromCvvp:
    def test_one_selects_enforced(self):
        assert mode_from_cvvp(1) is AE

    def test_zero_selects_weak_man_regime(self):
        assert mode_from_cvvp(0) is None

    def test_non_binary_rejected(self):
        with pytest.raises(ValueError):
            mode_from_cvvp(2)


class TestStep:
    def test_enforced_overrides_and_suppresses(self):
        state = ViewerSessionState(viewer_id="a", current_mode=M)
        new, suppressed = step(state, 1, [ev(0, EventKind.REQUEST_MANUAL)], 0)
        assert new.current_mode is AE
        assert len(suppressed) == 1

    def test_release_defaults_to_auto_optional(self):
        state = ViewerSessionState(viewer_id="a", current_mode=AE,
                                   weak_man_mode=M)
        new, _ = step(state, 0, [], 5)
        assert new.current_mode is AO

    def test_release_can_restore_manual(self):
        config = DecisionConfig(restore_manual_after_enforced=True)
        state = ViewerSessionState(viewer_id="a", current_mode=AE,
                                   weak_man_mode=M, config=config)
        new, _ = step(state, 0, [], 5)
        assert new.current_mode is M
        assert new.last_activity_second == 5  # restoring counts as activity

    def test_request_manual_then_idle_resume(self):
        state = ViewerSessionState(viewer_id="a")
        state, _ = step(state, 0, [ev(0, EventKind.REQUEST_MANUAL)], 0)
        assert state.current_mode is M
        for second in range(1, 10):
            state, _ = step(state, 0, [], second)
            assert state.current_mode is M, second
        state, _ = step(state, 0, [], 10)
        assert state.current_mode is AO  # idle_timeout=10 reached

    def test_steering_refreshes_activity(self):
        state = ViewerSessionState(viewer_id="a", current_mode=M,
                                   last_activity_second=0)
        state, _ = step(state, 0, [ev(9, EventKind.STEERING_INPUT)], 9)
        assert state.current_mode is M
        state2, _ = step(state, 0, [], 15)
        assert state2.current_mode is M  # 15 - 9 < 10
        state3, _ = step(state2, 0, [], 19)
        assert state3.current_mode is AO

    def test_event_for_wrong_second_rejected(self):
        state = ViewerSessionState(viewer_id="a")
        with pytest.raises(ValueError, match="second"):
            step(state, 0, [ev(3, EventKind.STEERING_INPUT)], 4)

    def test_event_for_wrong_viewer_rejected(self):
        state = ViewerSessionState(viewer_id="a")
        with pytest.raises(ValueError, match="viewer"):
            step(state, 0, [ev(0, EventKind.STEERING_INPUT, viewer="b")], 0)


class TestRunSession:
    def test_all_ones_all_enforced(self):
        trace = run_one([1, 1, 1], [])
        assert trace.modes == (AE, AE, AE)

    def test_all_zeros_defaults_to_auto_optional(self):
        trace = run_one([0, 0, 0], [])
        assert trace.modes == (AO, AO, AO)

    def test_manual_request_persists_with_infinite_timeout(self):
        events = [ev(3, EventKind.REQUEST_MANUAL)]
        trace = run_one([0] * 8, events, idle_timeout=math.inf)
        assert trace.modes == (AO, AO, AO, M, M, M, M, M)

    def test_requests_during_enforced_have_no_effect(self):
        events = [ev(0, EventKind.REQUEST_MANUAL),
                  ev(1, EventKind.REQUEST_MANUAL)]
        trace = run_one([1, 1, 0], events)
        assert trace.modes == (AE, AE, AO)
        assert len(trace.suppressed) == 2

    def test_enforced_precedence_over_manual(self):
        events = [ev(0, EventKind.REQUEST_MANUAL)]
        trace = run_one([0, 1, 1], events, idle_timeout=math.inf)
        assert trace.modes == (M, AE, AE)

    def test_release_goes_to_auto_optional(self):
        events = [ev(0, EventKind.REQUEST_MANUAL)]
        trace = run_one([0, 1, 0], events, idle_timeout=math.inf)
        assert trace.modes == (M, AE, AO)

    def test_release_restores_manual_when_configured(self):
        events = [ev(0, EventKind.REQUEST_MANUAL)]
        trace = run_one([0, 1, 0], events, idle_timeout=math.inf,
                        restore_manual_after_enforced=True)
        assert trace.modes == (M, AE, M)

    def test_out_of_order_events_rejected(self):
        events = [ev(5, EventKind.STEERING_INPUT),
                  ev(2, EventKind.STEERING_INPUT)]
        with pytest.raises(ValueError, match="out of order"):
            run_one([0] * 8, events)

    def test_event_beyond_horizon_rejected(self):
        with pytest.raises(ValueError, match="horizon"):
            run_one([0, 0], [ev(5, EventKind.STEERING_INPUT)])

    def test_viewer_without_events_gets_trace(self):
        schedule = schedule_from_values([0, 1], t_min=1)
        traces = run_session(schedule, [], viewers=["x", "y"])
        assert set(traces) == {"x", "y"}
        assert traces["x"].modes == (AO, AE)

    def test_viewer_independence(self):
        schedule = schedule_from_values([0] * 6, t_min=1)
        a_events = [ev(1, EventKind.REQUEST_MANUAL, viewer="a")]
        b_events = [ev(2, EventKind.REQUEST_MANUAL, viewer="b"),
                    ev(4, EventKind.REQUEST_AUTO_OPTIONAL, viewer="b")]
        alone = run_session(schedule, a_events, viewers=["a"])
        merged = sorted(a_events + b_events, key=lambda e: e.second)
        together = run_session(schedule, merged, viewers=["a", "b"])
        assert together["a"].modes == alone["a"].modes

    def test_determinism(self):
        schedule = schedule_from_values([0, 1, 0, 0, 1], t_min=1)
        events = [ev(0, EventKind.REQUEST_MANUAL),
                  ev(2, EventKind.STEERING_INPUT),
                  ev(3, EventKind.REQUEST_AUTO_OPTIONAL)]
        first = run_session(schedule, events, viewers=["a"])
        second = run_session(schedule, events, viewers=["a"])
        assert first == second

    @settings(max_examples=60, deadline=None)
    @given(bits=st.lists(st.integers(0, 1), min_size=1, max_size=8),
           seconds=st.lists(st.integers(0, 7), max_size=3),
           kinds=st.lists(st.sampled_from(list(EventKind)), min_size=3,
                          max_size=3))
    def test_no_orphan_modes_and_schedule_supremacy(self, bits, seconds, kinds):
        events = [ev(s, k) for s, k in sorted(zip(seconds, kinds),
                                              key=lambda p: p[0])
                  if s < len(bits)]
        trace = run_one(bits, events)
        for second, mode in enumerate(trace.modes):
            if bits[second] == 1:
                assert mode is AE
            else:
                assert mode in (M, AO)


class TestEventIo:
    def test_round_trip(self, tmp_path):
        events = [ev(0, EventKind.REQUEST_MANUAL),
                  ev(3, EventKind.STEERING_INPUT, viewer="b")]
        path = tmp_path / "events.jsonl"
        save_events(events, path)
        assert load_events(path) == events

    def test_unknown_kind_rejected(self, tmp_path):
        path = tmp_path / "events.jsonl"
        path.write_text('{"viewer": "a", "second": 0, "kind": "Wiggle"}\n')
        from cvvp360.traces import TraceFormatError
        with pytest.raises(TraceFormatError, match="kind"):
            load_events(path)

    def test_mode_trace_persistence(self, tmp_path):
        trace = SessionTrace(viewer_id="a", modes=(AO, AE), suppressed=())
        path = tmp_path / "modes.jsonl"
        save_mode_traces({"a": trace}, path)
        lines = [line for line in path.read_text().splitlines() if line]
        assert len(lines) == 2
        assert '"mode": "AutoEnforced"' in lines[1]
