"""Per-second averaging, normalization, and min-duration binarization.

Turns a per-frame convergence series into a per-second binary mode
schedule whose constant runs each last at least t_min seconds within a
clip. Two solvers share one objective: an exhaustive enumerator (the
oracle) and a dynamic program (the production path). Both minimize the
mean squared error against the normalized series and break ties
identically: fewer segments, then initial value 1, then lexicographically
latest boundaries.

All functions are pure; per-clip solves are independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

_INF = float("inf")


@dataclass(frozen=True)
class StabilizeParams:
    """Administrator-set thresholds for binarization and stability."""

    th_cvvp: float = 0.6
    t_min: int = 20
    clip_len: int = 120

    def __post_init__(self):
        if not 0.0 < self.th_cvvp < 1.0:
            raise ValueError(f"th_cvvp {self.th_cvvp} outside (0, 1)")
        if self.t_min < 1:
            raise ValueError(f"t_min {self.t_min} < 1")
        if self.clip_len < self.t_min:
            raise ValueError(f"clip_len {self.clip_len} < t_min {self.t_min}")


@dataclass(frozen=True)
class SecondSeries:
    """Per-second averaged convergence values, each in (0, 1]."""

    values: tuple

    def __post_init__(self):
        if len(self.values) < 1:
            raise ValueError("empty series")
        for t, v in enumerate(self.values):
            if not 0.0 < v <= 1.0:
                raise ValueError(f"value {v} at second {t} outside (0, 1]")

    @property
    def total_seconds(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class NormalizedSeries:
    """Per-second values remapped so the decision threshold sits at 0.5."""

    values: tuple

    def __post_init__(self):
        if len(self.values) < 1:
            raise ValueError("empty series")
        for t, v in enumerate(self.values):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"value {v} at second {t} outside [0, 1]")

    @property
    def total_seconds(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ModeSchedule:
    """Per-second binary sequence: 1 enforces auto mode, 0 leaves choice.

    Segments are the maximal constant runs as (start, length, value).
    Solvers guarantee run length >= t_min within each clip; a schedule
    concatenated from several clips may carry shorter runs exactly at
    clip boundaries, so the container does not enforce the minimum.
    """

    values: tuple
    t_min: int
    segments: tuple

    def __post_init__(self):
        if any(v not in (0, 1) for v in self.values):
            raise ValueError("schedule values must be 0 or 1")
        if self.t_min < 1:
            raise ValueError(f"t_min {self.t_min} < 1")
        if sum(length for _, length, _ in self.segments) != len(self.values):
            raise ValueError("segment lengths do not sum to schedule length")
        for (_, _, a), (_, _, b) in zip(self.segments, self.segments[1:]):
            if a == b:
                raise ValueError("adjacent segments must alternate values")

    @property
    def total_seconds(self) -> int:
        return len(self.values)

    def min_run_length(self) -> int:
        return min(length for _, length, _ in self.segments)


def schedule_from_values(values, t_min: int) -> ModeSchedule:
    """Build a ModeSchedule, deriving segments from the raw 0/1 values."""
    values = tuple(int(v) for v in values)
    if not values:
        raise ValueError("empty schedule")
    segments = []
    start = 0
    for t in range(1, len(values) + 1):
        if t == len(values) or values[t] != values[start]:
            segments.append((start, t - start, values[start]))
            start = t
    return ModeSchedule(values=values, t_min=t_min, segments=tuple(segments))


def per_second_average(frame_series, fps: int) -> SecondSeries:
    """Mean of each fps-frame block; a trailing partial second averages
    whatever frames remain."""
    if fps < 1:
        raise ValueError(f"fps {fps} < 1")
    frames = list(frame_series)
    if not frames:
        raise ValueError("empty frame series")
    values = []
    for start in range(0, len(frames), fps):
        block = frames[start:start + fps]
        values.append(sum(block) / len(block))
    return SecondSeries(values=tuple(values))


def normalize(series: SecondSeries, th_cvvp: float) -> NormalizedSeries:
    """Piecewise-linear remap sending th_cvvp to 0.5, keeping 0 -> 0 and
    1 -> 1, clamped to [0, 1]."""
    if not 0.0 < th_cvvp < 1.0:
        raise ValueError(f"th_cvvp {th_cvvp} outside (0, 1)")
    out = []
    for x in series.values:
        if x <= th_cvvp:
            # dividing first keeps x == th_cvvp landing exactly on 0.5
            y = (x / th_cvvp) * 0.5
        else:
            y = 0.5 + ((x - th_cvvp) / (1.0 - th_cvvp)) * 0.5
        out.append(min(1.0, max(0.0, y)))
    return NormalizedSeries(values=tuple(out))


def candidate_count(T: int, t_min: int) -> int:
    """Closed-form number of feasible (initial value, run lengths) pairs:
    2 * sum over m of C(T - m*t_min + m - 1, m - 1)."""
    if T < 1 or t_min < 1:
        raise ValueError("T and t_min must be >= 1")
    total = 0
    for m in range(1, T // t_min + 1):
        total += math.comb(T - m * t_min + m - 1, m - 1)
    return 2 * total


def candidate_count_recursive(T: int, t_min: int) -> int:
    """Candidate count by direct recursion over the first run length.

    Independent of the closed form; used to cross-check it.
    """
    if T < 1 or t_min < 1:
        raise ValueError("T and t_min must be >= 1")

    @lru_cache(maxsize=None)
    def compositions(remaining):
        # number of ways to split `remaining` seconds into >= 1 runs,
        # each at least t_min long
        if remaining < t_min:
            return 0
        total = 1  # a single run of everything
        for first in range(t_min, remaining - t_min + 1):
            total += compositions(remaining - first)
        return total

    result = 2 * compositions(T)
    compositions.cache_clear()
    return result


def enumerate_candidates(T: int, t_min: int):
    """Yield every feasible (initial value, run lengths) candidate."""
    def splits(remaining):
        if remaining >= t_min:
            yield (remaining,)
        for first in range(t_min, remaining - t_min + 1):
            for rest in splits(remaining - first):
                yield (first,) + rest

    for v in (0, 1):
        for lengths in splits(T):
            yield v, lengths


def _prefixes(values):
    p1 = [0.0] * (len(values) + 1)
    p2 = [0.0] * (len(values) + 1)
    for t, x in enumerate(values):
        p1[t + 1] = p1[t] + x
        p2[t + 1] = p2[t] + x * x
    return p1, p2


def _run_cost(p1, p2, start, end, v):
    # sum over [start, end) of (v - x_t)^2, from shared prefix sums so the
    # enumerator and the DP see bit-identical costs
    sq = p2[end] - p2[start]
    if v == 0:
        return sq
    return (end - start) - 2.0 * (p1[end] - p1[start]) + sq


def _candidate_key(sse, lengths, v):
    boundaries = []
    acc = 0
    for length in lengths[:-1]:
        acc += length
        boundaries.append(-acc)  # negated: prefer latest boundaries
    return (sse, len(lengths), 1 - v, tuple(boundaries))


def _values_from_runs(v, lengths):
    values = []
    value = v
    for length in lengths:
        values.extend([value] * length)
        value = 1 - value
    return values


def _degenerate_schedule(norm_values, t_min, p1, p2):
    # T < t_min: only a single run is possible; prefer 1 on a cost tie
    T = len(norm_values)
    cost1 = _run_cost(p1, p2, 0, T, 1)
    cost0 = _run_cost(p1, p2, 0, T, 0)
    v = 1 if cost1 <= cost0 else 0
    return schedule_from_values([v] * T, t_min)


def stabilize_bruteforce(norm: NormalizedSeries, params: StabilizeParams,
                         max_candidates: int = 1_000_000) -> ModeSchedule:
    """Exhaustively enumerate every feasible schedule and keep the best.

    Rejects inputs whose candidate count exceeds max_candidates. Serves
    as the oracle for stabilize_dp; both share the cost arithmetic and
    tie-break so their outputs match exactly.
    """
    T = norm.total_seconds
    p1, p2 = _prefixes(norm.values)
    if T < params.t_min:
        return _degenerate_schedule(norm.values, params.t_min, p1, p2)
    count = candidate_count(T, params.t_min)
    if count > max_candidates:
        raise ValueError(
            f"{count} candidates at T={T}, t_min={params.t_min} "
            f"exceed the budget of {max_candidates}")

    best_key = None
    best = None
    for v, lengths in enumerate_candidates(T, params.t_min):
        sse = 0.0
        end = T
        value = v if len(lengths) % 2 == 1 else 1 - v
        for length in reversed(lengths):
            sse = _run_cost(p1, p2, end - length, end, value) + sse
            end -= length
            value = 1 - value
        key = _candidate_key(sse, lengths, v)
        if best_key is None or key < best_key:
            best_key = key
            best = (v, lengths)
    return schedule_from_values(_values_from_runs(*best), params.t_min)


def stabilize_dp(norm: NormalizedSeries, params: StabilizeParams) -> ModeSchedule:
    """Optimal schedule via dynamic programming over suffixes.

    suffix[t][v][k] is the least cost of covering seconds [t, T) with k
    alternating runs whose first run has value v and every run lasts at
    least t_min. Run count stays in the state so the fewer-segments
    tie-break is exact; costs come from prefix sums. t_min > T is not an
    error: a single run is forced and the better constant schedule wins.
    """
    T = norm.total_seconds
    t_min = params.t_min
    p1, p2 = _prefixes(norm.values)
    if T < t_min:
        return _degenerate_schedule(norm.values, t_min, p1, p2)

    kmax = T // t_min
    # suffix[t][v][k], k = 0..kmax
    suffix = [[[_INF] * (kmax + 1) for _ in range(2)] for _ in range(T + 1)]
    suffix[T][0][0] = 0.0
    suffix[T][1][0] = 0.0
    for t in range(T - 1, -1, -1):
        remaining = T - t
        for v in (0, 1):
            for k in range(1, min(kmax, remaining // t_min) + 1):
                best = _INF
                if k == 1:
                    best = _run_cost(p1, p2, t, T, v)
                else:
                    # leave room for k-1 more runs of >= t_min seconds
                    for run_len in range(t_min, remaining - (k - 1) * t_min + 1):
                        tail = suffix[t + run_len][1 - v][k - 1]
                        if tail == _INF:
                            continue
                        cost = _run_cost(p1, p2, t, t + run_len, v) + tail
                        if cost < best:
                            best = cost
                suffix[t][v][k] = best

    best_choice = None
    best_key = None
    for v in (0, 1):
        for k in range(1, kmax + 1):
            sse = suffix[0][v][k]
            if sse == _INF:
                continue
            key = (sse, k, 1 - v)
            if best_key is None or key < best_key:
                best_key = key
                best_choice = (v, k)

    # reconstruct, preferring the latest feasible boundary at every step
    v, k = best_choice
    lengths = []
    t = 0
    while k > 0:
        if k == 1:
            run_len = T - t
        else:
            remaining = T - t
            target = suffix[t][v][k]
            run_len = None
            for cand in range(remaining - (k - 1) * t_min, t_min - 1, -1):
                tail = suffix[t + cand][1 - v][k - 1]
                if tail == _INF:
                    continue
                if _run_cost(p1, p2, t, t + cand, v) + tail == target:
                    run_len = cand
                    break
            assert run_len is not None, "DP reconstruction failed"
        lengths.append(run_len)
        t += run_len
        v = 1 - v
        k -= 1

    v0 = best_choice[0]
    return schedule_from_values(_values_from_runs(v0, lengths), t_min)


def stabilize_video(norm: NormalizedSeries, params: StabilizeParams,
                    solver=None) -> ModeSchedule:
    """Split into clip_len windows, solve each independently, concatenate.

    Runs shorter than t_min may appear where two clips meet; within any
    single clip the minimum duration always holds. A trailing clip
    shorter than t_min collapses to a single constant segment. `solver`
    defaults to stabilize_dp; stabilize_bruteforce is a drop-in.
    """
    solver = solver or stabilize_dp
    values = []
    for start in range(0, norm.total_seconds, params.clip_len):
        chunk = norm.values[start:start + params.clip_len]
        solved = solver(NormalizedSeries(values=chunk), params)
        values.extend(solved.values)
    return schedule_from_values(values, params.t_min)


def schedule_sse(schedule_values, norm: NormalizedSeries) -> float:
    """Sum of squared differences between a 0/1 sequence and the series."""
    if len(schedule_values) != norm.total_seconds:
        raise ValueError("length mismatch")
    return sum((v - x) ** 2 for v, x in zip(schedule_values, norm.values))


def schedule_mse(schedule_values, norm: NormalizedSeries) -> float:
    return schedule_sse(schedule_values, norm) / norm.total_seconds
