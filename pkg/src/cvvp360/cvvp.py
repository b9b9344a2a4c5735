"""Ground-truth convergence scoring of multi-viewer preference labels.

A direction is important to a viewer when it lies strictly within
th_dist degrees of that viewer's labeled direction; the convergence
value of a frame is the maximum, over all directions, of the fraction of
viewers for whom the direction is important.

The maximum of a sum of equal-radius spherical-cap indicator functions
is attained at a label point or at an intersection of two cap
boundaries, so the search is exact over a finite candidate set: the N
label directions, the pairwise cap-boundary intersections (nudged a hair
into the lens interior, because the importance test is strict), and a
regular grid kept as a cross-check.

Importance tests compare dot products against cos(th_dist) rather than
angles against th_dist: the predicate is identical and stays exact when
a distance lands on the threshold.

Everything here is pure; per-frame computations are independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ViewingDirection, direction_to_unit_vector, unit_vector_to_direction

# chord-space nudge pulling boundary intersections into the lens interior
_NUDGE = 1e-7


@dataclass(frozen=True)
class ImportanceParams:
    """Distance threshold (degrees) under which a view counts as important."""

    th_dist: float = 30.0

    def __post_init__(self):
        if not 0.0 < self.th_dist < 180.0:
            raise ValueError(f"th_dist {self.th_dist} outside (0, 180)")

    @property
    def cos_th(self) -> float:
        return math.cos(math.radians(self.th_dist))


@dataclass(frozen=True)
class FrameCvvp:
    """A frame's convergence value and one direction attaining it."""

    frame_id: int
    cvvp: float
    argmax_direction: ViewingDirection

    def __post_init__(self):
        if not 0.0 < self.cvvp <= 1.0:
            raise ValueError(f"cvvp {self.cvvp} outside (0, 1]")


def importance_for_viewer(view: ViewingDirection, label: ViewingDirection,
                          params: ImportanceParams) -> int:
    """1 when the view is strictly within th_dist of the label, else 0."""
    dot = float(np.dot(direction_to_unit_vector(view), direction_to_unit_vector(label)))
    return 1 if dot > params.cos_th else 0


def overall_importance(view: ViewingDirection, frame_labels,
                       params: ImportanceParams) -> float:
    """Fraction of the N labels the view is important to (a multiple of 1/N)."""
    labels = list(frame_labels)
    if not labels:
        raise ValueError("no labels")
    hits = sum(importance_for_viewer(view, label, params) for label in labels)
    return hits / len(labels)


def _grid_vectors(grid_res: float) -> np.ndarray:
    yaws = np.arange(-180.0, 180.0, grid_res)
    pitches = np.arange(-90.0, 90.0 + grid_res / 2.0, grid_res)
    yy, pp = np.meshgrid(np.radians(yaws), np.radians(pitches))
    cp = np.cos(pp)
    return np.stack([cp * np.cos(yy), cp * np.sin(yy), np.sin(pp)],
                    axis=-1).reshape(-1, 3)


_grid_cache: dict = {}


def _cached_grid(grid_res: float) -> np.ndarray:
    if grid_res not in _grid_cache:
        _grid_cache.clear()  # keep at most one resolution resident
        _grid_cache[grid_res] = _grid_vectors(grid_res)
    return _grid_cache[grid_res]


def _cap_intersections(vecs: np.ndarray, cos_th: float) -> list:
    """Both boundary-intersection points for every label pair whose caps
    overlap, each nudged toward the pair midpoint so it sits strictly
    inside both open caps."""
    points = []
    n = len(vecs)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = vecs[i], vecs[j]
            dot = float(np.dot(a, b))
            cross_sq = 1.0 - dot * dot
            if cross_sq < 1e-18:  # coincident or antipodal labels
                continue
            s = cos_th / (1.0 + dot)
            t_sq = (1.0 - 2.0 * s * s * (1.0 + dot)) / cross_sq
            if t_sq < 0.0:  # caps nested apart: no boundary crossing
                continue
            t = math.sqrt(t_sq)
            mid = a + b
            mid = mid / np.linalg.norm(mid)
            base = s * (a + b)
            cross = np.cross(a, b)
            for p in (base + t * cross, base - t * cross):
                p = p / np.linalg.norm(p)
                nudged = p + _NUDGE * (mid - p)
                points.append(nudged / np.linalg.norm(nudged))
    return points


def frame_cvvp(frame_labels, params: ImportanceParams,
               grid_res: float = 1.0, frame_id: int = 0) -> FrameCvvp:
    """Maximize overall importance over the whole sphere.

    The candidate set (labels, nudged pairwise cap-boundary
    intersections, regular grid) contains a maximizer, so the returned
    value is the exact maximum of the strict-threshold count.
    """
    labels = list(frame_labels)
    if not labels:
        raise ValueError("no labels")
    if grid_res <= 0.0:
        raise ValueError(f"grid_res {grid_res} must be positive")
    vecs = np.array([direction_to_unit_vector(l) for l in labels])
    cos_th = params.cos_th

    candidates = [vecs]
    inter = _cap_intersections(vecs, cos_th)
    if inter:
        candidates.append(np.array(inter))
    candidates.append(_cached_grid(grid_res))
    cand = np.concatenate(candidates, axis=0)

    counts = (cand @ vecs.T > cos_th).sum(axis=1)
    best = int(np.argmax(counts))  # label candidates come first on ties
    return FrameCvvp(
        frame_id=frame_id,
        cvvp=int(counts[best]) / len(labels),
        argmax_direction=unit_vector_to_direction(cand[best]),
    )


def video_cvvp_series(labels, params: ImportanceParams,
                      grid_res: float = 1.0) -> list:
    """frame_cvvp applied to every frame of a validated label trace set."""
    return [
        frame_cvvp(labels.frame_directions(frame_id), params,
                   grid_res=grid_res, frame_id=frame_id)
        for frame_id in range(labels.frame_count)
    ]


def cvvp_values(series) -> list:
    """Plain per-frame convergence values from a FrameCvvp sequence."""
    return [fc.cvvp for fc in series]
