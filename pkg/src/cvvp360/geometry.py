"""Spherical viewing-direction arithmetic and 360/2D projections.

Conventions (frozen; all file formats and modules rely on them):

* A viewing direction is a (yaw, pitch) pair in degrees. Yaw is in
  [-180, +180] and wraps; pitch is in [-90, +90] and does not.
* Yaw 0 / pitch 0 maps to the center of an equirectangular image.
  Yaw increases to the right (increasing column), pitch increases
  upward (decreasing row).
* Unit-sphere mapping: x = cos(pitch)cos(yaw), y = cos(pitch)sin(yaw),
  z = sin(pitch). So (0, 0) -> (1, 0, 0) and (0, 90) -> (0, 0, 1).
* Equirectangular texel (col, row) of a WxH image is centered at
  yaw = (col + 0.5)/W * 360 - 180, pitch = 90 - (row + 0.5)/H * 180.

All functions are pure; there is no shared mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

FACE_NAMES = ("front", "back", "left", "right", "up", "down")

# Face centers as (yaw, pitch); roll follows the no-roll camera basis below.
_FACE_CENTERS = {
    "front": (0.0, 0.0),
    "back": (180.0, 0.0),
    "left": (-90.0, 0.0),
    "right": (90.0, 0.0),
    "up": (0.0, 90.0),
    "down": (0.0, -90.0),
}


@dataclass(frozen=True, eq=False)
class ViewingDirection:
    """A point on the unit sphere given as (yaw, pitch) in degrees.

    Yaw is normalized modulo 360 into [-180, 180); out-of-range pitch is
    rejected. At pitch = +/-90 every yaw denotes the same pole, and
    equality and distance treat it that way.
    """

    yaw: float
    pitch: float

    def __post_init__(self):
        if not (math.isfinite(self.yaw) and math.isfinite(self.pitch)):
            raise ValueError(f"non-finite direction ({self.yaw}, {self.pitch})")
        if not -90.0 <= self.pitch <= 90.0:
            raise ValueError(f"pitch {self.pitch} outside [-90, 90]")
        object.__setattr__(self, "yaw", _wrap_yaw(self.yaw))

    def _key(self):
        if abs(self.pitch) == 90.0:
            return (0.0, self.pitch)
        return (self.yaw, self.pitch)

    def __eq__(self, other):
        if not isinstance(other, ViewingDirection):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())


def _wrap_yaw(yaw: float) -> float:
    wrapped = (yaw + 180.0) % 360.0 - 180.0
    # % can return exactly 360.0 for tiny negative inputs due to rounding
    return wrapped if wrapped < 180.0 else -180.0


def great_circle_distance(a: ViewingDirection, b: ViewingDirection) -> float:
    """Central angle between two directions, in degrees within [0, 180].

    Uses the atan2 form, which stays accurate near 0 and 180 where the
    plain arccos-of-dot-product form loses precision.
    """
    lat1, lat2 = math.radians(a.pitch), math.radians(b.pitch)
    dlon = math.radians(b.yaw - a.yaw)
    cos_lat1, sin_lat1 = math.cos(lat1), math.sin(lat1)
    cos_lat2, sin_lat2 = math.cos(lat2), math.sin(lat2)
    cos_dlon, sin_dlon = math.cos(dlon), math.sin(dlon)
    y = math.hypot(
        cos_lat2 * sin_dlon,
        cos_lat1 * sin_lat2 - sin_lat1 * cos_lat2 * cos_dlon,
    )
    x = sin_lat1 * sin_lat2 + cos_lat1 * cos_lat2 * cos_dlon
    return math.degrees(math.atan2(y, x))


def direction_to_unit_vector(d: ViewingDirection) -> np.ndarray:
    """Unit 3-vector for a direction under the module's axis convention."""
    yaw, pitch = math.radians(d.yaw), math.radians(d.pitch)
    cp = math.cos(pitch)
    return np.array([cp * math.cos(yaw), cp * math.sin(yaw), math.sin(pitch)])


def unit_vector_to_direction(v: np.ndarray) -> ViewingDirection:
    """Inverse of direction_to_unit_vector; accepts any nonzero vector."""
    x, y, z = float(v[0]), float(v[1]), float(v[2])
    norm = math.sqrt(x * x + y * y + z * z)
    if norm == 0.0:
        raise ValueError("zero vector has no direction")
    pitch = math.degrees(math.asin(max(-1.0, min(1.0, z / norm))))
    yaw = math.degrees(math.atan2(y, x))
    return ViewingDirection(yaw=yaw, pitch=pitch)


@dataclass(frozen=True)
class EquirectFrame:
    """One equirectangular frame; pixels are row-major (H, W[, C])."""

    width: int
    height: int
    pixels: np.ndarray
    frame_id: int = 0

    def __post_init__(self):
        if self.width != 2 * self.height:
            raise ValueError(
                f"equirectangular frame must be 2:1, got {self.width}x{self.height}"
            )
        if self.frame_id < 0:
            raise ValueError(f"frame_id {self.frame_id} < 0")
        if self.pixels.shape[:2] != (self.height, self.width):
            raise ValueError(
                f"pixel array {self.pixels.shape} does not match "
                f"{self.width}x{self.height}"
            )


@dataclass(frozen=True)
class CubemapFaces:
    """Six square views keyed front/back/left/right/up/down."""

    faces: dict = field(default_factory=dict)
    face_size: int = 0

    def __post_init__(self):
        if set(self.faces) != set(FACE_NAMES):
            raise ValueError(f"expected faces {FACE_NAMES}, got {sorted(self.faces)}")
        for name, img in self.faces.items():
            if img.shape[:2] != (self.face_size, self.face_size):
                raise ValueError(
                    f"face {name} is {img.shape[:2]}, not "
                    f"{self.face_size}x{self.face_size}"
                )


def sample_equirect(frame: EquirectFrame, yaw_deg: np.ndarray, pitch_deg: np.ndarray,
                    mode: str = "bilinear") -> np.ndarray:
    """Sample the frame at arbitrary directions (degrees, any array shape).

    Columns wrap around the yaw seam; rows clamp at the poles. Bilinear
    is the default; nearest exists for tests that need exact texels.
    """
    h, w = frame.height, frame.width
    pix = np.asarray(frame.pixels, dtype=np.float64)
    x = (np.asarray(yaw_deg, dtype=np.float64) + 180.0) / 360.0 * w - 0.5
    y = (90.0 - np.asarray(pitch_deg, dtype=np.float64)) / 180.0 * h - 0.5
    if mode == "nearest":
        c = np.mod(np.rint(x).astype(np.int64), w)
        r = np.clip(np.rint(y).astype(np.int64), 0, h - 1)
        return pix[r, c]
    if mode != "bilinear":
        raise ValueError(f"unknown sampling mode {mode!r}")
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    fx = x - x0
    fy = y - y0
    if pix.ndim == 3:
        fx = fx[..., None]
        fy = fy[..., None]
    c0 = np.mod(x0, w)
    c1 = np.mod(x0 + 1, w)
    r0 = np.clip(y0, 0, h - 1)
    r1 = np.clip(y0 + 1, 0, h - 1)
    top = pix[r0, c0] * (1.0 - fx) + pix[r0, c1] * fx
    bot = pix[r1, c0] * (1.0 - fx) + pix[r1, c1] * fx
    return top * (1.0 - fy) + bot * fy


def _camera_basis(center: ViewingDirection):
    """No-roll camera basis (forward, right, up) at the given direction."""
    yaw, pitch = math.radians(center.yaw), math.radians(center.pitch)
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch), math.sin(pitch)
    forward = np.array([cp * cy, cp * sy, sp])
    right = np.array([-sy, cy, 0.0])
    up = np.array([-sp * cy, -sp * sy, cp])
    return forward, right, up


def _project_perspective(frame: EquirectFrame, center: ViewingDirection,
                         tan_half_w: float, tan_half_h: float,
                         out_w: int, out_h: int, mode: str) -> np.ndarray:
    forward, right, up = _camera_basis(center)
    u = (np.arange(out_w) + 0.5) / out_w * 2.0 - 1.0
    v = (np.arange(out_h) + 0.5) / out_h * 2.0 - 1.0
    uu, vv = np.meshgrid(u * tan_half_w, v * tan_half_h)
    rays = (forward[None, None, :]
            + uu[..., None] * right[None, None, :]
            - vv[..., None] * up[None, None, :])
    norm = np.linalg.norm(rays, axis=-1, keepdims=True)
    rays = rays / norm
    yaw = np.degrees(np.arctan2(rays[..., 1], rays[..., 0]))
    pitch = np.degrees(np.arcsin(np.clip(rays[..., 2], -1.0, 1.0)))
    return sample_equirect(frame, yaw, pitch, mode=mode)


def extract_viewport(frame: EquirectFrame, center: ViewingDirection,
                     fov_deg: float, out_w: int, out_h: int,
                     mode: str = "bilinear") -> np.ndarray:
    """Perspective (gnomonic) view centered on `center`.

    `fov_deg` is the horizontal field of view; the vertical extent follows
    from the output aspect ratio (square pixels). The ray through the
    output center is exactly `center`, so with odd output dimensions the
    middle pixel samples the equirectangular location of `center`.
    """
    if not 0.0 < fov_deg < 180.0:
        raise ValueError(f"fov {fov_deg} outside (0, 180)")
    if out_w < 1 or out_h < 1:
        raise ValueError("output dimensions must be >= 1")
    tan_half_w = math.tan(math.radians(fov_deg) / 2.0)
    tan_half_h = tan_half_w * out_h / out_w
    return _project_perspective(frame, center, tan_half_w, tan_half_h,
                                out_w, out_h, mode)


def equirect_to_cubemap(frame: EquirectFrame, face_size: int,
                        mode: str = "bilinear") -> CubemapFaces:
    """Resample a frame into six 90-degree perspective faces.

    Each face equals extract_viewport at the face center with a 90-degree
    FoV and square output; seams between adjacent faces therefore agree
    up to interpolation error.
    """
    if face_size < 1:
        raise ValueError("face_size must be >= 1")
    faces = {}
    for name in FACE_NAMES:
        yaw, pitch = _FACE_CENTERS[name]
        center = ViewingDirection(yaw=yaw, pitch=pitch)
        faces[name] = _project_perspective(frame, center, 1.0, 1.0,
                                           face_size, face_size, mode)
    return CubemapFaces(faces=faces, face_size=face_size)
