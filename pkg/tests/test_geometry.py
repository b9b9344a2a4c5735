import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvvp360.geometry import (FACE_NAMES, CubemapFaces, EquirectFrame,
                              ViewingDirection, direction_to_unit_vector,
                              equirect_to_cubemap, extract_viewport,
                              great_circle_distance, sample_equirect,
                              unit_vector_to_direction)

directions = st.builds(
    ViewingDirection,
    yaw=st.floats(min_value=-180.0, max_value=180.0),
    pitch=st.floats(min_value=-90.0, max_value=90.0),
)


def texel_center(col, row, width, height):
    yaw = (col + 0.5) / width * 360.0 - 180.0
    pitch = 90.0 - (row + 0.5) / height * 180.0
    return ViewingDirection(yaw, pitch)


class TestViewingDirection:
    def test_yaw_wraps_into_range(self):
        assert ViewingDirection(270.0, 0.0).yaw == -90.0
        assert ViewingDirection(-350.0, 0.0).yaw == 10.0
        assert ViewingDirection(180.0, 0.0).yaw == -180.0

    def test_pitch_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            ViewingDirection(0.0, 95.0)
        with pytest.raises(ValueError):
            ViewingDirection(0.0, -90.5)

    def test_pole_equality_ignores_yaw(self):
        assert ViewingDirection(0, 90) == ViewingDirection(137, 90)
        assert hash(ViewingDirection(0, 90)) == hash(ViewingDirection(137, 90))
        assert ViewingDirection(0, 90) != ViewingDirection(0, -90)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            ViewingDirection(float("nan"), 0.0)


class TestGreatCircleDistance:
    def test_identical_points(self):
        assert great_circle_distance(ViewingDirection(0, 0),
                                     ViewingDirection(0, 0)) == 0.0

    def test_antipodal(self):
        assert great_circle_distance(ViewingDirection(0, 0),
                                     ViewingDirection(180, 0)) == 180.0

    def test_both_at_north_pole(self):
        d = great_circle_distance(ViewingDirection(0, 90),
                                  ViewingDirection(137, 90))
        assert d == pytest.approx(0.0, abs=1e-9)

    def test_yaw_wraparound_seam(self):
        d = great_circle_distance(ViewingDirection(179.9, 0),
                                  ViewingDirection(-179.9, 0))
        assert d < 0.3

    @given(directions, directions)
    def test_symmetry(self, a, b):
        assert great_circle_distance(a, b) == pytest.approx(
            great_circle_distance(b, a), abs=1e-9)

    @given(directions)
    def test_identity(self, a):
        assert great_circle_distance(a, a) == 0.0

    @given(directions, directions)
    def test_range(self, a, b):
        assert 0.0 <= great_circle_distance(a, b) <= 180.0

    @given(directions, directions, directions)
    def test_triangle_inequality(self, a, b, c):
        assert great_circle_distance(a, c) <= (
            great_circle_distance(a, b) + great_circle_distance(b, c) + 1e-9)

    @given(st.floats(min_value=-180, max_value=180),
           st.floats(min_value=-180, max_value=180))
    def test_pole_degeneracy(self, yaw1, yaw2):
        d = great_circle_distance(ViewingDirection(yaw1, 90),
                                  ViewingDirection(yaw2, 90))
        assert d == pytest.approx(0.0, abs=1e-9)


class TestUnitVectors:
    def test_reference_axes(self):
        np.testing.assert_allclose(
            direction_to_unit_vector(ViewingDirection(0, 0)), [1, 0, 0],
            atol=1e-12)
        np.testing.assert_allclose(
            direction_to_unit_vector(ViewingDirection(0, 90)), [0, 0, 1],
            atol=1e-12)
        np.testing.assert_allclose(
            direction_to_unit_vector(ViewingDirection(90, 0)), [0, 1, 0],
            atol=1e-12)

    def test_round_trip_example(self):
        d = ViewingDirection(37.5, -12.25)
        back = unit_vector_to_direction(direction_to_unit_vector(d))
        assert great_circle_distance(d, back) < 1e-9

    @given(st.floats(min_value=-180, max_value=180),
           st.floats(min_value=-89.9, max_value=89.9))
    def test_round_trip_away_from_poles(self, yaw, pitch):
        d = ViewingDirection(yaw, pitch)
        back = unit_vector_to_direction(direction_to_unit_vector(d))
        assert great_circle_distance(d, back) < 1e-9

    @given(directions)
    def test_unit_norm(self, d):
        assert np.linalg.norm(direction_to_unit_vector(d)) == pytest.approx(1.0)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            unit_vector_to_direction(np.zeros(3))


def smooth_frame(width=128, height=64):
    """A frame whose value varies smoothly with direction."""
    cols = (np.arange(width) + 0.5) / width * 2 * math.pi - math.pi
    rows = math.pi / 2 - (np.arange(height) + 0.5) / height * math.pi
    yy, pp = np.meshgrid(cols, rows)
    pixels = 0.5 + 0.25 * np.sin(yy) * np.cos(pp) + 0.25 * np.sin(pp)
    return EquirectFrame(width=width, height=height, pixels=pixels)


class TestFrameTypes:
    def test_aspect_enforced(self):
        with pytest.raises(ValueError):
            EquirectFrame(width=100, height=60, pixels=np.zeros((60, 100)))

    def test_negative_frame_id_rejected(self):
        with pytest.raises(ValueError):
            EquirectFrame(width=4, height=2, pixels=np.zeros((2, 4)),
                          frame_id=-1)

    def test_cubemap_requires_six_square_faces(self):
        faces = {name: np.zeros((4, 4)) for name in FACE_NAMES}
        CubemapFaces(faces=faces, face_size=4)
        with pytest.raises(ValueError):
            CubemapFaces(faces={k: v for k, v in list(faces.items())[:5]},
                         face_size=4)
        bad = dict(faces)
        bad["up"] = np.zeros((3, 4))
        with pytest.raises(ValueError):
            CubemapFaces(faces=bad, face_size=4)


class TestCubemap:
    def test_constant_frame_gives_constant_faces(self):
        frame = EquirectFrame(width=32, height=16,
                              pixels=np.full((16, 32), 0.37))
        cube = equirect_to_cubemap(frame, face_size=8)
        for name in FACE_NAMES:
            np.testing.assert_allclose(cube.faces[name], 0.37, atol=1e-12)

    def test_center_marker_lands_on_front_face_only(self):
        # a 2x2 white block around the continuous image center interpolates
        # to exactly 1.0 at yaw 0 / pitch 0
        w, h = 64, 32
        pixels = np.zeros((h, w))
        pixels[h // 2 - 1:h // 2 + 1, w // 2 - 1:w // 2 + 1] = 1.0
        frame = EquirectFrame(width=w, height=h, pixels=pixels)
        cube = equirect_to_cubemap(frame, face_size=33)
        assert cube.faces["front"][16, 16] == pytest.approx(1.0)
        for name in FACE_NAMES:
            if name != "front":
                assert cube.faces[name].max() == 0.0

    def test_faces_match_viewport_extraction(self):
        frame = smooth_frame()
        cube = equirect_to_cubemap(frame, face_size=16)
        centers = {"front": (0, 0), "back": (180, 0), "left": (-90, 0),
                   "right": (90, 0), "up": (0, 90), "down": (0, -90)}
        for name, (yaw, pitch) in centers.items():
            view = extract_viewport(frame, ViewingDirection(yaw, pitch),
                                    fov_deg=90.0, out_w=16, out_h=16)
            # tan(radians(90)/2) is one ulp under 1, so the rays differ
            # infinitesimally; equality holds to interpolation tolerance
            np.testing.assert_allclose(view, cube.faces[name], atol=1e-9)

    def test_adjacent_faces_agree_at_seam(self):
        frame = smooth_frame()
        cube = equirect_to_cubemap(frame, face_size=64)
        # front's right edge and right's left edge sample half a texel apart
        diff = np.abs(cube.faces["front"][:, -1] - cube.faces["right"][:, 0])
        assert diff.max() < 0.05

    def test_checkerboard_round_trip_psnr(self):
        # independent inverse resampler: pick the dominant-axis face and
        # bilinearly sample it for every equirect texel direction
        def cubemap_to_equirect(cube, width, height):
            face_size = cube.face_size
            bases = {
                "front": (np.array([1.0, 0, 0]), np.array([0, 1.0, 0]),
                          np.array([0, 0, 1.0])),
                "back": (np.array([-1.0, 0, 0]), np.array([0, -1.0, 0]),
                         np.array([0, 0, 1.0])),
                "left": (np.array([0, -1.0, 0]), np.array([1.0, 0, 0]),
                         np.array([0, 0, 1.0])),
                "right": (np.array([0, 1.0, 0]), np.array([-1.0, 0, 0]),
                          np.array([0, 0, 1.0])),
                "up": (np.array([0, 0, 1.0]), np.array([0, 1.0, 0]),
                       np.array([-1.0, 0, 0])),
                "down": (np.array([0, 0, -1.0]), np.array([0, 1.0, 0]),
                         np.array([1.0, 0, 0])),
            }
            out = np.zeros((height, width))
            for row in range(height):
                for col in range(width):
                    d = texel_center(col, row, width, height)
                    v = direction_to_unit_vector(d)
                    axis = np.argmax(np.abs(v))
                    if axis == 0:
                        name = "front" if v[0] > 0 else "back"
                    elif axis == 1:
                        name = "right" if v[1] > 0 else "left"
                    else:
                        name = "up" if v[2] > 0 else "down"
                    fwd, right, up = bases[name]
                    depth = float(v @ fwd)
                    a = float(v @ right) / depth
                    b = float(v @ up) / depth
                    x = (a + 1.0) / 2.0 * face_size - 0.5
                    y = (-b + 1.0) / 2.0 * face_size - 0.5
                    x0, y0 = int(math.floor(x)), int(math.floor(y))
                    fx, fy = x - x0, y - y0
                    img = cube.faces[name]
                    x0c = min(max(x0, 0), face_size - 1)
                    x1c = min(max(x0 + 1, 0), face_size - 1)
                    y0c = min(max(y0, 0), face_size - 1)
                    y1c = min(max(y0 + 1, 0), face_size - 1)
                    out[row, col] = (
                        img[y0c, x0c] * (1 - fx) * (1 - fy)
                        + img[y0c, x1c] * fx * (1 - fy)
                        + img[y1c, x0c] * (1 - fx) * fy
                        + img[y1c, x1c] * fx * fy)
            return out

        w, h = 128, 64
        cols, rows = np.meshgrid(np.arange(w), np.arange(h))
        board = (((cols // 8) + (rows // 8)) % 2).astype(float)
        frame = EquirectFrame(width=w, height=h, pixels=board)
        cube = equirect_to_cubemap(frame, face_size=64)
        back = cubemap_to_equirect(cube, w, h)
        # rows away from the poles: |pitch| < 60 degrees
        keep = slice(h // 6, h - h // 6)
        mse = float(np.mean((back[keep] - board[keep]) ** 2))
        psnr = 10.0 * math.log10(1.0 / mse)
        # frozen regression bound, measured at 22.77 dB on this fixture
        assert psnr > 21.5


class TestViewport:
    def test_invalid_fov_rejected(self):
        frame = smooth_frame()
        for fov in (0.0, 180.0, -10.0):
            with pytest.raises(ValueError):
                extract_viewport(frame, ViewingDirection(0, 0), fov, 8, 8)

    def test_center_pixel_samples_center_direction(self):
        # unique bright texel; viewport centered on that texel's direction
        w, h = 64, 32
        pixels = np.zeros((h, w))
        pixels[10, 40] = 1.0
        frame = EquirectFrame(width=w, height=h, pixels=pixels)
        center = texel_center(40, 10, w, h)
        view = extract_viewport(frame, center, fov_deg=60.0, out_w=33, out_h=33)
        assert view[16, 16] == pytest.approx(1.0)
        assert view[16, 16] == view.max()

    def test_rotated_marker_lands_at_center(self):
        w, h = 64, 32
        pixels = np.zeros((h, w))
        col, row = 48, 16  # texel center at yaw 92.8125, pitch -2.8125
        pixels[row, col] = 1.0
        frame = EquirectFrame(width=w, height=h, pixels=pixels)
        center = texel_center(col, row, w, h)
        view = extract_viewport(frame, center, fov_deg=90.0, out_w=17, out_h=17)
        assert view[8, 8] == pytest.approx(1.0)

    def test_nearest_mode_returns_exact_texels(self):
        frame = smooth_frame(32, 16)
        d = texel_center(5, 7, 32, 16)
        sampled = sample_equirect(frame, np.array(d.yaw), np.array(d.pitch),
                                  mode="nearest")
        assert sampled == frame.pixels[7, 5]

    @settings(max_examples=25, deadline=None)
    @given(st.floats(min_value=-170, max_value=170),
           st.floats(min_value=-45, max_value=45))
    def test_viewport_values_within_frame_range(self, yaw, pitch):
        frame = smooth_frame(64, 32)
        view = extract_viewport(frame, ViewingDirection(yaw, pitch),
                                fov_deg=100.0, out_w=9, out_h=9)
        assert view.min() >= frame.pixels.min() - 1e-12
        assert view.max() <= frame.pixels.max() + 1e-12
