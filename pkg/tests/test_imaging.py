import os
import tempfile

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from visarith.imaging import Image, add_gaussian_noise, mse, new_image, read_pgm, write_pgm
from visarith.exceptions import UnsupportedFormatError


def test_new_image_black():
    img = new_image(15, 60, 0.0)
    assert img.shape == (15, 60)
    assert not img.pixels.any()


def test_new_image_single_white_pixel():
    img = new_image(1, 1, 1.0)
    assert img.pixels.tolist() == [[1.0]]


def test_new_image_mid_gray_sum():
    assert new_image(15, 60, 0.5).pixels.sum() == 450.0


@pytest.mark.parametrize("fill", [-0.1, 1.5, float("nan")])
def test_new_image_rejects_out_of_range(fill):
    with pytest.raises(ValueError):
        new_image(2, 2, fill)


def test_image_rejects_bad_shapes():
    with pytest.raises(ValueError):
        Image(np.zeros(4))
    with pytest.raises(ValueError):
        new_image(0, 3)


def test_pixels_are_read_only():
    img = new_image(2, 2)
    with pytest.raises(ValueError):
        img.pixels[0, 0] = 1.0


def test_zero_noise_returns_input(rng):
    img = new_image(3, 3, 0.25)
    assert add_gaussian_noise(img, 0.0, rng) == img


def test_noise_std_matches_sigma():
    img = new_image(100, 100, 0.5)
    noisy = add_gaussian_noise(img, 0.3, np.random.default_rng(7))
    assert abs(noisy.pixels.std() - 0.3) < 0.03


def test_huge_noise_saturates_within_bounds(rng):
    noisy = add_gaussian_noise(new_image(20, 20, 0.5), 10.0, rng)
    px = noisy.pixels
    assert px.min() >= 0.0 and px.max() <= 1.0
    assert np.mean((px == 0.0) | (px == 1.0)) > 0.9


def test_noise_rejects_negative_sigma(rng):
    with pytest.raises(ValueError):
        add_gaussian_noise(new_image(1, 1), -1.0, rng)


@pytest.mark.parametrize(
    "a, b, expected",
    [(0.0, 0.0, 0.0), (0.0, 1.0, 1.0), (0.0, 0.5, 0.25)],
)
def test_mse_constants(a, b, expected):
    assert mse(new_image(4, 5, a), new_image(4, 5, b)) == expected


def test_mse_shape_mismatch():
    with pytest.raises(ValueError):
        mse(new_image(2, 2), new_image(2, 3))


def test_pgm_white_2x2_bytes(tmp_path):
    path = tmp_path / "w.pgm"
    write_pgm(new_image(2, 2, 1.0), path)
    assert path.read_bytes() == b"P5\n2 2\n255\n" + b"\xff" * 4


def test_pgm_quantizes(tmp_path):
    img = Image(np.array([[0.1, 0.5], [0.9, 1.0]]))
    write_pgm(img, tmp_path / "q.pgm")
    back = read_pgm(tmp_path / "q.pgm")
    assert np.allclose(back.pixels, np.rint(img.pixels * 255) / 255)


def test_pgm_reads_comments_and_whitespace(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5 # made by hand\n3\n# width above\n1 255\n\x00\x80\xff")
    assert read_pgm(path).pixels.tolist() == [[0.0, 128 / 255, 1.0]]


@pytest.mark.parametrize(
    "payload",
    [b"P2\n1 1\n255\n0", b"P5\n2 2\n255\n\x00", b"P5\n1 1\n65535\n\x00\x00", b"", b"P5\n1 1\n255\n\x00\x00"],
)
def test_pgm_rejects_malformed(tmp_path, payload):
    path = tmp_path / "bad.pgm"
    path.write_bytes(payload)
    with pytest.raises(UnsupportedFormatError):
        read_pgm(path)


grid_images = arrays(
    np.uint8,
    st.tuples(st.integers(1, 12), st.integers(1, 12)),
).map(lambda a: Image(a / 255.0))


@given(grid_images)
def test_pgm_round_trip_on_grid(img):
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "x.pgm")
        write_pgm(img, path)
        back = read_pgm(path)
        assert back == img
        write_pgm(back, path + "2")
        assert open(path, "rb").read() == open(path + "2", "rb").read()


@given(arrays(np.float64, (5, 7), elements=st.floats(0, 1)), arrays(np.float64, (5, 7), elements=st.floats(0, 1)))
def test_mse_symmetric_and_zero_on_identity(a, b):
    ia, ib = Image(a), Image(b)
    assert mse(ia, ib) == pytest.approx(mse(ib, ia))
    assert mse(ia, ia) == 0.0
