import numpy as np
import pytest

from jndattack.tensor_io import (
    PnmHeaderError,
    PnmMaxvalError,
    PnmTruncatedError,
    load_pnm,
    round_half_away,
    save_pnm,
    to_grayscale,
)


def test_load_p5(tmp_path):
    path = tmp_path / "a.pgm"
    path.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 255, 128, 64]))
    img = load_pnm(path)
    assert img.shape == (2, 2, 1)
    assert img.ravel().tolist() == [0.0, 255.0, 128.0, 64.0]


def test_load_p6_single_pixel(tmp_path):
    path = tmp_path / "a.ppm"
    path.write_bytes(b"P6\n1 1\n255\n" + bytes([10, 20, 30]))
    img = load_pnm(path)
    assert img.shape == (1, 1, 3)
    assert img.ravel().tolist() == [10.0, 20.0, 30.0]


def test_load_ascii_variants_with_comments(tmp_path):
    p2 = tmp_path / "a2.pgm"
    p2.write_bytes(b"P2\n# comment\n3 1\n255\n7 8 9\n")
    assert load_pnm(p2).ravel().tolist() == [7.0, 8.0, 9.0]
    p3 = tmp_path / "a3.ppm"
    p3.write_bytes(b"P3 1 2 255\n1 2 3  4 5 6")
    assert load_pnm(p3).shape == (2, 1, 3)


def test_truncated_payload(tmp_path):
    path = tmp_path / "t.pgm"
    path.write_bytes(b"P5\n2 2\n255\n" + bytes([1, 2, 3]))
    with pytest.raises(PnmTruncatedError):
        load_pnm(path)


def test_bad_maxval(tmp_path):
    path = tmp_path / "m.pgm"
    path.write_bytes(b"P5\n1 1\n254\n\x00")
    with pytest.raises(PnmMaxvalError):
        load_pnm(path)


def test_bad_magic_and_header(tmp_path):
    path = tmp_path / "x.pgm"
    path.write_bytes(b"P7\n1 1\n255\n\x00")
    with pytest.raises(PnmHeaderError):
        load_pnm(path)
    path.write_bytes(b"P5\n1 -1\n255\n\x00")
    with pytest.raises(PnmHeaderError):
        load_pnm(path)


def test_round_trip_integer_tensor(tmp_path, rng):
    img = np.floor(rng.uniform(0, 256, (7, 5, 3))).clip(0, 255)
    path = tmp_path / "rt.ppm"
    save_pnm(img, path)
    assert np.array_equal(load_pnm(path), img)


def test_rounding_half_away(tmp_path):
    path = tmp_path / "r.pgm"
    save_pnm(np.array([[[127.5]], [[127.4]]]), path)
    assert load_pnm(path).ravel().tolist() == [128.0, 127.0]
    assert round_half_away(np.array([0.5, 1.5, 2.4])).tolist() == [1.0, 2.0, 2.0]


def test_save_rejects_out_of_range(tmp_path):
    with pytest.raises(ValueError):
        save_pnm(np.full((2, 2, 1), 256.0), tmp_path / "bad.pgm")


def test_grayscale_weights():
    gray = to_grayscale(np.full((2, 2, 3), 37.0))
    assert np.allclose(gray, 37.0)
    assert np.allclose(to_grayscale(np.full((1, 1, 3), 255.0)), 255.0)
    red = np.zeros((1, 1, 3))
    red[0, 0, 0] = 255.0
    assert np.allclose(to_grayscale(red), 76.245)


def test_grayscale_identity_for_single_channel(rng):
    img = rng.uniform(0, 255, (4, 4, 1))
    assert np.array_equal(to_grayscale(img), img[:, :, 0])


def test_grayscale_linearity(rng):
    x = rng.uniform(0, 120, (5, 5, 3))
    y = rng.uniform(0, 120, (5, 5, 3))
    lhs = to_grayscale(0.25 * x + 2.0 * y)
    rhs = 0.25 * to_grayscale(x) + 2.0 * to_grayscale(y)
    assert np.allclose(lhs, rhs, atol=1e-12)
