import numpy as np
import pytest

from jndattack.dct import (
    BlockSpectrum,
    block_dct,
    block_idct,
    dct_basis,
    grad_to_freq,
    grad_to_freq_kron,
    pad_to_blocks,
)


def test_basis_first_row_constant():
    d = dct_basis(8)
    assert np.allclose(d[0], np.sqrt(1.0 / 8.0))


def test_basis_b2_matches_hand_value():
    d = dct_basis(2)
    r = np.sqrt(0.5)
    assert np.allclose(d, [[r, r], [r, -r]])


@pytest.mark.parametrize("b", [1, 2, 4, 8, 16])
def test_basis_orthogonal(b):
    d = dct_basis(b)
    assert np.abs(d @ d.T - np.eye(b)).max() < 1e-12


def test_constant_block_dc():
    img = np.full((8, 8), 9.0)
    spec = block_dct(img, dct_basis(8))
    coeffs = spec.coeffs[:, :, 0]
    assert abs(coeffs[0, 0] - 72.0) < 1e-10
    ac = coeffs.copy()
    ac[0, 0] = 0.0
    assert np.abs(ac).max() < 1e-10


def test_zero_image_zero_spectrum():
    spec = block_dct(np.zeros((16, 16, 3)), dct_basis(8))
    assert np.abs(spec.coeffs).max() == 0.0


def test_parseval_per_block(rng):
    d = dct_basis(8)
    img = rng.uniform(0, 255, (8, 8))
    spec = block_dct(img, d)
    assert np.isclose(np.sum(img**2), np.sum(spec.coeffs**2), rtol=1e-8)


def test_round_trip_and_padding(rng):
    d = dct_basis(8)
    for shape in ((32, 32, 3), (10, 13, 1), (8, 8, 3), (9, 25, 3)):
        img = rng.uniform(0, 255, shape)
        spec = block_dct(img, d)
        assert spec.coeffs.shape[0] % 8 == 0 and spec.coeffs.shape[1] % 8 == 0
        rec = block_idct(spec, d)
        assert rec.shape == img.shape
        assert np.abs(rec - img).max() < 1e-9


def test_spectrum_with_only_dc_reconstructs_constant():
    d = dct_basis(8)
    coeffs = np.zeros((8, 8, 1))
    coeffs[0, 0, 0] = 8.0 * 3.5
    rec = block_idct(BlockSpectrum(coeffs, 8, (8, 8, 1)), d)
    assert np.allclose(rec, 3.5, atol=1e-12)


def test_linearity(rng):
    d = dct_basis(8)
    x = rng.normal(size=(16, 8, 2))
    y = rng.normal(size=(16, 8, 2))
    lhs = block_dct(2.0 * x + 3.0 * y, d).coeffs
    rhs = 2.0 * block_dct(x, d).coeffs + 3.0 * block_dct(y, d).coeffs
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_grad_to_freq_zero():
    assert np.abs(grad_to_freq(np.zeros((8, 8, 1)), dct_basis(8)).coeffs).max() == 0.0


def test_grad_to_freq_b2_against_explicit_kronecker():
    d = dct_basis(2)
    g = np.zeros((2, 2, 1))
    g[0, 0, 0] = 1.0
    got = grad_to_freq(g, d).coeffs[:, :, 0]
    # hand-built 4x4 Kronecker matrix, column-major vectorization
    kron = np.zeros((4, 4))
    dt = d.T
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    kron[2 * j + i, 2 * l + k] = dt[i, k] * dt[j, l]
    want = (g[:, :, 0].flatten(order="F") @ kron).reshape((2, 2), order="F")
    assert np.allclose(got, want, atol=1e-14)


def test_kron_and_blockwise_routes_agree(rng):
    d = dct_basis(8)
    g = rng.normal(size=(24, 16, 3))
    a = grad_to_freq(g, d).coeffs
    b = grad_to_freq_kron(g, d).coeffs
    assert np.abs(a - b).max() < 1e-10


def test_grad_to_freq_is_adjoint_of_idct(rng):
    d = dct_basis(8)
    for shape in ((16, 16, 3), (10, 13, 2)):
        g = rng.normal(size=shape)
        gf = grad_to_freq(g, d)
        dx = rng.normal(size=gf.coeffs.shape)
        spec = BlockSpectrum(dx, 8, shape)
        lhs = float(np.sum(gf.coeffs * dx))
        rhs = float(np.sum(g * block_idct(spec, d)))
        assert abs(lhs - rhs) < 1e-9


def test_pad_modes(rng):
    img = rng.uniform(0, 255, (5, 5, 1))
    edge = pad_to_blocks(img, 4, mode="edge")
    zero = pad_to_blocks(img, 4, mode="constant")
    assert edge.shape == (8, 8, 1)
    assert edge[7, 0, 0] == img[4, 0, 0]
    assert zero[7, 7, 0] == 0.0


def test_basis_validation():
    with pytest.raises(ValueError):
        dct_basis(0)
