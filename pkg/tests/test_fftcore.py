import numpy as np
import pytest

from pfcspectral.fftcore import fft_2d, fft_axis, fft_nd

from oracles import dft_axis, dft_nd


def rand(shape, seed=0):
    rng = np.random.default_rng(seed)
    return (rng.standard_normal(shape)
            + 1j * rng.standard_normal(shape)).astype(np.complex128)


def rel(a, b):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300)


class TestFftAxis:
    def test_delta_to_constant(self):
        x = np.zeros((4, 1, 1), dtype=np.complex128)
        x[0] = 1.0
        np.testing.assert_allclose(fft_axis(x, 0), np.ones((4, 1, 1)),
                                   atol=1e-15)

    def test_constant_to_dc(self):
        c = 2.5 - 0.5j
        x = np.full((4, 1, 1), c)
        out = fft_axis(x, 0)
        assert out[0, 0, 0] == pytest.approx(4 * c)
        np.testing.assert_allclose(out[1:], 0.0, atol=1e-14)

    def test_prime_length_matches_oracle(self):
        x = rand((7, 1, 1), seed=3)
        assert rel(fft_axis(x, 0), dft_axis(x, 0)) <= 1e-12

    def test_axis_out_of_range(self):
        with pytest.raises(ValueError):
            fft_axis(rand((4, 4, 1)), 3)


class TestFft2d:
    def test_plane_delta(self):
        x = np.zeros((4, 4, 1), dtype=np.complex128)
        x[0, 0, 0] = 1.0
        np.testing.assert_allclose(fft_2d(x), np.ones((4, 4, 1)), atol=1e-14)

    def test_separable_outer_product(self):
        a = rand((5, 1, 1), seed=1)
        b = rand((1, 6, 1), seed=2)
        got = fft_2d(a * b)
        want = fft_axis(a, 0) * fft_axis(b, 1)
        assert rel(got, want) <= 1e-13

    def test_matches_oracle_per_plane(self):
        x = rand((5, 6, 2), seed=4)
        want = dft_axis(dft_axis(x, 0), 1)
        assert rel(fft_2d(x), want) <= 1e-12


class TestFftNd:
    def test_cube_delta(self):
        x = np.zeros((2, 2, 2), dtype=np.complex128)
        x[0, 0, 0] = 1.0
        np.testing.assert_allclose(fft_nd(x), np.ones((2, 2, 2)), atol=1e-15)

    def test_round_trip(self):
        x = rand((6, 5, 4), seed=5)
        back = fft_nd(fft_nd(x), forward=False)
        assert np.max(np.abs(back - x)) <= 1e-12 * np.max(np.abs(x))

    def test_parseval(self):
        x = rand((8, 8, 8), seed=6)
        X = fft_nd(x)
        lhs = np.sum(np.abs(x) ** 2)
        rhs = np.sum(np.abs(X) ** 2) / x.size
        assert abs(lhs - rhs) <= 1e-12 * lhs

    def test_matches_oracle(self):
        x = rand((3, 5, 7), seed=7)
        assert rel(fft_nd(x), dft_nd(x)) <= 1e-12


@pytest.mark.parametrize("n", range(1, 17))
def test_all_lengths_round_trip_and_parseval(n):
    x = rand((n, 1, 1), seed=n)
    X = fft_axis(x, 0)
    back = fft_axis(X, 0, forward=False)
    assert np.max(np.abs(back - x)) <= 1e-12 * np.max(np.abs(x))
    assert abs(np.sum(np.abs(x) ** 2)
               - np.sum(np.abs(X) ** 2) / n) <= 1e-12 * np.sum(np.abs(x) ** 2)
    assert rel(X, dft_axis(x, 0)) <= 1e-12


@pytest.mark.parametrize("seed", range(4))
def test_linearity(seed):
    rng = np.random.default_rng(100 + seed)
    x, y = rand((6, 5, 3), seed), rand((6, 5, 3), seed + 50)
    a = complex(rng.standard_normal(), rng.standard_normal())
    b = complex(rng.standard_normal(), rng.standard_normal())
    got = fft_nd(a * x + b * y)
    want = a * fft_nd(x) + b * fft_nd(y)
    assert rel(got, want) <= 1e-12


def test_real_even_transform_is_real():
    n = 12
    rng = np.random.default_rng(8)
    half = rng.standard_normal(n // 2 - 1)
    line = np.zeros(n)
    line[1:n // 2] = half
    line[n // 2 + 1:] = half[::-1]
    line[0] = rng.standard_normal()
    line[n // 2] = rng.standard_normal()
    X = fft_axis(line.astype(np.complex128)[:, None, None], 0)
    assert np.max(np.abs(X.imag)) <= 1e-12
