import math

import numpy as np
import pytest

from pfcspectral.grid import GridSpec, make_symbols, slab_layout, wavenumbers


def grid1d(n, L):
    return GridSpec((n, 1, 1), (L, 1.0, 1.0))


class TestWavenumbers:
    def test_even_ordering(self):
        k = wavenumbers(grid1d(4, 2 * math.pi), 0)
        np.testing.assert_allclose(k, [0, 1, -2, -1], atol=1e-15)

    def test_single_mode(self):
        np.testing.assert_array_equal(wavenumbers(grid1d(1, 7.3), 0), [0.0])

    def test_odd_scaled(self):
        k = wavenumbers(grid1d(5, math.pi), 0)
        np.testing.assert_allclose(k, [0, 2, 4, -4, -2], atol=1e-13)

    @pytest.mark.parametrize("n", range(1, 17))
    def test_sum_symmetry(self, n):
        L = 3.7
        k = wavenumbers(grid1d(n, L), 0)
        expected = -(n // 2) * (2 * math.pi / L) if n % 2 == 0 else 0.0
        assert abs(k.sum() - expected) < 1e-12 * max(1.0, abs(expected))

    def test_bad_axis(self):
        with pytest.raises(ValueError):
            wavenumbers(grid1d(4, 1.0), 3)


class TestSlabLayout:
    def test_even_split(self):
        lay = slab_layout(8, 4)
        assert lay.counts == (2, 2, 2, 2)
        assert lay.offsets == (0, 2, 4, 6)

    def test_remainder_to_first(self):
        lay = slab_layout(7, 4)
        assert lay.counts == (2, 2, 2, 1)
        assert lay.offsets == (0, 2, 4, 6)

    def test_more_workers_than_planes(self):
        assert slab_layout(2, 4).counts == (1, 1, 0, 0)

    @pytest.mark.parametrize("n,g", [(1, 1), (5, 2), (16, 3), (3, 7), (12, 4)])
    def test_partition_covers_range(self, n, g):
        lay = slab_layout(n, g)
        covered = []
        for rank in range(g):
            covered.extend(range(lay.start(rank), lay.stop(rank)))
        assert covered == list(range(n))

    def test_rejects_zero_workers(self):
        with pytest.raises(ValueError):
            slab_layout(4, 0)


class TestSymbols:
    def setup_method(self):
        # L = 2*pi so integer wavenumbers; k^2 = 1 and 4/3 not on this
        # grid, checked separately with a commensurate domain
        self.grid = GridSpec((8, 8, 8), (2 * math.pi,) * 3)
        self.sym = make_symbols(self.grid, eps=-0.3, a0=1.0)

    def test_zero_mode_values(self):
        assert self.sym.two_ring[0, 0, 0] == pytest.approx(16.0 / 9.0, rel=1e-15)
        assert self.sym.lap[0, 0, 0] == 0.0
        assert self.sym.linear[0, 0, 0] == 0.0
        assert self.sym.cg[0, 0, 0] == 1.0
        assert self.sym.d1[0, 0, 0] == 0.0
        assert self.sym.d2[0, 0, 0] == 0.0
        assert self.sym.d3[0, 0, 0] == 0.0

    def test_marginal_rings_vanish(self):
        # domain commensurate with both rings: k = m/sqrt(3)
        grid = GridSpec((12, 12, 12), (2 * math.pi * math.sqrt(3),) * 3)
        sym = make_symbols(grid, eps=0.0)
        # mode (1,1,1)/sqrt(3): k^2 = 1
        assert sym.two_ring[1, 1, 1] == pytest.approx(0.0, abs=1e-25)
        # mode (2,0,0)/sqrt(3): k^2 = 4/3
        assert sym.two_ring[2, 0, 0] == pytest.approx(0.0, abs=1e-25)

    def test_lin_is_lap_times_op(self):
        np.testing.assert_array_equal(self.sym.linear,
                                      self.sym.lap * self.sym.op)

    def test_lap_nonpositive_cg_bounded(self):
        assert np.all(self.sym.lap <= 0.0)
        assert np.all(self.sym.cg > 0.0) and np.all(self.sym.cg <= 1.0)

    def test_cg_monotone_in_k2(self):
        k2 = -self.sym.lap.ravel()
        cg = self.sym.cg.ravel()
        order = np.argsort(k2)
        assert np.all(np.diff(cg[order]) <= 1e-15)

    def test_derivative_symbols_imaginary(self):
        for d in (self.sym.d1, self.sym.d2, self.sym.d3):
            assert np.all(d.real == 0.0)

    def test_slab_restriction(self):
        lay = slab_layout(8, 3, axis=0)
        parts = [make_symbols(self.grid, -0.3, layout=lay, rank=r).lap
                 for r in range(3)]
        np.testing.assert_array_equal(np.concatenate(parts, axis=0),
                                      self.sym.lap)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            make_symbols(self.grid, eps=math.nan)
        with pytest.raises(ValueError):
            make_symbols(self.grid, eps=0.0, a0=0.0)


class TestGridSpec:
    def test_rejects_bad_sizes(self):
        with pytest.raises(ValueError):
            GridSpec((0, 4, 4), (1.0, 1.0, 1.0))
        with pytest.raises(ValueError):
            GridSpec((4, 4, 4), (1.0, -1.0, 1.0))

    def test_2d_flag_and_volume(self):
        g = GridSpec((8, 4, 1), (2.0, 3.0, 99.0))
        assert g.is_2d
        assert g.volume == pytest.approx(6.0)
        assert g.cell_volume == pytest.approx(6.0 / 32)
