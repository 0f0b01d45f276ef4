import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gawq import (
    ChainConfig,
    build_aah_matrix,
    build_effective_model,
    butterfly_assemble,
    decay_variance,
    decompose,
    derive_couplings,
    eigensystem,
    find_dips,
    ipr_decay,
    localization_report,
    localization_sweep,
    loss_corrected_metrics,
    parse_config,
    spectrum,
)
from gawq.analysis import (
    Dip,
    band_clusters,
    band_count,
    butterfly_betas,
    center_band_window,
    default_delta_grid,
)
from gawq.scattering import SpectrumGrid


def closed_form_grid(delta, T):
    t = np.sqrt(np.asarray(T, dtype=float)).astype(complex)
    return SpectrumGrid(np.asarray(delta, dtype=float), t, np.sqrt(1 - T).astype(complex))


class TestMetrics:
    def test_equal_widths(self):
        assert decay_variance(np.full(5, 0.02), 0.02) == 0.0
        assert ipr_decay(np.full(5, 0.02), 0.02) == pytest.approx(1 / 5, rel=1e-14)

    def test_two_mode_arithmetic(self):
        g = 0.01
        assert decay_variance(np.array([0.0, 2 * g]), g) == pytest.approx(g * g, rel=1e-14)

    def test_all_decay_in_one_mode(self):
        n, g = 7, 0.3
        widths = np.zeros(n)
        widths[2] = n * g
        assert ipr_decay(widths, g) == pytest.approx(1.0, rel=1e-14)

    def test_loss_free_correction_is_identity(self, quarter_cfg):
        g = derive_couplings(quarter_cfg).gamma_eff
        m = decompose(build_effective_model(quarter_cfg))
        assert loss_corrected_metrics(m, g, 0.0) == (decay_variance(m, g), ipr_decay(m, g))

    @settings(max_examples=20, deadline=None)
    @given(v0=st.floats(0, 4), gamma0=st.floats(1e-5, 1e-2))
    def test_variance_unchanged_by_loss(self, v0, gamma0):
        cfg = parse_config({"n": 24, "gamma": 1.0, "delta": 0.1, "beta": "golden"}).replace(v0=v0)
        rep = localization_report(cfg.replace(gamma0=gamma0))
        assert rep.sigma2_lossy == pytest.approx(rep.sigma2, rel=1e-12, abs=1e-30)

    @settings(max_examples=20, deadline=None)
    @given(v0=st.floats(0, 4), n=st.integers(2, 40))
    def test_ipr_decay_bounds(self, v0, n):
        rep = localization_report(ChainConfig(n=n, gamma1=0.9, gamma2=1.1, v0=v0, beta="golden"))
        assert 1 / n - 1e-12 <= rep.ipr_decay <= 1 + 1e-12
        assert rep.sigma2 >= 0


class TestLocalization:
    def test_report_fields(self):
        rep = localization_report(ChainConfig(n=10, gamma1=0.9, gamma2=1.1, v0=0.2))
        assert rep.sigma2_lossy is None and rep.ipr_decay_lossy is None
        assert 0 < rep.aah_ground_ipr <= 1

    def test_sweep_order_and_threads(self):
        cfg = parse_config({"n": 40, "gamma": 1.0, "delta": 0.05, "beta": "golden"})
        J = derive_couplings(cfg).J
        v0 = np.linspace(0, 8, 9) * J
        one = localization_sweep(cfg, v0, threads=1)
        many = localization_sweep(cfg, v0, threads=3)
        assert [r.v0 for r in one] == list(v0)
        assert one == many

    def test_extended_vs_localized(self):
        cfg = parse_config({"n": 100, "gamma": 1.0, "delta": 0.01, "beta": "golden"})
        J = derive_couplings(cfg).J
        low = [localization_report(cfg.replace(v0=f * J)) for f in (0.5, 1.0, 1.5)]
        high = [localization_report(cfg.replace(v0=f * J)) for f in (4, 6, 8)]
        assert min(r.sigma2 for r in low) > max(r.sigma2 for r in high)
        assert min(r.ipr_decay for r in low) > max(r.ipr_decay for r in high)


class TestFindDips:
    def test_flat(self):
        grid = closed_form_grid(np.linspace(-1, 1, 11), np.ones(11))
        assert find_dips(grid) == []

    def test_single_lorentzian(self, single_atom):
        g = derive_couplings(single_atom).gamma_eff
        delta = np.arange(-40, 41) * (g / 20)
        T = delta ** 2 / (delta ** 2 + g * g / 4)
        dips = find_dips(closed_form_grid(delta, T))
        assert len(dips) == 1
        assert abs(dips[0].center) < 1e-12
        assert dips[0].width == pytest.approx(g, rel=0.1)
        assert dips[0].depth == pytest.approx(1.0, abs=1e-12)

    def test_off_grid_center_refined(self):
        delta = np.linspace(-1, 1, 201)
        T = 1 - 0.8 * np.exp(-((delta - 0.1234) / 0.05) ** 2)
        (dip,) = find_dips(closed_form_grid(delta, T))
        assert abs(dip.center - 0.1234) < 2e-3

    def test_dip_table_sorted(self, quarter_cfg):
        dips = find_dips(spectrum(build_effective_model(quarter_cfg), default_delta_grid(quarter_cfg)))
        centers = [d.center for d in dips]
        assert centers == sorted(centers) and len(set(centers)) == len(centers)
        assert all(0 < d.depth <= 1 for d in dips)


class TestBandCount:
    def test_single_dip(self):
        assert band_count([Dip(0.0, 0.1, 0.5)]) == 1

    def test_isolated_dip_is_edge(self):
        dips = [Dip(c, 0.01, 0.5) for c in (0.0, 0.1, 0.2, 0.3, 1.5, 3.0, 3.1, 3.2)]
        bands, edges = band_clusters(dips)
        assert len(bands) == 2 and edges == [1.5]

    @pytest.mark.parametrize("beta,expected", [("1/2", 2), ("1/3", 3)])
    def test_rational_beta(self, beta, expected):
        cfg = parse_config({"n": 30, "gamma": 1.0, "delta": 0.1, "v0": "2J", "beta": beta})
        dips = find_dips(spectrum(build_effective_model(cfg), default_delta_grid(cfg)))
        assert len(dips) <= 30
        assert band_count(dips) == expected

    def test_quarter_flux_with_phase(self, quarter_cfg):
        dips = find_dips(spectrum(build_effective_model(quarter_cfg), default_delta_grid(quarter_cfg)))
        bands, edges = band_clusters(dips)
        assert len(bands) == 4 and len(edges) <= 2


class TestButterfly:
    def test_betas(self):
        betas = butterfly_betas(299)
        assert len(betas) == 299
        assert str(betas[0]) == "1/300" and str(betas[149]) == "1/2"

    def test_half_flux_row_symmetric(self):
        cfg = parse_config({"n": 30, "gamma": 1.0, "delta": 0.1, "v0": "2J"})
        grid = default_delta_grid(cfg, 1501)
        bmap = butterfly_assemble(cfg, beta_count=1, delta_grid=grid)
        assert bmap.betas.tolist() == [0.5]
        dips = find_dips(SpectrumGrid(grid, np.sqrt(bmap.T[0]).astype(complex),
                                      np.zeros(grid.size, complex)))
        centers = np.array([d.center for d in dips])
        np.testing.assert_allclose(np.sort(centers), np.sort(-centers), atol=1e-6)

    def test_small_beta_row_bounded(self):
        cfg = parse_config({"n": 30, "gamma": 1.0, "delta": 0.1, "v0": "2J"})
        c = derive_couplings(cfg)
        grid = default_delta_grid(cfg)
        bmap = butterfly_assemble(cfg, beta_count=99, delta_grid=grid, spot_every=64)
        row = SpectrumGrid(grid, np.sqrt(bmap.T[0]).astype(complex), np.zeros(grid.size, complex))
        bound = 2 * abs(c.J) + cfg.v0 + 2 * c.gamma_eff
        assert all(abs(d.center) <= bound for d in find_dips(row))

    def test_rows_valid_and_deterministic(self):
        cfg = parse_config({"n": 12, "gamma": 1.0, "delta": 0.1, "v0": "2J"})
        grid = default_delta_grid(cfg, 200)
        a = butterfly_assemble(cfg, beta_count=9, delta_grid=grid, threads=1)
        b = butterfly_assemble(cfg, beta_count=9, delta_grid=grid, threads=4)
        assert a.invalid_fraction == 0.0
        assert np.array_equal(a.T, b.T)


def test_center_band_window_contains_zero_band():
    cfg = parse_config({"n": 30, "gamma": 1.0, "delta": 0.1, "v0": "2J", "beta": "1/3"})
    lo, hi = center_band_window(cfg)
    E = eigensystem(build_aah_matrix(cfg)).energies
    assert lo < hi
    assert np.any((E > lo) & (E < hi))
    assert math.isfinite(lo) and math.isfinite(hi)
