import numpy as np
import pytest

from fracsource import (
    FractionalOrder,
    SpaceGrid,
    SpatialProfile,
    SpectralBasis,
    TimeGrid,
    TimeSeries,
    sine_bump_profile,
    probe,
    solve_homogeneous_l1,
    solve_homogeneous_spectral,
    solve_inhomogeneous_l1,
)

SG = SpaceGrid(64)
TG = TimeGrid(1.0, 128)
X0 = 0.125


@pytest.fixture(scope="module")
def bump():
    return sine_bump_profile(SG)


class TestSpaceTypes:
    def test_grid_nodes(self):
        g = SpaceGrid(4)
        np.testing.assert_allclose(g.nodes, [0, 0.25, 0.5, 0.75, 1.0])
        assert g.node_index(0.75) == 3
        with pytest.raises(ValueError):
            g.node_index(0.3)

    def test_profile_boundary_enforced(self):
        with pytest.raises(ValueError):
            SpatialProfile(SpaceGrid(4), np.array([0.1, 1, 1, 1, 0.0]))

    def test_sine_bump_profile_shape(self, bump):
        x = SG.nodes
        assert bump.values[SG.node_index(0.5)] == pytest.approx(1.0)
        assert bump.values[SG.node_index(0.25)] == 0.0
        assert bump.values[SG.node_index(0.125)] == 0.0
        assert (bump.values >= 0).all()

    def test_basis_h1_energy_finite(self, bump):
        basis = SpectralBasis.for_profile(bump, nmodes=64)
        assert np.isfinite(basis.h1_energy())
        assert basis.tail_fraction() < 0.05


class TestHomogeneous:
    def test_zero_initial_data(self):
        g = SpatialProfile(SG, np.zeros(65))
        fld = solve_homogeneous_l1(g, FractionalOrder(0.7), TG)
        assert np.abs(fld.values).max() == 0.0

    def test_alpha_one_single_mode_exact(self):
        g = SpatialProfile(SG, np.sin(np.pi * SG.nodes))
        fld = solve_homogeneous_l1(g, FractionalOrder(1.0), TG)
        exact = np.exp(-np.pi**2 * TG.nodes)[:, None] * g.values[None, :]
        assert np.abs(fld.values - exact).max() <= 1e-3

    def test_fractional_single_mode_vs_mittag_leffler(self):
        # one-mode oracle: v = E_{0.9,1}(-pi^2 t^0.9) sin(pi x)
        from fracsource import mittag_leffler

        g = SpatialProfile(SG, np.sin(np.pi * SG.nodes))
        fld = solve_homogeneous_l1(g, FractionalOrder(0.9), TG)
        amp = np.array(
            [mittag_leffler(0.9, 1.0, -np.pi**2 * t**0.9) for t in TG.nodes]
        )
        exact = amp[:, None] * g.values[None, :]
        assert np.abs(fld.values - exact).max() <= 1e-3

    @pytest.mark.parametrize("alpha", [0.3, 0.9, 1.0])
    def test_l1_vs_spectral(self, bump, alpha):
        a = FractionalOrder(alpha)
        l1 = solve_homogeneous_l1(bump, a, TG)
        spec = solve_homogeneous_spectral(bump, a, TG)
        assert np.abs(l1.values - spec.values).max() <= 1e-3

    def test_nonnegativity(self, bump):
        fld = solve_homogeneous_l1(bump, FractionalOrder(0.5), TG)
        assert fld.values.min() >= -1e-12

    def test_initial_row_is_g(self, bump):
        for solver in (solve_homogeneous_l1, solve_homogeneous_spectral):
            fld = solver(bump, FractionalOrder(0.6), TG)
            np.testing.assert_array_equal(fld.values[0], bump.values)

    def test_boundary_rows_zero(self, bump):
        fld = solve_homogeneous_l1(bump, FractionalOrder(0.6), TG)
        assert np.abs(fld.values[:, 0]).max() == 0.0
        assert np.abs(fld.values[:, -1]).max() == 0.0

    def test_temporal_convergence_rate(self):
        # fixed Nx, smooth single-mode data: error vs the spectral oracle
        # decreases at rate >= min(2 - alpha, 1); coarse grids so the time
        # error dominates the fixed spatial gap
        from fracsource import mittag_leffler

        alpha = 0.5
        g = SpatialProfile(SG, np.sin(np.pi * SG.nodes))
        errs = []
        for L in (4, 8, 16):
            tg = TimeGrid(1.0, L)
            fld = solve_homogeneous_l1(
                g, FractionalOrder(alpha), tg, startup_substeps=0
            )
            amp = np.array(
                [mittag_leffler(alpha, 1.0, -np.pi**2 * t**alpha) for t in tg.nodes]
            )
            exact = amp[:, None] * g.values[None, :]
            # compare away from the initial layer: the layer node error is
            # irreducible on a uniform mesh
            errs.append(np.abs(fld.values - exact)[L // 2 :].max())
        rate = np.log2(errs[0] / errs[-1]) / 2.0
        assert rate >= min(2 - alpha, 1.0) - 0.15


class TestYoungBound:
    def test_rl_integral_l1_bound_random_data(self):
        # ||J^(1-alpha) u||_L1 <= T^(1-alpha)/Gamma(2-alpha) ||u||_L1 up to
        # quadrature tolerance, for random observation-like series
        from scipy.special import gamma as G

        from fracsource import rl_integral
        from fracsource.grids import l1_norm_values

        rng = np.random.default_rng(17)
        alpha = 0.9
        const = TG.T ** (1 - alpha) / G(2 - alpha)
        for _ in range(100):
            u = TimeSeries(TG, rng.normal(size=TG.n_nodes))
            lhs = l1_norm_values(rl_integral(u, 1 - alpha).values, TG.tau)
            rhs = const * l1_norm_values(u.values, TG.tau)
            assert lhs <= rhs + 1e-10


class TestSpectral:
    def test_single_mode_field(self):
        from fracsource import mittag_leffler

        g = SpatialProfile(SG, np.sqrt(2.0) * np.sin(np.pi * SG.nodes))
        basis = SpectralBasis.for_profile(g, nmodes=8)
        # orthonormality kills every mode but the first
        assert np.abs(basis.coefficients[1:]).max() < 1e-8
        assert basis.coefficients[0] == pytest.approx(1.0, abs=3e-4)
        fld = solve_homogeneous_spectral(g, FractionalOrder(0.6), TG, basis)
        t = TG.nodes[5]
        # the field is exactly the one surviving mode of the sampled profile
        amp = basis.coefficients[0] * mittag_leffler(0.6, 1.0, -np.pi**2 * t**0.6)
        want = amp * np.sqrt(2.0) * np.sin(np.pi * SG.nodes)
        want[0] = want[-1] = 0.0
        np.testing.assert_allclose(fld.values[5], want, atol=1e-10)

    def test_cross_solver_agreement_at_observation_point(self, bump):
        a = FractionalOrder(0.9)
        l1 = solve_homogeneous_l1(bump, a, TG)
        spec = solve_homogeneous_spectral(bump, a, TG)
        i = TG.L // 2
        j = SG.node_index(X0)
        assert abs(l1.values[i, j] - spec.values[i, j]) <= 1e-3


class TestInhomogeneous:
    def test_zero_source(self, bump):
        rho = TimeSeries(TG, np.zeros(TG.n_nodes))
        fld = solve_inhomogeneous_l1(bump, rho, FractionalOrder(0.7), TG)
        assert np.abs(fld.values).max() == 0.0

    def test_alpha_one_steady_forcing(self):
        g = SpatialProfile(SG, np.sin(np.pi * SG.nodes))
        rho = TimeSeries(TG, np.ones(TG.n_nodes))
        fld = solve_inhomogeneous_l1(g, rho, FractionalOrder(1.0), TG)
        t = TG.nodes
        exact = ((1 - np.exp(-np.pi**2 * t)) / np.pi**2)[:, None] * g.values[None, :]
        assert np.abs(fld.values - exact).max() <= 1e-3

    def test_linearity_in_source(self, bump):
        a = FractionalOrder(0.8)
        r1 = TimeSeries(TG, np.sin(2 * np.pi * TG.nodes))
        r2 = TimeSeries(TG, TG.nodes**2)
        u1 = solve_inhomogeneous_l1(bump, r1, a, TG).values
        u2 = solve_inhomogeneous_l1(bump, r2, a, TG).values
        mix = TimeSeries(TG, 2.0 * r1.values - 0.5 * r2.values)
        umix = solve_inhomogeneous_l1(bump, mix, a, TG).values
        np.testing.assert_allclose(umix, 2.0 * u1 - 0.5 * u2, atol=1e-11)

    def test_grid_mismatch_rejected(self, bump):
        rho = TimeSeries(TimeGrid(1.0, 64), np.zeros(65))
        with pytest.raises(ValueError):
            solve_inhomogeneous_l1(bump, rho, FractionalOrder(0.5), TG)


class TestProbe:
    def test_zero_field(self, bump):
        rho = TimeSeries(TG, np.zeros(TG.n_nodes))
        fld = solve_inhomogeneous_l1(bump, rho, FractionalOrder(0.5), TG)
        assert np.abs(probe(fld, X0).values).max() == 0.0

    def test_positivity_at_observation_point(self, bump):
        fld = solve_homogeneous_l1(bump, FractionalOrder(0.9), TG)
        obs = probe(fld, X0).values
        assert (obs[1:] > 0).all()

    def test_boundary_probe_is_zero(self, bump):
        fld = solve_homogeneous_l1(bump, FractionalOrder(0.9), TG)
        assert np.abs(probe(fld, 0.0).values).max() == 0.0

    def test_off_node_rejected(self, bump):
        fld = solve_homogeneous_l1(bump, FractionalOrder(0.9), TG)
        with pytest.raises(ValueError):
            probe(fld, 0.1301)
