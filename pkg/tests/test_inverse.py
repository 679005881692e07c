import math

import numpy as np
import pytest

from fracsource import (
    FractionalOrder,
    IterationConfig,
    MollifierSpec,
    TimeGrid,
    TimeSeries,
    Variant,
    add_noise,
    caputo_of_data,
    sine_bump_profile,
    probe,
    reconstruct,
    residual_phi_sequence,
    rl_integral,
    solve_homogeneous_l1,
    solve_inhomogeneous_l1,
    SpaceGrid,
)
from fracsource.grids import l2_norm_values

TG = TimeGrid(1.0, 128)
SG = SpaceGrid(64)
A9 = FractionalOrder(0.9)
X0 = 0.125


@pytest.fixture(scope="module")
def reference_setup():
    """Reference-config kernel and noiseless data (plain uniform forward)."""
    g = sine_bump_profile(SG)
    kernel = probe(solve_homogeneous_l1(g, A9, TG, startup_substeps=0), X0)
    rho = TimeSeries(TG, np.sin(2 * np.pi * TG.nodes) + 10 * TG.nodes)
    data = probe(
        solve_inhomogeneous_l1(g, rho, A9, TG, startup_substeps=0), X0
    )
    return kernel, rho, data


class TestConfigValidation:
    def test_mollifier_pairing(self):
        with pytest.raises(ValueError):
            IterationConfig(K=0.2, variant=Variant.MOLLIFIED)
        with pytest.raises(ValueError):
            IterationConfig(K=0.2, variant=Variant.PLAIN, mollifier=MollifierSpec(0.05))

    def test_kernel_exceeding_k_rejected(self):
        data = TimeSeries(TG, np.zeros(TG.n_nodes))
        kernel = TimeSeries(TG, np.full(TG.n_nodes, 0.3))
        with pytest.raises(ValueError, match="exceeds K"):
            reconstruct(data, kernel, A9, IterationConfig(K=0.2))

    def test_negative_kernel_rejected(self):
        data = TimeSeries(TG, np.zeros(TG.n_nodes))
        kernel = TimeSeries(TG, np.full(TG.n_nodes, -0.05))
        with pytest.raises(ValueError, match="nonnegative"):
            reconstruct(data, kernel, A9, IterationConfig(K=0.2))


class TestZeroData:
    def test_zero_fixed_point(self):
        data = TimeSeries(TG, np.zeros(TG.n_nodes))
        kernel = TimeSeries(TG, np.full(TG.n_nodes, 0.1))
        tr = reconstruct(data, kernel, A9, IterationConfig(K=0.2))
        assert tr.converged and tr.iterations_used == 1
        assert np.abs(tr.final.values).max() == 0.0
        assert np.abs(tr.iterates[0].values).max() == 0.0


class TestConstantKernel:
    def test_two_step_convergence(self):
        # with v = K identically, the update kernel 1 - v/K vanishes, so the
        # seed itself is the fixed point: data built so that the continuum
        # identity gives d_t^alpha u = K rho for rho = t^2
        K = 0.2
        a = FractionalOrder(0.5)
        rho_true = TG.nodes**2
        data = rl_integral(TimeSeries(TG, K * rho_true), a.alpha)
        kernel = TimeSeries(TG, np.full(TG.n_nodes, K))
        tr = reconstruct(data, kernel, a, IterationConfig(K=K, stop_eps=1e-3))
        assert tr.converged and tr.iterations_used <= 2
        # seed recovers rho within the L1/product-trapezoid discretisation
        assert np.abs(tr.final.values - rho_true).max() < 5e-3


class TestReferenceConfig:
    def test_shifted_reconstruction(self, reference_setup):
        kernel, rho, data = reference_setup
        tr = reconstruct(data, kernel, A9, IterationConfig(K=0.2))
        rel = l2_norm_values(tr.final.values - rho.values, TG.tau) / l2_norm_values(
            rho.values, TG.tau
        )
        assert tr.converged
        assert 900 <= tr.iterations_used <= 1800
        assert rel <= 2e-2

    def test_plain_and_shifted_agree(self, reference_setup):
        # integration by parts is exact for the piecewise-linear realisation,
        # so the two variants produce the same iterates
        kernel, rho, data = reference_setup
        cfg_p = IterationConfig(K=0.2, max_iters=40, stop_eps=1e-12, variant=Variant.PLAIN)
        cfg_s = IterationConfig(K=0.2, max_iters=40, stop_eps=1e-12, variant=Variant.SHIFTED)
        tr_p = reconstruct(data, kernel, A9, cfg_p)
        tr_s = reconstruct(data, kernel, A9, cfg_s)
        d = np.abs(tr_p.final.values - tr_s.final.values).max()
        scale = np.abs(tr_s.final.values).max()
        assert d <= 1e-10 * scale

    def test_update_norms_recorded(self, reference_setup):
        kernel, rho, data = reference_setup
        tr = reconstruct(data, kernel, A9, IterationConfig(K=0.2, max_iters=50))
        assert len(tr.update_norms) == tr.iterations_used
        assert not tr.converged  # 50 iterations cannot reach 1e-5 here
        assert tr.update_norms[-1] > 1e-5

    def test_monotone_early_iterates_reported(self, reference_setup):
        # empirical observation, reported not enforced: small violations can
        # appear near t = 0 where the discrete data carry layer error; any
        # violation must stay far below the solution scale
        kernel, rho, data = reference_setup
        tr = reconstruct(data, kernel, A9, IterationConfig(K=0.2, max_iters=50))
        worst = 0.0
        for a, b in zip(tr.iterates[1:], tr.iterates[2:]):
            worst = min(worst, float((b.values - a.values).min()))
        monotone = worst >= -1e-8
        assert worst >= -0.05 * np.abs(tr.final.values).max()
        if not monotone:
            import warnings

            warnings.warn(f"monotonicity flagged: worst update {worst:.2e}")

    def test_mollified_on_noisy_data(self, reference_setup):
        kernel, rho, data = reference_setup
        noisy = add_noise(data, 0.05, seed=42)
        cfg = IterationConfig(
            K=0.2,
            variant=Variant.MOLLIFIED,
            mollifier=MollifierSpec(5.0 / 128.0),
            max_iters=200,
        )
        tr = reconstruct(noisy, kernel, A9, cfg)
        assert tr.converged
        assert tr.iterations_used <= 40
        rel = l2_norm_values(tr.final.values - rho.values, TG.tau) / l2_norm_values(
            rho.values, TG.tau
        )
        assert rel < 0.15


class TestObservationInsideSupport:
    def test_fast_convergence_when_kernel_is_strong(self):
        # x0 = 1/2 sits inside the source support: the kernel is O(1) from
        # the first step and the iteration contracts in a few dozen steps
        from fracsource.experiments import ExperimentConfig, run_experiment

        s = run_experiment(ExperimentConfig(alpha=0.9, x0=0.5, K=1.0))
        assert s.converged and s.iterations_used < 200
        assert s.relative_l2_error < 0.1

    def test_alpha_one_reports_honest_nonconvergence(self):
        # the iteration is built for fractional orders; at alpha = 1 the
        # update stalls and the trace must say so instead of pretending
        from fracsource.experiments import ExperimentConfig, run_experiment

        s = run_experiment(ExperimentConfig(alpha=1.0, max_iters=300))
        assert not s.converged
        assert s.iterations_used == 300


class TestCaputoOfData:
    def test_zero(self):
        z = TimeSeries(TG, np.zeros(TG.n_nodes))
        assert np.abs(caputo_of_data(z, A9).values).max() == 0.0

    def test_power_rule(self):
        a = FractionalOrder(0.5)
        got = caputo_of_data(TimeSeries(TG, TG.nodes), a).values
        want = TG.nodes**0.5 / math.gamma(1.5)
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_nonzero_origin_rejected(self):
        s = TimeSeries(TG, np.ones(TG.n_nodes))
        with pytest.raises(ValueError, match="vanish"):
            caputo_of_data(s, A9)

    def test_consistency_with_duhamel_convolution(self):
        # d_t^alpha u(x0,.) equals rho' * v(x0,.); the discrete gap is
        # dominated by the early-node L1 truncation of the data derivative
        # and shrinks at first order (measured 8.6e-3 / 4.7e-3 / 2.2e-3 in
        # relative L2 over Nt = 128 / 256 / 512)
        from fracsource.inverse import _slope_convolution

        g = sine_bump_profile(SG)
        rels = []
        for L in (128, 256):
            tg = TimeGrid(1.0, L)
            rho = TimeSeries(tg, np.sin(2 * np.pi * tg.nodes) + 10 * tg.nodes)
            kernel = probe(solve_homogeneous_l1(g, A9, tg), X0)
            data = probe(solve_inhomogeneous_l1(g, rho, A9, tg), X0)
            lhs = caputo_of_data(data, A9).values
            rhs = _slope_convolution(rho.values, kernel.values)
            rels.append(
                l2_norm_values(lhs - rhs, tg.tau) / l2_norm_values(rhs, tg.tau)
            )
        assert rels[0] <= 1.2e-2
        assert rels[1] <= 5e-3
        assert rels[1] < rels[0]


class TestPhiSequence:
    def test_constant_kernel_kills_phi(self):
        kernel = TimeSeries(TG, np.full(TG.n_nodes, 0.2))
        phis = residual_phi_sequence(kernel, 0.2, 4)
        for phi in phis:
            assert np.abs(phi.values).max() == 0.0

    def test_zero_kernel_attains_bound(self):
        # Phi_m = t^(m-1)/(m-1)! exactly in the continuum; the sampled
        # polynomial convolutions carry an O(tau^2) interpolation bias
        kernel = TimeSeries(TG, np.zeros(TG.n_nodes))
        phis = residual_phi_sequence(kernel, 0.2, 6)
        for m, phi in enumerate(phis, start=1):
            bound = TG.nodes ** (m - 1) / math.factorial(m - 1)
            assert np.abs(phi.values - bound).max() <= 1e-5
            assert phi.values.min() >= 0.0

    def test_reference_kernel_bound(self, reference_setup):
        kernel, _, _ = reference_setup
        phis = residual_phi_sequence(kernel, 0.2, 6)
        for m, phi in enumerate(phis, start=1):
            bound = TG.nodes ** (m - 1) / math.factorial(m - 1)
            assert (phi.values <= bound + 1e-10).all()
            assert (phi.values >= 0.0).all()

    def test_bad_args(self):
        kernel = TimeSeries(TG, np.full(TG.n_nodes, 0.1))
        with pytest.raises(ValueError):
            residual_phi_sequence(kernel, 0.2, 0)
        with pytest.raises(ValueError):
            residual_phi_sequence(TimeSeries(TG, np.full(TG.n_nodes, 0.5)), 0.2, 2)


class TestNoise:
    def test_zero_sigma_identity(self):
        s = TimeSeries(TG, np.sin(TG.nodes))
        assert add_noise(s, 0.0, seed=1) is s

    def test_amplitude_bound(self):
        s = TimeSeries(TG, np.sin(2 * np.pi * TG.nodes))
        w = add_noise(s, 0.01, seed=5)
        assert np.abs(w.values - s.values).max() <= 0.01 * np.abs(s.values).max()

    def test_determinism(self):
        s = TimeSeries(TG, np.sin(2 * np.pi * TG.nodes))
        a = add_noise(s, 0.05, seed=123).values
        b = add_noise(s, 0.05, seed=123).values
        np.testing.assert_array_equal(a, b)
        c = add_noise(s, 0.05, seed=124).values
        assert np.abs(a - c).max() > 0

    def test_negative_sigma_rejected(self):
        s = TimeSeries(TG, np.zeros(TG.n_nodes))
        with pytest.raises(ValueError):
            add_noise(s, -0.1, seed=0)
