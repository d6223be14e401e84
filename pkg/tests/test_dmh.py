import numpy as np
import pytest

from markfield import (
    McmcConfig,
    PointPattern,
    Priors,
    ProposalScales,
    build_graph,
    gibbs_sample_marks,
    run_chain,
    sample_poisson,
    scenario_params,
    update_lambda,
    update_omega,
    update_theta,
)
from markfield.dmh import LAMBDA_FLOOR, ChainState, free_parameter_names


@pytest.fixture
def tiny_state(rng):
    pts = rng.random((12, 2))
    marks = rng.integers(1, 3, 12)
    marks[:2] = [1, 2]
    pat = PointPattern(xs=pts[:, 0], ys=pts[:, 1], marks=marks, Q=2)
    g = build_graph(pat, 0.4)
    return ChainState(
        omega=np.array([1.0, 1.0]),
        theta=np.array([[1.0, 0.2], [0.2, 1.0]]),
        lam=5.0,
        marks=pat.marks,
        graph=g,
        Q=2,
    )


def simulated_fixture(seed=0, scenario="low-repulsion", eta=300, c=0.06):
    rng = np.random.default_rng(seed)
    pts = sample_poisson(eta, rng)
    pat0 = PointPattern(
        xs=pts[:, 0], ys=pts[:, 1], marks=np.ones(len(pts), dtype=np.int64), Q=2
    )
    g = build_graph(pat0, c)
    truth = scenario_params(scenario, lam=60.0)
    marks = gibbs_sample_marks(pat0, g, truth, sweeps=200, seed=rng)
    return PointPattern(xs=pat0.xs, ys=pat0.ys, marks=marks, Q=2), g


class TestConfigs:
    def test_validation(self):
        with pytest.raises(ValueError):
            Priors(sigma_omega=0.0)
        with pytest.raises(ValueError):
            Priors(a_lambda=-1.0)
        with pytest.raises(ValueError):
            ProposalScales(tau_lambda=0.0)
        with pytest.raises(ValueError):
            McmcConfig(iterations=0)
        with pytest.raises(ValueError):
            McmcConfig(burn_in_fraction=1.0)
        with pytest.raises(ValueError):
            McmcConfig(lambda_init_range=(0.0, 10.0))

    def test_parameter_names(self):
        assert free_parameter_names(2) == ["omega_1", "theta_1_1", "theta_1_2", "lambda"]
        names3 = free_parameter_names(3)
        assert "theta_3_3" not in names3
        assert "theta_2_3" in names3
        assert names3[-1] == "lambda"


class TestSingleUpdates:
    def test_degenerate_proposal_always_accepts(self, tiny_state, rng):
        # a vanishing random-walk scale proposes the current value back
        scales = ProposalScales(tau_omega=1e-12, tau_theta=1e-12)
        priors = Priors()
        n_acc = sum(
            update_omega(tiny_state, 1, priors, scales, rng) for _ in range(200)
        )
        assert n_acc == 200
        n_acc = sum(
            update_theta(tiny_state, 1, 2, priors, scales, rng) for _ in range(200)
        )
        assert n_acc == 200

    def test_fixed_entries_never_proposed(self, tiny_state, rng):
        with pytest.raises(ValueError):
            update_omega(tiny_state, 2, Priors(), ProposalScales(), rng)
        with pytest.raises(ValueError):
            update_theta(tiny_state, 2, 2, Priors(), ProposalScales(), rng)
        with pytest.raises(ValueError):
            update_theta(tiny_state, 2, 1, Priors(), ProposalScales(), rng)

    def test_theta_stays_symmetric(self, tiny_state, rng):
        for _ in range(50):
            update_theta(tiny_state, 1, 2, Priors(), ProposalScales(tau_theta=0.5), rng)
        np.testing.assert_array_equal(tiny_state.theta, tiny_state.theta.T)

    def test_lambda_update_keeps_caches_consistent(self, tiny_state, rng):
        g = tiny_state.graph
        for _ in range(100):
            update_lambda(tiny_state, Priors(a_lambda=2.0, b_lambda=0.5),
                          ProposalScales(tau_lambda=4.0), rng)
        np.testing.assert_allclose(
            tiny_state.w_edges, np.exp(-tiny_state.lam * g.edge_d)
        )
        np.testing.assert_allclose(tiny_state.w_adj, tiny_state.w_edges[g.adj_edge])
        assert tiny_state.lam > LAMBDA_FLOOR

    def test_lambda_stays_positive(self, tiny_state, rng):
        for _ in range(300):
            update_lambda(tiny_state, Priors(), ProposalScales(tau_lambda=100.0), rng)
            assert tiny_state.lam > 0


class TestRunChain:
    def test_bookkeeping_shapes(self):
        pat, g = simulated_fixture()
        cfg = McmcConfig(iterations=10, n_chains=2, seed=4)
        samples = run_chain(pat, g, config=cfg)
        assert set(samples.draws) == {"omega_1", "theta_1_1", "theta_1_2", "lambda"}
        for mat in samples.draws.values():
            assert mat.shape == (2, 10)
        assert samples.burn_in == 5
        assert all(a.shape == (2,) for a in samples.accepts.values())

    def test_deterministic_given_seed(self):
        pat, g = simulated_fixture()
        cfg = McmcConfig(iterations=25, n_chains=2, seed=11)
        a = run_chain(pat, g, config=cfg)
        b = run_chain(pat, g, config=cfg)
        for name in a.draws:
            np.testing.assert_array_equal(a.draws[name], b.draws[name])

    def test_chains_differ_across_seeds_and_chain_index(self):
        pat, g = simulated_fixture()
        cfg = McmcConfig(iterations=25, n_chains=2, seed=11)
        s = run_chain(pat, g, config=cfg)
        assert not np.array_equal(s.draws["omega_1"][0], s.draws["omega_1"][1])
        other = run_chain(pat, g, config=McmcConfig(iterations=25, n_chains=1, seed=12))
        assert not np.array_equal(s.draws["omega_1"][0], other.draws["omega_1"][0])

    def test_lambda_draws_positive_and_within_init_range_at_start(self):
        pat, g = simulated_fixture()
        cfg = McmcConfig(iterations=50, n_chains=2, seed=3, lambda_init_range=(1.0, 50.0))
        s = run_chain(pat, g, config=cfg)
        assert np.all(s.draws["lambda"] > 0)

    def test_acceptance_rates_strictly_inside_unit_interval(self):
        pat, g = simulated_fixture()
        cfg = McmcConfig(iterations=1000, n_chains=1, seed=8,
                         lambda_init_range=(1.0, 200.0))
        s = run_chain(pat, g, config=cfg)
        for name, rate in s.acceptance_rates().items():
            assert 0.0 < rate < 1.0, name

    def test_recovery_within_three_posterior_sds(self):
        # statistical regression check: simulated truth inside mean +/- 3 sd
        pat, g = simulated_fixture(seed=5, scenario="high-repulsion", eta=400)
        cfg = McmcConfig(iterations=3000, n_chains=1, seed=21, aux_sweeps=10,
                         lambda_init_range=(1.0, 150.0))
        s = run_chain(pat, g, config=cfg)
        draws = s.pooled("theta_1_2")
        assert abs(draws.mean() - (-1.2)) < 3 * draws.std() + 0.1

    def test_pooled_burn_in_errors(self):
        pat, g = simulated_fixture()
        s = run_chain(pat, g, config=McmcConfig(iterations=10, seed=0))
        with pytest.raises(ValueError):
            s.pooled("lambda", burn_in=10)
