import numpy as np
import pytest

from pdmprate import (Basis, JumpChain, bacterial_model, denominator_at,
                      denominator_grid, l2_risk, make_grid, oracle_dimension,
                      rate_at, rate_grid, risk_sweep, select_model,
                      simulate_chain, tcp_model, threshold)


@pytest.fixture(scope="module")
def tcp_setup():
    model = tcp_model(kappa=0.5, c=1.0, lam=1.0, delta=0.0)
    chain = simulate_chain(model, 1.0, 10_000, 99)
    fit = select_model(chain.samples, Basis())
    ys = make_grid((0.2, 4.0))
    return model, chain, fit, ys


class TestThreshold:
    def test_value(self):
        assert threshold(100_000) == pytest.approx(1.0 / np.log(100_000))

    def test_too_small(self):
        from pdmprate import ChainTooShortError
        with pytest.raises(ChainTooShortError):
            threshold(8)


class TestDenominator:
    def test_single_transition(self):
        model = tcp_model(kappa=0.5, c=1.0)
        chain = JumpChain(z=np.array([1.0, 3.0]), model=model)
        # weight is 2, both indicators fire at y = 2
        assert denominator_at(chain, model, 2.0) == pytest.approx(2.0)

    def test_below_support(self):
        model = tcp_model(kappa=0.5, c=1.0)
        chain = JumpChain(z=np.array([1.0, 3.0]), model=model)
        assert denominator_at(chain, model, 0.5) == 0.0

    def test_grid_matches_bruteforce(self, tcp_setup):
        model, chain, _, ys = tcp_setup
        grid_vals = denominator_grid(chain, model, ys[:50])
        for i, y in enumerate(ys[:50]):
            acc = 0.0
            for k in range(chain.n):
                if chain.z[k] <= y and chain.z[k + 1] >= model.jump.apply(y):
                    acc += model.transition_weight(chain.z[k],
                                                   model.jump.apply(y))
            assert grid_vals[i] == pytest.approx(acc / chain.n, rel=1e-12)

    def test_zero_beyond_max(self, tcp_setup):
        model, chain, _, _ = tcp_setup
        y_big = model.jump.invert(chain.z[1:].max()) * 1.01
        assert denominator_at(chain, model, y_big) == 0.0

    def test_bacterial_weight_depends_on_grid_point(self):
        model = bacterial_model(c=1.0, delta=2.0)
        chain = simulate_chain(model, 1.0, 1000, 12)
        ys = np.array([0.8, 1.6])
        vals = denominator_grid(chain, model, ys)
        for i, y in enumerate(ys):
            fy = model.jump.apply(y)
            hits = np.sum((chain.z[:-1] <= y) & (chain.z[1:] >= fy))
            assert vals[i] == pytest.approx(hits / chain.n / fy, rel=1e-12)

    def test_montecarlo_agreement(self):
        # long-chain value at y=1 vs an independent much longer run
        model = tcp_model(kappa=0.5, c=1.0, lam=1.0, delta=0.0)
        chain = simulate_chain(model, 1.0, 100_000, 60)
        big = simulate_chain(model, 1.0, 1_000_000, 61)
        d_small = denominator_at(chain, model, 1.0)
        d_big = denominator_at(big, model, 1.0)
        # summand is bounded by 2; 3 standard errors of the n=1e5 average
        se = 2.0 * 3.0 / np.sqrt(chain.n)
        assert abs(d_small - d_big) < 3 * se


class TestRateEstimate:
    def test_negativity_indicator(self, tcp_setup):
        model, chain, fit, ys = tcp_setup
        rate_hat, nu_f, denom = rate_grid(fit, chain, model, ys)
        neg = nu_f < 0
        assert np.all(rate_hat[neg] == 0.0)

    def test_threshold_indicator(self, tcp_setup):
        model, chain, fit, ys = tcp_setup
        rate_hat, nu_f, denom = rate_grid(fit, chain, model, ys)
        low = denom < threshold(chain.n)
        assert np.all(rate_hat[low] == 0.0)

    def test_quotient_arithmetic(self, tcp_setup):
        model, chain, fit, ys = tcp_setup
        rate_hat, nu_f, denom = rate_grid(fit, chain, model, ys)
        fire = (nu_f >= 0) & (denom >= threshold(chain.n))
        # division followed by multiplication costs at most a couple of ulps
        assert np.allclose(rate_hat[fire] * denom[fire], nu_f[fire],
                           rtol=1e-12, atol=0)

    def test_nonnegative_everywhere(self, tcp_setup):
        model, chain, fit, ys = tcp_setup
        rate_hat, _, _ = rate_grid(fit, chain, model, ys)
        assert np.all(rate_hat >= 0.0)

    def test_scalar_wrapper(self, tcp_setup):
        model, chain, fit, ys = tcp_setup
        grid_val = rate_grid(fit, chain, model, ys)[0][0]
        assert rate_at(fit, chain, model, float(ys[0])) == pytest.approx(grid_val)

    def test_threshold_zeroset_shrinks_with_n(self, tcp_setup):
        # same chain and denominator, lower threshold => fewer masked points
        model, chain, fit, ys = tcp_setup
        denom = denominator_grid(chain, model, ys)
        masked_small_n = denom < 1.0 / np.log(1000)
        masked_large_n = denom < 1.0 / np.log(100_000)
        assert np.all(masked_large_n <= masked_small_n)


class TestL2Risk:
    def test_exact_match(self):
        ys = make_grid((0.2, 4.0))
        vals = np.ones_like(ys)
        assert l2_risk(ys, vals, vals) == 0.0

    def test_constant_offset(self):
        ys = make_grid((0.2, 4.0))
        vals = np.ones_like(ys)
        assert l2_risk(ys, vals + 1.0, vals) == pytest.approx(3.8)

    def test_sine_quadrature(self):
        ys = make_grid((0.2, 4.0), 513)
        diff = np.sin(ys)
        # integral of sin^2 over [a, b]
        a, b = 0.2, 4.0
        exact = (b - a) / 2 - (np.sin(2 * b) - np.sin(2 * a)) / 4
        assert l2_risk(ys, diff, np.zeros_like(ys)) == pytest.approx(exact, abs=1e-8)

    def test_coverage_check(self):
        ys = make_grid((0.5, 2.0))
        with pytest.raises(ValueError):
            l2_risk(ys, ys, ys, interval=(0.2, 4.0))


class TestOracle:
    def test_self_match(self, tcp_setup):
        model, chain, fit, ys = tcp_setup
        m0 = max(0, fit.m_hat - 1)
        synth = rate_grid(fit, chain, model, ys, m=m0)[0]

        def truth(y):
            return np.interp(y, ys, synth)

        m_opt, risk_opt = oracle_dimension(fit, chain, model, ys, truth)
        assert m_opt == m0
        assert risk_opt == pytest.approx(0.0, abs=1e-18)

    def test_oracle_never_worse(self, tcp_setup):
        model, chain, fit, ys = tcp_setup
        risks = risk_sweep(fit, chain, model, ys, model.rate.rate)
        m_opt, risk_opt = oracle_dimension(fit, chain, model, ys,
                                           model.rate.rate)
        assert risk_opt <= risks[fit.m_hat]
        assert np.all(risk_opt <= risks + 1e-18)

    def test_sweep_matches_individual_models(self, tcp_setup):
        model, chain, fit, ys = tcp_setup
        denom = denominator_grid(chain, model, ys)
        truth_vals = model.rate.rate(ys)
        risks = risk_sweep(fit, chain, model, ys, model.rate.rate, denom=denom)
        for m in (0, 2, fit.m_hat, fit.m_max):
            rate_hat = rate_grid(fit, chain, model, ys, m=m, denom=denom)[0]
            assert risks[m] == pytest.approx(l2_risk(ys, rate_hat, truth_vals),
                                             rel=1e-12)


class TestGridTsv:
    def test_columns(self, tcp_setup):
        from pdmprate.jumprate import grid_to_tsv
        model, chain, fit, ys = tcp_setup
        rate_hat, nu_f, denom = rate_grid(fit, chain, model, ys)
        text = grid_to_tsv(ys, rate_hat, nu_f, denom,
                           rate_true=model.rate.rate(ys))
        lines = text.strip().split("\n")
        assert lines[0] == "y\tlambda_hat\tlambda_true\tnu_hat_of_f\td_hat"
        assert len(lines) == 1 + len(ys)
        first = [float(v) for v in lines[1].split("\t")]
        assert first[0] == ys[0]
