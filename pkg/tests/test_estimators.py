import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qewa.errors import NotReadyError
from qewa.estimators import (
    DumiqeEstimator,
    EwaMean,
    FrugalEstimator,
    QewaEstimator,
    empirical_quantile,
    qewa_step,
)


class TestQewaInit:
    def test_constructor_contract(self):
        est = QewaEstimator(q=0.7, lam=0.01, gamma=0.0001, warmup=10)
        assert est.n_seen == 0
        assert not est.ready

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            QewaEstimator(q=1.5, lam=0.01)
        with pytest.raises(ValueError):
            QewaEstimator(q=0.5, lam=0.0)
        with pytest.raises(ValueError):
            QewaEstimator(q=0.5, lam=0.01, gamma=1.0)
        with pytest.raises(ValueError):
            QewaEstimator(q=0.5, lam=0.01, warmup=0)

    def test_warmup_seeds_state_from_buffer(self):
        # 1..10 at q=0.5: midpoint empirical median, conditional means of
        # the strict halves (brute-force check below)
        est = QewaEstimator(q=0.5, lam=0.01, warmup=10)
        samples = list(range(1, 11))
        for x in samples:
            est.observe(float(x))
        assert est.ready
        assert est.q_hat == pytest.approx(5.5, abs=0)
        above = [x for x in samples if x > 5.5]
        below = [x for x in samples if x < 5.5]
        assert est.mu_plus == pytest.approx(sum(above) / len(above))  # 8
        assert est.mu_minus == pytest.approx(sum(below) / len(below))  # 3
        assert est.mu_plus == 8.0
        assert est.mu_minus == 3.0

    def test_degenerate_constant_warmup_uses_gap_fallback(self):
        est = QewaEstimator(q=0.5, lam=0.01, warmup=5)
        for _ in range(5):
            est.observe(4.0)
        assert est.q_hat == 4.0
        gap = 1e-6 * 4.0
        assert est.mu_plus == pytest.approx(4.0 + gap)
        assert est.mu_minus == pytest.approx(4.0 - gap)

    def test_not_ready_during_warmup(self):
        est = QewaEstimator(q=0.5, lam=0.01, warmup=3)
        est.observe(1.0)
        with pytest.raises(NotReadyError):
            est.estimate()
        assert est.provisional_estimate() == 1.0


class TestQewaObserve:
    def _symmetric_state(self, q, lam):
        est = QewaEstimator(q=q, lam=lam, gamma=0.001, warmup=2)
        est.observe(0.0)
        est.observe(0.0)
        est.q_hat, est.mu_plus, est.mu_minus = 0.0, 1.0, -1.0
        return est

    def test_symmetric_state_reduces_to_fixed_weights(self):
        # symmetric conditional means make the asymmetry weight equal q
        est = self._symmetric_state(q=0.3, lam=0.1)
        est.observe(2.0)  # above the estimate
        assert est.last_a == pytest.approx(0.3)
        assert est.last_b == pytest.approx(0.1 * 0.3)

    def test_worked_update(self):
        est = self._symmetric_state(q=0.5, lam=0.1)
        est.observe(2.0)
        assert est.last_a == pytest.approx(0.5)
        assert est.last_b == pytest.approx(0.05)
        assert est.q_hat == pytest.approx(0.1)
        # conditional means: shift by the estimate delta, EWA-pull the
        # matching side (gamma=0.001)
        assert est.mu_plus == pytest.approx(0.1 + 0.999 * 1.0 + 0.001 * 2.0)
        assert est.mu_minus == pytest.approx(-1.0 + 0.1)

    def test_sample_equal_to_estimate_takes_lower_branch(self):
        est = self._symmetric_state(q=0.5, lam=0.1)
        est.observe(0.0)  # exactly at the estimate
        assert est.q_hat == 0.0
        assert est.mu_plus == pytest.approx(1.0)
        # lower conditional mean is EWA-pulled toward x = estimate
        assert est.mu_minus == pytest.approx(0.999 * -1.0)

    def test_rejects_non_finite(self):
        est = self._symmetric_state(q=0.5, lam=0.1)
        before = (est.q_hat, est.mu_plus, est.mu_minus, est.n_seen)
        with pytest.raises(ValueError):
            est.observe(math.nan)
        with pytest.raises(ValueError):
            est.observe(math.inf)
        assert (est.q_hat, est.mu_plus, est.mu_minus, est.n_seen) == before


class TestQewaProperties:
    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_convex_hull(self, seed):
        rng = np.random.default_rng(seed)
        xs = rng.normal(rng.uniform(-5, 5), rng.uniform(0.1, 3), 300)
        est = QewaEstimator(q=0.7, lam=0.2, warmup=10)
        seen = []
        for x in xs:
            est.observe(x)
            seen.append(x)
            if est.ready:
                assert min(seen) <= est.q_hat <= max(seen)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_weight_bounds_and_ordering(self, seed):
        rng = np.random.default_rng(seed)
        xs = rng.standard_t(3, 300) * rng.uniform(0.5, 2)
        est = QewaEstimator(q=0.9, lam=0.3, warmup=5)
        for x in xs:
            est.observe(x)
            if est.ready and not math.isnan(est.last_a):
                assert 0.0 < est.last_a < 1.0
                assert 0.0 < est.last_b < est.lam
                assert est.mu_minus < est.q_hat < est.mu_plus

    def test_determinism(self):
        xs = np.random.default_rng(3).normal(0, 1, 500)
        states = []
        for _ in range(2):
            est = QewaEstimator(q=0.7, lam=0.05, warmup=10)
            for x in xs:
                est.observe(x)
            states.append((est.q_hat, est.mu_plus, est.mu_minus))
        assert states[0] == states[1]


class TestDumiqe:
    def test_update_above(self):
        est = DumiqeEstimator(q=0.7, lam=0.01)
        est.observe(10.0)
        est.observe(12.0)
        assert est.q_hat == pytest.approx(10.0 + 0.01 * 0.7 * 10.0)

    def test_boundary_sample_takes_lower_branch(self):
        est = DumiqeEstimator(q=0.7, lam=0.01)
        est.observe(10.0)
        est.observe(10.0)
        assert est.q_hat == pytest.approx(10.0 - 0.01 * 0.3 * 10.0)

    def test_zero_first_observation_is_nudged(self):
        est = DumiqeEstimator(q=0.5, lam=0.1)
        est.observe(0.0)
        assert est.q_hat == 1e-6

    def test_zero_estimate_is_a_fixed_point(self):
        est = DumiqeEstimator(q=0.5, lam=0.1)
        est.observe(5.0)
        est.q_hat = 0.0  # force the degenerate state
        est.observe(100.0)
        assert est.q_hat == 0.0

    def test_sign_monotonicity(self):
        for x, expect_up in [(20.0, True), (1.0, False)]:
            est = DumiqeEstimator(q=0.5, lam=0.05)
            est.observe(10.0)
            est.observe(x)
            assert (est.q_hat > 10.0) == expect_up

    def test_rejects_non_finite(self):
        est = DumiqeEstimator(q=0.5, lam=0.05)
        with pytest.raises(ValueError):
            est.observe(math.inf)


class TestFrugal:
    def test_step_up(self):
        est = FrugalEstimator(q=0.7, step=0.1, initial=0.0)
        est.observe(5.0)
        assert est.q_hat == pytest.approx(0.07)

    def test_step_down(self):
        est = FrugalEstimator(q=0.7, step=0.1, initial=0.0)
        est.observe(-5.0)
        assert est.q_hat == pytest.approx(-0.03)

    def test_drift_vanishes_at_true_quantile(self):
        # at the true quantile the expected increment is
        # step*q*P(X>Q) - step*(1-q)*P(X<=Q) = 0; check the empirical mean
        # increment over 1e6 draws is within ~4 sigma of zero
        q = 0.7
        step = 0.1
        q_hat = 0.5244005127080407  # standard normal 0.7-quantile
        xs = np.random.default_rng(9).normal(0, 1, 10**6)
        inc = np.where(xs > q_hat, step * q, -step * (1 - q))
        assert abs(inc.mean()) < 2e-4

    def test_rejects_non_finite(self):
        est = FrugalEstimator(q=0.5, step=0.1, initial=0.0)
        with pytest.raises(ValueError):
            est.observe(math.nan)


class TestEwaMean:
    def test_first_observation_initializes(self):
        est = EwaMean(alpha=0.5)
        est.observe(3.0)
        assert est.mu_hat == 3.0

    def test_convex_update(self):
        est = EwaMean(alpha=0.5)
        est.observe(0.0)
        est.observe(1.0)
        assert est.mu_hat == pytest.approx(0.5)

    def test_constant_stream_is_fixed_point(self):
        est = EwaMean(alpha=0.3)
        for _ in range(100):
            est.observe(7.25)
        # fixed point up to rounding of (1-a)*m + a*m
        assert est.mu_hat == pytest.approx(7.25, rel=1e-14)

    def test_rejects_non_finite(self):
        est = EwaMean(alpha=0.3)
        with pytest.raises(ValueError):
            est.observe(math.inf)


class TestHelpers:
    def test_empirical_quantile_matches_numpy(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            xs = np.sort(rng.normal(0, 1, rng.integers(1, 40)))
            q = rng.uniform(0.01, 0.99)
            assert empirical_quantile(list(xs), q) == pytest.approx(
                np.quantile(xs, q), abs=1e-12
            )

    def test_step_weight_branches(self):
        # weight is lam*a above the estimate, lam*(1-a) at or below
        _, _, _, a, b_up = qewa_step(0.7, 0.1, 0.001, 0.0, 1.0, -1.0, 0.5)
        assert b_up == pytest.approx(0.1 * a)
        _, _, _, a2, b_dn = qewa_step(0.7, 0.1, 0.001, 0.0, 1.0, -1.0, -0.5)
        assert b_dn == pytest.approx(0.1 * (1 - a2))
