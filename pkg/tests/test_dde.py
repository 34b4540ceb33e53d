import cmath
import math
import random

import numpy as np
import pytest

from conftest import random_stable_model
from dpofeedback import dde
from dpofeedback.dde import (DECAYING, GROWING, MARGINAL, DegenerateTrace,
                             StepTooLarge, classify, default_dt, integrate,
                             pyragas_invariance_check)
from dpofeedback.model import (CONSTRUCTIVE, DESTRUCTIVE, ModelParams,
                               RawDelay, ScaledDelay, scaled_delay_near,
                               validate)
from dpofeedback.stability import char_roots_lambert


def plain_decay_model(gamma2=3.0):
    return validate(ModelParams(eps_abs=0.0, gamma1=0.0, gamma2=gamma2,
                                gamma3=0.0, delay=RawDelay(1.0)))


def delayed_model(g1tau, alpha, kind, gamma1=1.0, gamma2=2.5):
    delay = scaled_delay_near(g1tau / gamma1, kind)
    eps = alpha * gamma1 + gamma2 / 2.0
    return validate(ModelParams(eps_abs=eps, gamma1=gamma1, gamma2=gamma2,
                                gamma3=0.0, delay=delay))


class TestIntegrate:
    def test_analytic_exponential_decay(self):
        m = plain_decay_model(gamma2=3.0)
        t_end = 5.0 / 3.0
        trace = integrate(m, (1.0, 1.0), t_end)
        expect = math.sqrt(2.0) * math.exp(-1.5 * trace.t[-1])
        assert trace.norm[-1] == pytest.approx(expect, rel=1e-8)

    def test_conjugate_structure_preserved(self, rng):
        for _ in range(5):
            m = random_stable_model(rng)
            z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            trace = integrate(m, (z, z.conjugate()), 5.0 * m.tau)
            worst = np.max(np.abs(trace.v[:, 1] - np.conj(trace.v[:, 0])))
            assert worst <= 1e-12 * np.max(trace.norm)

    def test_step_bound_enforced(self):
        m = delayed_model(1.0, -0.5, DESTRUCTIVE)
        with pytest.raises(StepTooLarge):
            integrate(m, (1.0, 1.0), 1.0, dt=m.tau)

    def test_bad_v0(self):
        with pytest.raises(ValueError):
            integrate(plain_decay_model(), (1.0,), 1.0)

    def test_bad_t_end(self):
        with pytest.raises(ValueError):
            integrate(plain_decay_model(), (1.0, 1.0), 0.0)

    def test_overflow_flagged(self):
        m = delayed_model(1.0, 3.0, DESTRUCTIVE)  # strongly unstable
        trace = integrate(m, (1.0, 1.0), 500.0)
        assert trace.overflowed
        assert np.max(trace.norm) > dde.OVERFLOW_NORM

    def test_fourth_order_convergence(self):
        m = delayed_model(0.8, -0.4, DESTRUCTIVE)
        tau = m.tau
        ends = []
        for n in (128, 256, 512):
            trace = integrate(m, (1.0, 1.0), 4.0 * tau, dt=tau / n)
            ends.append(trace.v[-1, 0])
        e1 = abs(ends[0] - ends[1])
        e2 = abs(ends[1] - ends[2])
        assert e2 > 0.0
        ratio = e1 / e2
        assert 8.0 < ratio < 40.0  # nominal 16 for 4th order


class TestClassify:
    def test_pure_decay(self):
        trace = integrate(plain_decay_model(gamma2=2.0), (1.0, 1.0), 10.0)
        cls = classify(trace)
        assert cls.label == DECAYING
        assert cls.rate == pytest.approx(-1.0, abs=1e-3)

    def test_growing(self):
        m = delayed_model(1.0, 2.0, DESTRUCTIVE)
        cls = classify(integrate(m, (1.0, 1.0), 100.0))
        assert cls.label == GROWING

    def test_zero_trace_degenerate(self):
        trace = integrate(plain_decay_model(), (0.0, 0.0), 1.0)
        with pytest.raises(DegenerateTrace):
            classify(trace)

    def test_marginal_band(self):
        # exactly on the destructive boundary: the dominant root is 0,
        # the trace settles onto the neutral direction
        m = delayed_model(1.0, 0.0, DESTRUCTIVE)
        trace = integrate(m, (1.0, 1.0), 100.0)
        assert classify(trace).label == MARGINAL

    def test_rate_matches_dominant_root(self, rng):
        from dpofeedback.stability import char_root_oracle
        checked = 0
        while checked < 10:
            m = random_stable_model(rng)
            dom, roots = char_root_oracle(m, seeds=9)
            others = [r.real for r in roots
                      if abs(r - dom) > 1e-6 * (1.0 + abs(dom))]
            gap = dom.real - max(others) if others else abs(dom.real)
            if abs(dom.real) < 0.05 or gap < 0.1 * abs(dom.real):
                continue  # keep horizons short and modes well separated
            t_end = max(10.0 * m.tau, 10.0 / m.G,
                        8.0 / abs(dom.real), 8.0 / gap)
            trace = integrate(m, (1.0, 1.0), t_end)
            rate = classify(trace).rate
            assert rate == pytest.approx(dom.real, rel=0.02)
            checked += 1


class TestPyragas:
    def test_constant_state_preserved(self):
        m = validate(ModelParams(eps_abs=0.0, gamma1=2.0, gamma2=0.0,
                                 gamma3=0.0, delay=ScaledDelay(0.5, 0)))
        drift = pyragas_invariance_check(m, (1.0, 1.0))
        assert drift <= 1e-8 * math.sqrt(2.0)

    def test_zero_state_exact(self):
        m = validate(ModelParams(eps_abs=0.0, gamma1=2.0, gamma2=0.0,
                                 gamma3=0.0, delay=ScaledDelay(0.5, 0)))
        assert pyragas_invariance_check(m, (0.0, 0.0)) == 0.0

    def test_constructive_decays_at_twice_gamma1(self):
        # delta = 1 flips the returning field sign: the force no longer
        # vanishes and short delays decay at about 2*gamma1
        m = validate(ModelParams(eps_abs=0.0, gamma1=0.2, gamma2=0.0,
                                 gamma3=0.0, delay=ScaledDelay(0.05, 1)))
        with pytest.raises(ValueError):
            pyragas_invariance_check(m, (1.0, 1.0))
        s1, _ = char_roots_lambert(m)
        trace = integrate(m, (1.0, 1.0), 30.0)
        rate = classify(trace).rate
        assert rate == pytest.approx(s1.real, rel=1e-2)
        assert rate == pytest.approx(-2.0 * m.gamma1, rel=0.1)

    def test_preconditions(self):
        bad = validate(ModelParams(eps_abs=0.0, gamma1=2.0, gamma2=1.0,
                                   gamma3=0.0, delay=ScaledDelay(0.5, 0)))
        with pytest.raises(ValueError):
            pyragas_invariance_check(bad, (1.0, 1.0))


class TestDefaultDt:
    def test_respects_both_bounds(self):
        m = delayed_model(5.0, -0.5, DESTRUCTIVE)
        dt = default_dt(m)
        assert dt <= m.tau / 50.0 + 1e-15
        assert dt <= 1.0 / (50.0 * m.G) + 1e-15
