import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from firstphoton import analytic as an
from firstphoton import kinetics as kn
from firstphoton.analytic import RatePair
from firstphoton.errors import IntegrationBlowupError, InvalidParameterError

pop_st = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


class TestDerivative:
    def test_initial_state_frozen(self, rates_ref):
        state = kn.initial_state(1.0)
        d = kn.derivative(state, rates_ref)
        # all pairs excited: first emissions only
        assert d == pytest.approx((-2.5, 1.5, 1.0, 1.0, 1.5, 2.5), rel=1e-15)

    def test_zero_state(self, rates_ref):
        state = kn.KineticsState(t=0.0, n_e=0.0, n_a=0.0, n_b=0.0,
                                 cap_n_a=0.0, cap_n_b=0.0, cap_n_f=0.0)
        assert kn.derivative(state, rates_ref) == (0.0,) * 6

    @given(n_e=pop_st, n_a=pop_st, n_b=pop_st)
    def test_conservation_identities_hold_pointwise(self, n_e, n_a, n_b):
        rates = RatePair(1.0, 1.5)
        state = kn.KineticsState(t=0.0, n_e=n_e, n_a=n_a, n_b=n_b,
                                 cap_n_a=0.1, cap_n_b=0.2, cap_n_f=0.3)
        d_ne, d_na, d_nb, d_ca, d_cb, d_cf = kn.derivative(state, rates)
        assert 2 * d_ne + d_na + d_nb + d_ca + d_cb == pytest.approx(0.0, abs=1e-12)
        assert d_cf + d_ne == pytest.approx(0.0, abs=1e-12)

    @given(n_e=pop_st, n_a=pop_st, n_b=pop_st,
           scale=st.floats(min_value=0.1, max_value=5.0))
    def test_conservation_survives_rate_scaling(self, n_e, n_a, n_b, scale):
        # the first-emission rates can be scaled jointly without breaking
        # either identity; the combined rate is not an independent dial
        rates = RatePair(1.0, 1.5)
        state = kn.KineticsState(t=0.0, n_e=n_e, n_a=n_a, n_b=n_b,
                                 cap_n_a=0.0, cap_n_b=0.0, cap_n_f=0.0)
        d = kn.derivative(state, rates, first_emission_scale=scale)
        assert 2 * d[0] + d[1] + d[2] + d[3] + d[4] == pytest.approx(0.0, abs=1e-12)
        assert d[5] + d[0] == pytest.approx(0.0, abs=1e-12)

    def test_rejects_bad_scale(self, rates_ref):
        with pytest.raises(InvalidParameterError):
            kn.derivative(kn.initial_state(), rates_ref, first_emission_scale=0.0)


class TestIntegratorConfig:
    @pytest.mark.parametrize("kw", [
        dict(step=0.0, t_end=1.0),
        dict(step=-0.1, t_end=1.0),
        dict(step=0.1, t_end=0.0),
        dict(step=0.1, t_end=1.0, n_0=-2.0),
    ])
    def test_rejects_bad_config(self, kw):
        with pytest.raises(InvalidParameterError):
            kn.IntegratorConfig(**kw)

    def test_step_count(self):
        assert kn.IntegratorConfig(step=2e-3, t_end=4.0).n_steps == 2000


class TestIntegrate:
    def test_matches_closed_forms(self, rates_ref):
        config = kn.IntegratorConfig(step=2e-3, t_end=4.0, n_0=1.0)
        states = kn.integrate(kn.initial_state(1.0), rates_ref, config)
        assert len(states) == config.n_steps + 1
        t = np.array([s.t for s in states])
        worst = 0.0
        for field, closed in [
            ("n_e", np.exp(-2.5 * t)),
            ("n_a", np.exp(-1.0 * t) - np.exp(-2.5 * t)),
            ("n_b", np.exp(-1.5 * t) - np.exp(-2.5 * t)),
            ("cap_n_a", 1.0 - np.exp(-1.0 * t)),
            ("cap_n_b", 1.0 - np.exp(-1.5 * t)),
            ("cap_n_f", 1.0 - np.exp(-2.5 * t)),
        ]:
            got = np.array([getattr(s, field) for s in states])
            worst = max(worst, float(np.max(np.abs(got - closed))))
        assert worst < 1e-9

    def test_conservation_along_trajectory(self, rates_ref):
        config = kn.IntegratorConfig(step=4e-3, t_end=4.0, n_0=3.0)
        states = kn.integrate(kn.initial_state(3.0), rates_ref, config)
        for s in states[:: 100]:
            excitation, first = kn.conservation_defects(s, 3.0)
            assert abs(excitation) < 1e-9 * 3.0
            assert abs(first) < 1e-9 * 3.0

    def test_fourth_order_convergence(self, rates_ref):
        errors = []
        steps = [4e-3, 2e-3, 1e-3]
        for h in steps:
            config = kn.IntegratorConfig(step=h, t_end=4.0)
            states = kn.integrate(kn.initial_state(1.0), rates_ref, config)
            t = np.array([s.t for s in states])
            n_e = np.array([s.n_e for s in states])
            errors.append(float(np.max(np.abs(n_e - np.exp(-2.5 * t)))))
        orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
        assert np.all(np.abs(orders - 4.0) < 0.3)

    def test_scaled_rates_break_single_atom_law(self, rates_ref):
        # a 10 percent bump of the first-emission rates leaves both
        # conservation identities intact but visibly bends cap_n_a away
        # from the isolated-atom curve
        config = kn.IntegratorConfig(step=2e-3, t_end=4.0)
        states = kn.integrate(kn.initial_state(1.0), rates_ref, config,
                              first_emission_scale=1.1)
        t = np.array([s.t for s in states])
        cap_n_a = np.array([s.cap_n_a for s in states])
        deviation = float(np.max(np.abs(cap_n_a - (1.0 - np.exp(-1.0 * t)))))
        assert deviation > 1e-3
        for s in states[:: 200]:
            excitation, first = kn.conservation_defects(s, 1.0)
            assert abs(excitation) < 1e-9
            assert abs(first) < 1e-9

    def test_absurd_step_blows_up(self, rates_ref):
        config = kn.IntegratorConfig(step=50.0, t_end=5000.0)
        with pytest.raises(IntegrationBlowupError):
            kn.integrate(kn.initial_state(1.0), rates_ref, config)

    def test_n0_scales_linearly(self, rates_ref):
        config = kn.IntegratorConfig(step=1e-2, t_end=1.0, n_0=7.0)
        states_7 = kn.integrate(kn.initial_state(7.0), rates_ref, config)
        states_1 = kn.integrate(kn.initial_state(1.0),
                                rates_ref,
                                kn.IntegratorConfig(step=1e-2, t_end=1.0, n_0=1.0))
        assert states_7[-1].n_e == pytest.approx(7.0 * states_1[-1].n_e, rel=1e-12)
        assert states_7[-1].cap_n_f == pytest.approx(7.0 * states_1[-1].cap_n_f, rel=1e-12)

    def test_channel_counts_match_analytic_module(self, rates_ref):
        config = kn.IntegratorConfig(step=1e-3, t_end=1.0)
        last = kn.integrate(kn.initial_state(1.0), rates_ref, config)[-1]
        assert last.n_a == pytest.approx(
            an.intermediate_population(1.0, rates_ref, "A"), abs=1e-10)
        assert last.cap_n_a == pytest.approx(an.single_type_cdf(1.0, 1.0), abs=1e-10)
        assert last.cap_n_f == pytest.approx(
            an.first_emission_cdf_entangled(1.0, rates_ref), abs=1e-10)
        second = last.cap_n_a + last.cap_n_b - last.cap_n_f
        assert second == pytest.approx(
            an.second_emission_cdf(1.0, rates_ref), abs=1e-10)
