import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from quicksort_tails import specfun as sf


class TestHarmonicMu:
    def test_harmonic_values(self):
        assert sf.harmonic(1) == 1
        assert sf.harmonic(2) == Fraction(3, 2)
        assert sf.harmonic(4) == Fraction(25, 12)

    def test_harmonic_rejects_zero(self):
        with pytest.raises(ValueError):
            sf.harmonic(0)

    def test_mu_values(self):
        assert sf.mu(0) == 0
        assert sf.mu(1) == 0
        assert sf.mu(2) == 1
        assert sf.mu(4) == Fraction(29, 6)

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 13, 25, 40])
    def test_mu_matches_independent_recurrence(self, n):
        assert sf.mu(n) == oracles.mu_recurrence(n)

    def test_mu_float_mode(self):
        assert sf.mu(100, "float") == pytest.approx(float(sf.mu(100)), rel=1e-14)


class TestGPhi:
    def test_half_point(self):
        assert sf.g(0.5) == pytest.approx(1 - 2 * math.log(2), abs=1e-15)
        assert sf.phi(0.5) == pytest.approx(-math.log(2), abs=1e-15)

    def test_endpoints_extended(self):
        assert sf.g(0.0) == 1.0
        assert sf.g(1.0) == 1.0
        assert sf.phi(0.0) == 0.0

    def test_domain(self):
        with pytest.raises(ValueError):
            sf.g(-0.01)
        with pytest.raises(ValueError):
            sf.phi(1.01)

    @given(st.floats(min_value=1e-12, max_value=1.0 - 1e-12))
    @settings(max_examples=300)
    def test_symmetry(self, u):
        assert sf.g(u) == pytest.approx(sf.g(1.0 - u), abs=1e-12)

    @given(st.floats(min_value=1e-9, max_value=1.0 - 1e-9))
    @settings(max_examples=300)
    def test_below_one_inside(self, u):
        assert sf.g(u) < 1.0
        assert sf.phi(u) < 0.0


class TestJ:
    def test_empty_interval(self):
        assert sf.J_quad(1.0) == 0.0

    def test_against_exponential_integral(self):
        assert sf.J_quad(2.0) == pytest.approx(oracles.J2, rel=1e-12)
        for t in (3.0, 10.0, 30.0, 100.0):
            assert sf.J_quad(t) == pytest.approx(oracles.J_mp(t), rel=1e-11)

    def test_domain_and_overflow(self):
        with pytest.raises(ValueError):
            sf.J_quad(0.5)
        with pytest.raises(OverflowError):
            sf.J_quad(750.0)

    def test_monotone(self):
        vals = [sf.J_quad(t) for t in (1.5, 2.0, 4.0, 8.0, 16.0)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert vals[0] > 0.0

    def test_ln_form_matches_mpmath_beyond_double_range(self):
        for t in (50.0, 400.0, 800.0, 2000.0):
            assert sf.ln_J_quad(t) == pytest.approx(oracles.ln_J_mp(t), rel=1e-13)

    def test_diff_is_stable_for_short_intervals(self):
        a, b = 20.0, 20.0 + 1e-7
        direct = sf.J_diff(a, b)
        expect = 2.0 * math.exp(20.0) / 20.0 * 1e-7
        assert direct == pytest.approx(expect, rel=1e-6)


class TestJSeries:
    def test_single_term(self):
        res = sf.J_series(2.0, terms=1)
        assert res.value == pytest.approx(math.exp(2.0), rel=1e-15)

    def test_auto_truncation_matches_quadrature(self):
        for t in (30.0, 50.0, 100.0):
            res = sf.J_series(t)
            assert res.value == pytest.approx(sf.J_quad(t), rel=1e-6)
            assert res.terms_used >= 10
            assert res.last_term > 0.0

    def test_leading_term_ratio_tends_to_one(self):
        gaps = []
        for t in (100.0, 300.0, 600.0):
            ratio = sf.J_series(t, terms=1).value / sf.J_quad(t)
            gaps.append(abs(ratio - 1.0))
            assert abs(ratio - 1.0) <= 2.0 / t
        assert gaps[0] > gaps[1] > gaps[2]

    def test_domain(self):
        with pytest.raises(ValueError):
            sf.J_series(1.5)


class TestSolveW:
    def test_exact_points(self):
        assert sf.solve_w(2.0 * math.e).w == pytest.approx(1.0, abs=1e-12)
        assert sf.solve_w(math.exp(2.0)).w == pytest.approx(2.0, abs=1e-12)
        assert sf.solve_w(2.0 * math.exp(5.0) / 5.0).w == pytest.approx(5.0, abs=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            sf.solve_w(5.0)

    @given(st.floats(min_value=2.0 * math.e, max_value=1e12))
    @settings(max_examples=200)
    def test_roundtrip_residual(self, x):
        ws = sf.solve_w(x)
        assert ws.w >= 1.0
        assert ws.residual <= 1e-12 * x

    def test_expansion_quality(self):
        # three-term form: the remainder over lnln/ln stays within [0.5, 2]
        for x in (1e4, 1e8, 1e12):
            w = sf.solve_w(x).w
            L = math.log(x / 2.0)
            ratio = (w - L - math.log(L)) / (math.log(L) / L)
            assert 0.5 <= ratio <= 2.0


class TestSolveTw:
    def test_below_threshold_rejected(self):
        with pytest.raises(sf.NoSolutionError) as exc:
            sf.solve_tw(2.5, 0.0)
        assert exc.value.threshold == pytest.approx(2.97557545, rel=1e-6)

    def test_residual_contract(self):
        for x in (1e2, 1e6, 1e10):
            ts = sf.solve_tw(x, 0.0)
            assert ts.residual <= 1e-12 * x

    def test_gap_against_oracle(self):
        ts = sf.solve_tw(1e6, 0.0)
        assert ts.gap == pytest.approx(oracles.TW_GAP_1E6, rel=1e-6)

    def test_gap_asymptote_at_1e8(self):
        ts = sf.solve_tw(1e8, 0.0)
        asymptote = 2.0 * math.log(1e8) / 1e8
        assert abs(ts.gap / asymptote - 1.0) <= 0.2

    def test_forced_coincidence(self):
        w = sf.solve_w(1e6).w
        ts = sf.solve_tw(1e6, a=2.0 * w)
        assert abs(ts.gap) < 1e-12

    def test_moderate_x_without_w(self):
        ts = sf.solve_tw(4.0, 0.0)  # below 2e, above the threshold
        assert ts.w is None
        assert ts.residual <= 1e-12 * 4.0
        assert ts.tw > 1.5

    def test_domain_boundary_2e(self):
        # w(2e) = 1 makes the large-x initial guess useless; the solver
        # must still land on the larger root (mpmath: 2.661585982630942)
        ts = sf.solve_tw(2.0 * math.e, 0.0)
        assert ts.tw == pytest.approx(2.661585982630942, rel=1e-12)

    def test_huge_x(self):
        ts = sf.solve_tw(1e300, 0.0)
        assert ts.residual <= 1e-12 * 1e300

    def test_negative_gap_when_slack_dominates(self):
        w = sf.solve_w(1e6).w
        ts = sf.solve_tw(1e6, a=3.0 * w)
        assert ts.gap < 0.0
        assert ts.residual <= 1e-12 * 1e6


class TestSSeries:
    def test_s1(self):
        assert sf.s_series(1.0, 1e-10) == pytest.approx(0.9457553, abs=5e-8)

    def test_known_values(self):
        assert sf.s_series(4.0, 1e-12) == pytest.approx(2.6844089199, abs=1e-8)
        assert sf.s_series(8.0, 1e-12) == pytest.approx(3.4229076909, abs=1e-8)

    @pytest.mark.parametrize("nu", [1.0, 2.5, 16.0, 100.0])
    def test_against_mpmath(self, nu):
        assert sf.s_series(nu, 1e-12) == pytest.approx(oracles.s_mp(nu), rel=1e-10)

    def test_domain(self):
        with pytest.raises(ValueError):
            sf.s_series(0.5)
        with pytest.raises(ValueError):
            sf.s_series(2.0, tol=0.0)


class TestConstants:
    def test_var_z_window(self):
        assert 0.42 < sf.CONSTANTS.var_z < 0.4206

    def test_s1_digits(self):
        assert abs(sf.CONSTANTS.s1 - 0.9457553) <= 5e-8

    def test_gamma_cap_reciprocal(self):
        assert abs(sf.CONSTANTS.gamma_cap * (2.0 - 1.0 / math.log(2.0)) - 1.0) <= 1e-15
        assert sf.CONSTANTS.gamma_cap == pytest.approx(1.79435, abs=1e-5)

    def test_alpha(self):
        assert sf.CONSTANTS.alpha == pytest.approx(
            2 * math.log(2) + 2 * 0.57721566490153286061 - 1, abs=1e-15)
