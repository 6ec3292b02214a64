import math

import pytest

from quicksort_tails import exactdist as ed
from quicksort_tails import largedev as lv
from quicksort_tails import sampler as sp
from quicksort_tails.bounds import new_upper_F
from quicksort_tails.specfun import mu


class TestWindowsAndRanges:
    def test_mcd_range_n2(self):
        lo, hi = lv.mcd_range(2)
        assert lo == pytest.approx(1.0 / (2.0 * math.log(2.0)), rel=1e-15)
        assert hi == 0.5
        # the n = 2 interval is empty as written; order holds from n = 3 on
        assert lo > hi
        for n in (3, 10, 1000, 10**6):
            lo, hi = lv.mcd_range(n)
            assert lo < hi

    def test_mcd_upper_tracks_2ln_n(self):
        _, hi = lv.mcd_range(10**6)
        assert 0.85 <= hi / (2.0 * math.log(10**6)) <= 1.15

    def test_window_shape(self):
        win = lv.ld_window(10**4, c=1.5)
        assert win.lo == 1.5
        assert not win.nonempty  # desk-scale windows are empty
        assert not win.contains(2.0)
        big = lv.ld_window(10**40, c=1.5)
        assert big.nonempty
        assert big.contains(2.0)

    def test_window_domain(self):
        with pytest.raises(ValueError):
            lv.ld_window(2)
        with pytest.raises(ValueError):
            lv.ld_window(100, c=1.0)


class TestLdExponents:
    def test_upper_sharp_is_the_shared_formula(self):
        ex = lv.ld_exponents(10**6, 8.0)
        assert ex.upper_sharp == new_upper_F(8.0, 0.0)

    def test_mcd_at_zero_slack(self):
        ex = lv.ld_exponents(10**6, 3.0)
        assert ex.mcd == pytest.approx(-3.0 * math.log(3.0), rel=1e-15)

    def test_mcd_respects_range(self):
        lo, _ = lv.mcd_range(10**6)
        ex = lv.ld_exponents(10**6, lo * 0.5)
        assert ex.mcd is None

    def test_lower_below_simple_upper(self):
        s = lv.LdSlacks(c_lower=1.0)
        for x in (2.0, 5.0, 20.0):
            ex = lv.ld_exponents(100, x, s)
            assert ex.lower <= ex.upper_simple

    def test_domains(self):
        ex = lv.ld_exponents(100, 1.0)
        assert ex.lower is None and ex.upper_sharp is None


class TestKsBound:
    def test_zero_slack_exact(self):
        for n in (4, 100, 10**6):
            assert lv.ks_bound(n, 0.0) == n ** -0.5

    def test_value(self):
        assert lv.ks_bound(10**4, 1.0) == pytest.approx(
            1e-2 * math.exp(math.sqrt(math.log(1e4))), rel=1e-14)

    def test_eventually_decreasing(self):
        C = 1.0
        n0 = int(math.exp(4 * C * C)) + 10
        assert lv.ks_bound(2 * n0, C) < lv.ks_bound(n0, C)


class TestLeftLd:
    def test_small_n_iterated_log_guard(self):
        res = lv.left_ld(10, 2.0)
        assert not res.domain_ok
        assert "iterated log" in res.reason

    def test_cap_guard_at_1e6(self):
        res = lv.left_ld(10**6, 2.0)
        assert not res.domain_ok
        assert "cap" in res.reason

    def test_1e8_reports_cap(self):
        res = lv.left_ld(10**8, 2.0, omega_n=1.0)
        assert isinstance(res.domain_ok, bool)
        assert res.reason  # x = 2 sits above the iterated-log cap at n = 1e8

    def test_ordering_with_slacks(self):
        res = lv.left_ld(10**9, 16.0, c_upper=0.0, c_lower=0.5)
        assert res.ln_lower <= res.ln_upper

    def test_domain(self):
        with pytest.raises(ValueError):
            lv.left_ld(100, 1.0)


class TestVerifyLd:
    def test_exact_n50(self):
        ver = lv.verify_ld(50, [1.0, 2.0, 3.0, 6.0, 7.0],
                           ed.exact_pmf(50, "float"))
        assert ver.passed
        assert ver.fitted
        by_x = {r.x: r for r in ver.rows}
        assert by_x[1.0].passed is None  # no applicable envelope at x = 1
        assert by_x[2.0].exponents.upper_sharp is None
        assert by_x[6.0].passed and by_x[7.0].passed
        d = ver.to_dict()
        assert d["pass"] is True and len(d["rows"]) == 5

    def test_supplied_slacks_can_fail(self):
        bad = lv.LdSlacks(c_lower=50.0)  # lower envelope above everything
        ver = lv.verify_ld(50, [2.0, 3.0], ed.exact_pmf(50, "float"), slacks=bad)
        assert not ver.passed

    def test_mc_source(self):
        batch = sp.sample_batch(500, 40_000, seed=99, thresholds=(1.0, 2.0))
        ver = lv.verify_ld(500, [1.0, 2.0], batch)
        assert ver.passed

    def test_mc_missing_threshold(self):
        batch = sp.sample_batch(500, 100, seed=99, thresholds=(1.0,))
        with pytest.raises(KeyError):
            lv.verify_ld(500, [2.5], batch)

    def test_insufficient_tail_flagged(self):
        batch = sp.sample_batch(200, 200, seed=5, thresholds=(1.0, 15.0))
        ver = lv.verify_ld(200, [1.0, 15.0], batch)
        flagged = {r.x: r.insufficient_tail for r in ver.rows}
        assert flagged[15.0] is True
        assert ver.rows[1].passed is None

    def test_source_mismatch(self):
        with pytest.raises(ValueError):
            lv.verify_ld(10, [1.0], ed.exact_pmf(12, "float"))


def test_tail_stabilization_toward_limit():
    # |ln P(Z_n > 2) - ln P(Z_10n > 2)| shrinks as n grows
    probs = {}
    for n, reps in ((10**3, 100_000), (10**4, 100_000), (10**5, 20_000)):
        b = sp.sample_batch(n, reps, seed=424242, thresholds=(2.0,))
        probs[n] = b.tail_counts[2.0] / b.count
    gap_small = abs(math.log(probs[10**3]) - math.log(probs[10**4]))
    gap_big = abs(math.log(probs[10**4]) - math.log(probs[10**5]))
    assert gap_big < gap_small
