"""Tests for the extended-precision kernels.

Derived expectations are checked against direct evaluation at 512 bits, a
path independent of the stable forms under test.
"""

import gmpy2
import pytest
from gmpy2 import mpfr
from hypothesis import given, settings, strategies as st

from biobounds.numerics import (
    DEFAULT_CONTEXT,
    DomainError,
    PrecisionContext,
    relative_error,
)

CTX = PrecisionContext(256)
WIDE = PrecisionContext(512)


class TestPrecisionContext:
    def test_default_precision(self):
        assert DEFAULT_CONTEXT.precision_bits == 256

    def test_results_carry_requested_precision(self):
        assert CTX.log1p(0.25).precision == 256
        assert PrecisionContext(128).log1p(0.25).precision == 128

    def test_rejects_precision_below_floor(self):
        with pytest.raises(DomainError):
            PrecisionContext(32)

    def test_does_not_leak_global_state(self):
        CTX.lgamma(10)
        assert gmpy2.get_context().precision == 53

    def test_accepts_fractions_exactly(self):
        from fractions import Fraction

        v = CTX.real(Fraction(1, 3))
        with CTX.activate():
            reference = mpfr(1) / 3
        assert float(relative_error(v, reference, CTX)) < 1e-70


class TestLog1p:
    def test_zero(self):
        assert CTX.log1p(0) == 0

    def test_minus_half(self):
        # ln(0.5) is analytically forced
        assert float(relative_error(CTX.log1p(-0.5), WIDE.log(0.5))) < 1e-70

    def test_tiny_negative_argument(self):
        # reference: direct ln(1 - x) at 512 bits
        x = mpfr("1e-30")
        with WIDE.activate():
            reference = gmpy2.log(1 - x)
        got = CTX.log1p(-x)
        assert float(relative_error(got, reference)) < 1e-35  # 30+ digits survive

    def test_domain_error_at_minus_one(self):
        with pytest.raises(DomainError):
            CTX.log1p(-1)
        with pytest.raises(DomainError):
            CTX.log1p(-1.5)

    @given(st.floats(min_value=-0.999, max_value=1e6, allow_nan=False))
    @settings(max_examples=300)
    def test_error_contract_against_wide_reference(self, x):
        got = CTX.log1p(x)
        with WIDE.activate():
            reference = gmpy2.log1p(mpfr(x))
        if reference == 0:
            assert got == 0
        else:
            assert relative_error(got, reference) <= mpfr(2) ** (2 - 256)


class TestExpm1:
    def test_zero(self):
        assert CTX.expm1(0) == 0

    def test_ln2_gives_one(self):
        assert float(relative_error(CTX.expm1(CTX.ln2), 1)) < 1e-70

    def test_tiny_negative_argument(self):
        x = mpfr("-1e-20")
        with WIDE.activate():
            reference = gmpy2.exp(x) - 1
        assert float(relative_error(CTX.expm1(x), reference)) < 1e-25

    def test_infinite_argument_rejected(self):
        with pytest.raises(DomainError):
            CTX.expm1(mpfr("inf"))

    @given(st.floats(min_value=-0.5, max_value=0.5, allow_nan=False))
    @settings(max_examples=300)
    def test_roundtrip_with_log1p(self, x):
        # expm1(log1p(x)) = x to relative 2^(8-precision)
        got = CTX.expm1(CTX.log1p(x))
        if x == 0:
            assert got == 0
        else:
            assert relative_error(got, mpfr(x)) <= mpfr(2) ** (8 - 256)


class TestLgamma:
    def test_gamma_one(self):
        assert CTX.lgamma(1) == 0

    def test_gamma_five_is_ln_24(self):
        assert float(relative_error(CTX.lgamma(5), WIDE.log(24))) < 1e-70

    def test_half_is_ln_sqrt_pi(self):
        with WIDE.activate():
            reference = gmpy2.log(gmpy2.sqrt(gmpy2.const_pi()))
        assert float(relative_error(CTX.lgamma(0.5), reference)) < 1e-70
        assert abs(float(CTX.lgamma(0.5)) - 0.5723649) < 1e-7

    def test_domain_error_for_nonpositive(self):
        with pytest.raises(DomainError):
            CTX.lgamma(0)
        with pytest.raises(DomainError):
            CTX.lgamma(-3.5)

    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0, 10.0, 1e6])
    def test_recurrence(self, x):
        # ln Gamma(x+1) = ln Gamma(x) + ln x
        lhs = CTX.lgamma(x + 1)
        with CTX.activate():
            rhs = CTX.lgamma(x) + CTX.log(x)
        assert float(relative_error(lhs, rhs)) < 1e-20


class TestOneMinusPow:
    def test_zero_fmr(self):
        assert CTX.one_minus_pow(0, mpfr("1e18")) == 0

    def test_single_trial(self):
        assert CTX.one_minus_pow(0.5, 1) == mpfr("0.5")

    def test_half_life_exponent(self):
        # M chosen near ln(0.5)/ln(1-1e-6); probability crosses 1/2 there
        p = CTX.one_minus_pow(1e-6, 692_800)
        assert abs(float(p) - 0.5) < 1e-3

    def test_exponent_zero(self):
        assert CTX.one_minus_pow(0.7, 0) == 0

    def test_certain_base(self):
        assert CTX.one_minus_pow(1, 3) == 1

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            CTX.one_minus_pow(-0.1, 5)
        with pytest.raises(DomainError):
            CTX.one_minus_pow(1.1, 5)
        with pytest.raises(DomainError):
            CTX.one_minus_pow(0.5, -1)

    def test_agrees_with_direct_power_at_wide_precision(self):
        # direct (1-f)^M at 512 bits vs the stable path at 256 bits
        import random

        rng = random.Random(1234)
        for _ in range(200):
            f = 10 ** rng.uniform(-12, -3)
            m = 10 ** rng.uniform(0, 12)
            got = CTX.one_minus_pow(f, m)
            with WIDE.activate():
                direct = 1 - (1 - mpfr(f)) ** mpfr(m)
            assert relative_error(got, direct) < mpfr("1e-12"), (f, m)

    @given(
        st.floats(min_value=0, max_value=1e-3),
        st.floats(min_value=1, max_value=1e12),
    )
    @settings(max_examples=300)
    def test_monotone_in_both_arguments(self, f, m):
        base = CTX.one_minus_pow(f, m)
        assert CTX.one_minus_pow(min(f * 2 + 1e-9, 1e-3), m) >= base
        assert CTX.one_minus_pow(f, m * 2) >= base

    def test_result_within_unit_interval(self):
        for f, m in [(1e-30, 1e18), (0.999999, 1e6), (0.5, 2)]:
            v = CTX.one_minus_pow(f, m)
            assert 0 <= v <= 1


class TestConcurrency:
    def test_contexts_are_safe_across_threads(self):
        # value-type contexts: parallel invocation at mixed precisions must
        # reproduce serial results bit for bit (gmpy2 state is thread-local)
        from concurrent.futures import ThreadPoolExecutor

        contexts = [PrecisionContext(128), PrecisionContext(256), PrecisionContext(320)]
        jobs = [
            (ctx, f, m)
            for ctx in contexts
            for f in (1e-9, 1e-6, 1e-3)
            for m in (1.0, 1e6, 1e12)
        ]
        serial = [ctx.one_minus_pow(f, m) for ctx, f, m in jobs]
        with ThreadPoolExecutor(max_workers=8) as pool:
            parallel = list(pool.map(lambda j: j[0].one_minus_pow(j[1], j[2]), jobs))
        assert serial == parallel
        assert [v.precision for v in parallel] == [ctx.precision_bits for ctx, _, _ in jobs]
        assert gmpy2.get_context().precision == 53


class TestLnComplement:
    def test_matches_linear_complement(self):
        ln_q = CTX.ln_one_minus_pow_complement(1e-6, 692_800)
        with CTX.activate():
            q = CTX.exp(ln_q)
            p = CTX.one_minus_pow(1e-6, 692_800)
            assert float(relative_error(q, 1 - p)) < 1e-60

    def test_survives_regimes_where_linear_scale_underflows(self):
        # N(N-1)/2 pairs at N=1e9, f=1e-3: complement ~ exp(-5e14)
        ln_q = CTX.ln_one_minus_pow_complement(1e-3, 499_999_999_500_000_000)
        assert float(ln_q) == pytest.approx(-5.002502e14, rel=1e-5)
