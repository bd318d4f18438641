"""Extended-range scalar: rounding direction, ordering, and rendering."""

import math
import pickle

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abcertify.xreal import (
    FOLD_BACKEND,
    XReal,
    fold_add_logs,
    fold_add_logs_py,
    sum_xreals,
)
from oracles import mp_logsumexp, mp_sci_string

# strategy spanning the full 600-decade working range
log_mags = st.floats(min_value=-700.0, max_value=700.0, allow_nan=False)


def ulp_gap(a: float, b: float) -> float:
    return abs(a - b) / math.ulp(max(abs(a), abs(b), 1.0))


# ----------------------------------------------------------------------
# constructors and special values
# ----------------------------------------------------------------------


def test_zero_and_one():
    z = XReal.zero()
    o = XReal.one()
    assert z.is_zero and not o.is_zero
    assert o.log_mag == 0.0
    assert z.to_f64_clamped() == 0.0
    assert z.to_sci_string() == "0"
    assert o.to_sci_string() == "1.0000×10^+0"


def test_from_log_is_exact():
    x = XReal.from_log(-123.456)
    assert x.log_mag == -123.456 and not x.is_zero


def test_from_f64_rounds_up():
    for v in (1e-300, 0.1, 1.0, 3.7, 1e300):
        x = XReal.from_f64(v)
        assert x.log_mag >= math.log(v)
        assert ulp_gap(x.log_mag, math.log(v)) <= 1.0
    assert XReal.from_f64(0.0).is_zero


def test_from_f64_rejects_negative():
    with pytest.raises(ValueError):
        XReal.from_f64(-1.0)


def test_exp_neg_is_exact():
    x = XReal.exp_neg(230.2585093)
    assert x.log_mag == -230.2585093
    assert x.to_sci_string() == "1.0000×10^-100"


def test_immutable_and_picklable():
    x = XReal.from_f64(2.0)
    with pytest.raises(AttributeError):
        x.log_mag = 0.0
    y = pickle.loads(pickle.dumps(x))
    assert y.log_mag == x.log_mag and y.is_zero == x.is_zero


# ----------------------------------------------------------------------
# arithmetic: upper-bound contract
# ----------------------------------------------------------------------


def test_add_upper_bound_contract_bulk():
    # 1e5 random pairs representable in binary64: the rounded sum never
    # falls more than 2 ulp below the true one.
    rng = np.random.default_rng(11)
    a = rng.uniform(1e-6, 1e6, 100_000)
    b = rng.uniform(1e-6, 1e6, 100_000)
    for av, bv in zip(a, b):
        s = XReal.from_f64(av).add(XReal.from_f64(bv)).to_f64_clamped()
        floor = (av + bv) * (1.0 - 2.0 * 2.2e-16)
        assert s >= floor


@given(log_mags, log_mags)
def test_add_dominates_true_sum(la, lb):
    s = XReal.from_log(la).add(XReal.from_log(lb))
    assert s.log_mag >= mp_logsumexp([la, lb]) - 1e-13 * max(1.0, abs(s.log_mag))


@given(log_mags, log_mags)
def test_add_commutative_bitwise(la, lb):
    a, b = XReal.from_log(la), XReal.from_log(lb)
    assert a.add(b).log_mag == b.add(a).log_mag


@given(log_mags, log_mags, log_mags)
def test_add_associative_within_4_ulp(la, lb, lc):
    a, b, c = (XReal.from_log(v) for v in (la, lb, lc))
    left = a.add(b).add(c).log_mag
    right = a.add(b.add(c)).log_mag
    assert ulp_gap(left, right) <= 4.0


@given(log_mags, log_mags)
def test_mul_rounds_up_one_ulp(la, lb):
    p = XReal.from_log(la).mul(XReal.from_log(lb))
    assert p.log_mag >= la + lb
    assert ulp_gap(p.log_mag, la + lb) <= 1.0


@given(log_mags, st.floats(min_value=0.25, max_value=4.0))
def test_pow_rounds_up_one_ulp(lm, p):
    x = XReal.from_log(lm).pow(p)
    assert x.log_mag >= lm * p
    assert ulp_gap(x.log_mag, lm * p) <= 1.0


def test_identity_elements():
    a = XReal.from_f64(3.7)
    z, o = XReal.zero(), XReal.one()
    assert a.add(z).log_mag == a.log_mag
    assert z.add(a).log_mag == a.log_mag
    assert a.mul(z).is_zero and z.mul(a).is_zero
    assert z.pow(2.0).is_zero
    # multiplying by one costs at most the one-ulp rounding step
    assert 0.0 <= a.mul(o).log_mag - a.log_mag <= math.ulp(a.log_mag)


@given(log_mags, log_mags, log_mags, log_mags)
def test_add_and_mul_are_monotone(la, lb, lc, ld):
    lo_a, hi_a = sorted((la, lb))
    lo_b, hi_b = sorted((lc, ld))
    a_lo, a_hi = XReal.from_log(lo_a), XReal.from_log(hi_a)
    b_lo, b_hi = XReal.from_log(lo_b), XReal.from_log(hi_b)
    assert a_lo.add(b_lo).log_mag <= a_hi.add(b_hi).log_mag
    assert a_lo.mul(b_lo).log_mag <= a_hi.mul(b_hi).log_mag


# ----------------------------------------------------------------------
# ordering and conversion
# ----------------------------------------------------------------------


def test_cmp_and_operators():
    small = XReal.from_log(-500.0)
    big = XReal.from_log(500.0)
    z = XReal.zero()
    assert XReal.cmp(small, big) == -1 and XReal.cmp(big, small) == 1
    assert XReal.cmp(small, XReal.from_log(-500.0)) == 0
    assert XReal.cmp(z, small) == -1 and XReal.cmp(small, z) == 1
    assert XReal.cmp(z, XReal.zero()) == 0
    assert small < big and big > small and small != big
    assert XReal.from_log(1.0) == XReal.from_log(1.0)
    assert (XReal.one() == 1.0) is False


def test_to_f64_clamped_edges():
    assert XReal.from_log(800.0).to_f64_clamped() == math.inf
    assert XReal.from_log(-800.0).to_f64_clamped() == 0.0
    mid = XReal.from_f64(1234.5)
    assert mid.to_f64_clamped() == pytest.approx(1234.5, rel=1e-12)


@given(st.floats(min_value=1e-300, max_value=1e300))
def test_round_trip_within_one_ulp(v):
    x = XReal.from_f64(v)
    back = XReal.from_f64(x.to_f64_clamped())
    assert ulp_gap(back.log_mag, x.log_mag) <= 2.0


# ----------------------------------------------------------------------
# decimal rendering
# ----------------------------------------------------------------------


@given(st.floats(min_value=-2000.0, max_value=2000.0))
def test_sci_string_matches_reference(lm):
    assert XReal.from_log(lm).to_sci_string() == mp_sci_string(lm)


def test_sci_string_carry():
    # a mantissa of 9.99996 must round and carry into the exponent
    lm = math.log(9.99996e5)
    s = XReal.from_log(lm).to_sci_string()
    assert s == "1.0000×10^+6"
    assert s == mp_sci_string(lm)


# ----------------------------------------------------------------------
# folded sums (compiled core vs pure-python fallback)
# ----------------------------------------------------------------------


def test_fold_backend_is_known():
    assert FOLD_BACKEND in ("compiled", "python")


def test_fold_backends_bit_identical():
    rng = np.random.default_rng(7)
    for n in (1, 2, 3, 17, 1000, 40000):
        logs = rng.uniform(-600.0, 600.0, n)
        assert fold_add_logs(logs) == fold_add_logs_py(logs)


def test_fold_handles_minus_inf():
    logs = np.array([-math.inf, 2.0, -math.inf, 1.0])
    assert fold_add_logs(logs) == fold_add_logs_py(logs)
    assert fold_add_logs(np.array([-math.inf, -math.inf])) == -math.inf
    assert fold_add_logs(np.array([])) == -math.inf
    assert fold_add_logs_py(np.array([])) == -math.inf


def test_fold_dominates_true_logsumexp():
    rng = np.random.default_rng(13)
    for n in (2, 11, 257):
        logs = rng.uniform(-50.0, 50.0, n)
        got = fold_add_logs(logs)
        ref = mp_logsumexp(logs)
        assert got >= ref - 1e-13 * max(1.0, abs(ref))
        assert got <= ref + 1e-9 * max(1.0, abs(ref))


def test_sum_xreals_matches_fold():
    rng = np.random.default_rng(5)
    logs = rng.uniform(-300.0, 300.0, 64)
    total = sum_xreals(XReal.from_log(l) for l in logs)
    assert total.log_mag == pytest.approx(fold_add_logs(logs), rel=0, abs=1e-10)
    assert sum_xreals([]).is_zero
