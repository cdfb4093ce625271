import numpy as np
import pytest

import oracles
from muckenhoupt.characteristics import (
    a1_characteristic,
    ap_characteristic,
    ap_interval_products,
    duality_identity_check,
    is_flat,
)
from muckenhoupt.exceptions import DynamicRangeError
from muckenhoupt.grid import IntervalFamily, make_weight


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 8.0])
def test_constant_weight_is_one(p):
    w = np.full(64, 3.7)
    assert abs(ap_characteristic(w, p).value - 1.0) <= 1e-12
    assert abs(a1_characteristic(w).value - 1.0) <= 1e-12


def test_step_closed_form():
    rep = ap_characteristic(make_weight("step:1,2", 1024), 2.0)
    assert rep.value == pytest.approx(oracles.step_ap_closed_form(1, 2), abs=1e-12)
    assert (rep.argmax_interval.lo, rep.argmax_interval.hi) == (0, 1023)


def test_step_a1_closed_form():
    w = make_weight("step:1,2", 1024)
    assert a1_characteristic(w).value == pytest.approx(oracles.step_a1_closed_form(1024, 1, 2), rel=1e-13)
    w = make_weight("step:1,2", 16)
    assert a1_characteristic(w).value == pytest.approx(oracles.a1_brute(w.values), rel=1e-13)


@pytest.mark.parametrize("p", [1.3, 2.0, 4.0])
def test_matches_python_oracle(p, rng):
    for _ in range(5):
        w = np.exp(rng.standard_normal(24))
        assert ap_characteristic(w, p).value == pytest.approx(oracles.ap_brute(w, p), rel=1e-12)


def test_dyadic_below_all(rng):
    w = np.exp(rng.standard_normal(32))
    dy = ap_characteristic(w, 2.0, IntervalFamily.dyadic()).value
    assert dy == pytest.approx(oracles.ap_brute(w, 2.0, oracles.dyadic_intervals(32)), rel=1e-12)
    assert dy <= ap_characteristic(w, 2.0).value


def test_characteristic_at_least_one(rng):
    for p in (1.2, 2.0, 5.0):
        w = np.exp(rng.standard_normal(50))
        assert ap_characteristic(w, p).value >= 1.0 - 1e-12
        assert a1_characteristic(w).value >= 1.0 - 1e-12


def test_ap_decreasing_in_p(rng):
    w = np.exp(rng.standard_normal(40))
    vals = [ap_characteristic(w, p).value for p in (1.5, 2.0, 3.0, 6.0)]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    assert a1_characteristic(w).value >= vals[0] - 1e-12


def test_interval_products_and_tiebreak():
    w = np.ones(4)
    lo, hi, prod = ap_interval_products(w, 2.0, IntervalFamily.all_intervals())
    assert len(prod) == 10
    rep = ap_characteristic(w, 2.0)
    assert (rep.argmax_interval.lo, rep.argmax_interval.hi) == (0, 0)


def test_is_flat():
    w = make_weight("random_flat:0.05,3", 128)
    assert is_flat(w, 2.0, 0.01)
    assert not is_flat(make_weight("step:1,4", 128), 2.0, 0.01)
    with pytest.raises(ValueError):
        is_flat(w, 2.0, 0.0)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_duality_identity(p, rng):
    w = np.exp(rng.standard_normal(64))
    chk = duality_identity_check(w, p)
    assert chk.max_abs_rel_err <= 1e-12


def test_dynamic_range():
    w = np.array([1e-300, 1e300, 1.0, 1.0])
    with pytest.raises(DynamicRangeError):
        ap_characteristic(w, 1.01)


def test_report_dict():
    d = ap_characteristic(make_weight("step:1,2", 8), 2.0).to_dict()
    assert list(d) == ["value", "lo", "hi", "family", "p"]


def test_wide_range_small_intervals_keep_precision():
    # the dual weight spans 32 decades, beyond what prefix differences resolve
    w = np.array([1e-3, 1e-3, 1e-3, 10.0])
    chk = duality_identity_check(w, 1.125)
    assert chk.max_abs_rel_err <= 1e-12
    lo, hi, prods = ap_interval_products(w, 1.125)
    assert prods[(lo == 3) & (hi == 3)][0] == pytest.approx(1.0)
    assert ap_characteristic(w, 1.125).value == pytest.approx(oracles.ap_brute(w, 1.125), rel=1e-12)
