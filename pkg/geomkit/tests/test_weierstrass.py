import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geomkit.errors import DivisorError, RegularityError, RetryCapError
from geomkit.series import ExactScalar, MultiSeries, parse_series, series_from_json
from geomkit.weierstrass import (
    apply_linear_change, check_divisor, divide, generic_coordinate_change, prepare, prepare_linear,
    random_regular_series, random_unimodular, reconstruction_defect, window, x1_vanishing_order,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load(name):
    with open(FIXTURES / name, encoding="utf-8") as f:
        return series_from_json(json.load(f))


def test_regular_fixture_factors():
    f = load("regular.json")
    form = prepare(f, 4)
    assert form.k == 1
    assert form.g == parse_series("x1 - x2", nvars=2, trunc=f.trunc)
    assert form.u == parse_series("1 + x1", nvars=2, trunc=f.trunc)
    assert reconstruction_defect(f, form).is_zero()


def test_cusp_fixture():
    f = load("cusp.json")
    form = prepare(f, 3)
    assert form.k == 2
    assert max(e[0] for e in form.g.terms) == 2
    assert form.g.coefficient((2, 0)) == ExactScalar(1)
    assert form.u.constant_term
    assert reconstruction_defect(f, form).is_zero()
    assert prepare_linear(f, 3) == form


@pytest.mark.parametrize("text, k", [("x1^2 - x2", 2), ("x1 + x1^3 + x2*x1^2", 1)])
def test_x1_vanishing_order(text, k):
    assert x1_vanishing_order(parse_series(text, nvars=2, trunc=8)) == k


@pytest.mark.parametrize("text, g, u", [
    ("x1^2 - x2", "x1^2 - x2", "1"),
    ("x1 + x1^2 - x2 - x1*x2", "x1 - x2", "1 + x1"),
    ("(x1^2 - x2^3)*(1 + x1 + x2)", "x1^2 - x2^3", "1 + x1 + x2"),
])
def test_prepare_examples(text, g, u):
    form = prepare(parse_series(text, nvars=2, trunc=8), 6)
    assert form.g == parse_series(g, nvars=2, trunc=8)
    assert form.u == parse_series(u, nvars=2, trunc=8)


def test_x1_order_zero_is_a_unit():
    f = parse_series("3 + x1 + x2", trunc=4)
    form = prepare(f, 2)
    assert form.k == 0
    assert form.g == MultiSeries.one(2, 4)


def test_not_regular():
    f = load("non_regular.json")
    with pytest.raises(RegularityError):
        x1_vanishing_order(f)


def test_coordinate_change_makes_regular():
    f = load("non_regular.json")
    changed, matrix, k = generic_coordinate_change(f, seed=7)
    assert round(abs(np.linalg.det(np.array(matrix)))) == 1
    assert k == x1_vanishing_order(changed)
    assert changed == apply_linear_change(f, matrix)


def test_coordinate_change_is_reproducible():
    f = load("non_regular.json")
    assert generic_coordinate_change(f, seed=3) == generic_coordinate_change(f, seed=3)


def test_retry_cap(monkeypatch):
    def never_regular(f):
        raise RegularityError("not regular")

    monkeypatch.setattr("geomkit.weierstrass.x1_vanishing_order", never_regular)
    with pytest.raises(RetryCapError) as info:
        generic_coordinate_change(parse_series("x2", trunc=3), seed=10, retry_cap=3)
    assert info.value.last_seed == 12
    assert info.value.exit_code == 2


def test_random_unimodular_determinant():
    rng = np.random.default_rng(11)
    for n in (1, 2, 3, 4):
        C = random_unimodular(rng, n)
        assert round(abs(np.linalg.det(np.array(C, dtype=float)))) == 1


@settings(max_examples=15)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 3))
def test_iterative_and_linear_preparations_agree(seed, nvars):
    f = random_regular_series(np.random.default_rng(seed), nvars, 6)
    form = prepare(f, 3)
    assert reconstruction_defect(f, form).is_zero()
    assert prepare_linear(f, 3) == form


@pytest.mark.parametrize("seed", range(20))
def test_preparation_corpus(seed):
    nvars = 2 + seed % 2
    f = random_regular_series(np.random.default_rng(seed), nvars, 8)
    form = prepare(f, 6)
    assert check_divisor(form.g) == form.k
    assert form.u.constant_term
    assert reconstruction_defect(f, form).is_zero()
    assert prepare_linear(f, 6) == form


@settings(max_examples=20)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 3))
def test_prepare_is_idempotent(seed, nvars):
    form = prepare(random_regular_series(np.random.default_rng(seed), nvars, 8), 6)
    again = prepare(form.g, 6)
    assert again.k == form.k
    assert again.g == form.g
    assert again.u == MultiSeries.one(nvars, 8)


# ---------- Division ----------

def test_division_fixture():
    f = load("dividend.json")
    g = load("divisor.json")
    q, r = divide(f, g, order=4)
    assert q == parse_series("x1", nvars=2, trunc=8)
    assert r == parse_series("x1*x2", nvars=2, trunc=8)


@pytest.mark.parametrize("dividend, divisor, q, r", [
    ("x1^3", "x1^2 - x2", "x1", "x1*x2"),
    ("1", "x1 - x2", "0", "1"),
    ("x1", "x1 - x2", "1", "x2"),
])
def test_division_examples(dividend, divisor, q, r):
    quotient, remainder = divide(parse_series(dividend, nvars=2, trunc=8), parse_series(divisor, nvars=2, trunc=8),
                                 order=6)
    assert quotient == parse_series(q, nvars=2, trunc=8)
    assert remainder == parse_series(r, nvars=2, trunc=8)


def test_division_by_prepared_form():
    f = load("regular.json")
    form = prepare(f, 4)
    h = parse_series("1 + x1^3 - x2^2 + x1*x2", trunc=f.trunc)
    q, r = divide(h, form)
    assert all(e[0] < form.k for e in r.terms)
    inside = window(form.k, h.trunc, form.working_order, slack=form.k)
    assert (q * form.g + r - h).filter(inside).is_zero()


@pytest.mark.parametrize("text, message", [
    ("2*x1^2 - x2", "monic"),
    ("x1^2 + 1", "origin"),
])
def test_bad_divisors(text, message):
    with pytest.raises(DivisorError, match=message):
        check_divisor(parse_series(text, nvars=2, trunc=4))


def test_window_contains_bounded_degrees():
    inside = window(2, 8, 3)
    assert inside((8, 0))
    assert inside((4, 2))
    assert not inside((5, 2))
    assert not inside((0, 3))
    assert window(2, 8, 3, slack=2)((6, 0))
    assert not window(2, 8, 3, slack=2)((7, 0))


def test_prepared_unit_is_invertible():
    f = parse_series("x1^2 + x1*x2 + x2^3 + 1/2*x1^3", trunc=6)
    form = prepare(f, 3)
    assert form.u.constant_term == ExactScalar(Fraction(1))
