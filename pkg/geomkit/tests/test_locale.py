from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geomkit.errors import ParameterError, ParseError
from geomkit.locale import (
    EMPTY, PROVED, UNKNOWN, Atom, Ge, Le, Step, SubsetExpr, Term, Universe, decide_containment, decide_empty,
    find_counterexample, holds_at, parse, parse_term, replay, saturate,
)
from geomkit.series import ExactScalar

f, g = Term.symbol("f"), Term.symbol("g")


# ---------- Terms and parsing ----------

def test_terms_are_canonical():
    assert parse_term("(f + g)^2") == parse_term("g^2 + 2*f*g + f^2")
    assert f * g == g * f
    assert (f + g) - g == f
    assert str(parse_term("1/2*f - g")) == "1/2*f - g"


def test_parse_intersection():
    expr = parse("|f| <= 1/2 & |g|<=1/3 & |f+g| >= 1")
    assert expr.atoms == {Le(f, Fraction(1, 2)), Le(g, Fraction(1, 3)), Ge(f + g, 1)}
    assert parse(str(expr)) == expr


def test_decimal_radius():
    assert parse("|f|<=0.25") == SubsetExpr.of([Le(f, Fraction(1, 4))])


@pytest.mark.parametrize("text, position", [
    ("f <= 1", 0),
    ("|f <= 1", 0),
    ("|f| < 1", 4),
    ("|f| <= 0", 7),
    ("|f| <= -1", 7),
    ("|f| <= 1 |g| <= 1", 9),
    ("|| <= 1", 1),
])
def test_parse_errors(text, position):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.position == position
    assert info.value.exit_code == 2


def test_atoms_need_positive_radius():
    with pytest.raises(ParameterError):
        Le(f, 0)


# ---------- Containment ----------

@pytest.mark.parametrize("lhs, rhs, rule", [
    ("|f|<=1 & |g|<=1", "|f*g|<=1", "product-le"),
    ("|f|<=1/2 & |g|<=1/2", "|f+g|<=1", "sum-le"),
    ("|f|<=1/2", "|f|<=1", "mono-le"),
    ("|f|>=2 & |g|>=3", "|f*g|>=6", "product-ge"),
    ("|f+g|>=1 & |g|<=1/4", "|f|>=3/4", "reverse-triangle"),
    ("|f*g|>=1 & |g|<=1/2", "|f|>=2", "quotient"),
])
def test_containment_proved(lhs, rhs, rule):
    decision = decide_containment(parse(lhs), parse(rhs))
    assert decision.verdict == PROVED
    assert decision.trace[-1].rule == rule
    assert decision.containment.replay()


def test_scaled_sum():
    decision = decide_containment(parse("|f|<=1 & |g|<=1"), parse("|1/2*f + 1/2*g|<=1"))
    assert decision.verdict == PROVED
    assert replay(decision.trace, hypotheses=parse("|f|<=1 & |g|<=1").atoms,
                  goals=parse("|1/2*f + 1/2*g|<=1").atoms)


def test_whole_space_contains_nothing_bounded():
    decision = decide_containment(SubsetExpr(), parse("|f|<=1"))
    assert decision.verdict == UNKNOWN
    assert decision.missing == (Le(f, 1),)


def test_anything_is_contained_in_whole_space():
    decision = decide_containment(parse("|f|<=1"), SubsetExpr())
    assert decision.verdict == PROVED
    assert decision.trace == ()


def test_non_containment_is_unknown():
    decision = decide_containment(parse("|f|<=1"), parse("|f|<=1/2"))
    assert decision.verdict == UNKNOWN
    point = find_counterexample(parse("|f|<=1"), parse("|f|<=1/2"), np.random.default_rng(0), 200)
    assert point is not None
    assert abs(point["f"].abs_squared()) > Fraction(1, 4)


# ---------- Emptiness ----------

@pytest.mark.parametrize("text, rule", [
    ("|f|<=1/2 & |f|>=1", "disjoint"),
    ("|f|<=1/2 & |g|<=1/3 & |f+g|>=1", "disjoint"),
    ("|3|<=2", "scalar-empty"),
])
def test_empty(text, rule):
    expr = parse(text)
    decision = decide_empty(expr)
    assert decision.verdict == EMPTY
    assert decision.trace[-1].rule == rule
    assert decision.trace[-1].conclusion is None
    assert replay(decision.trace, hypotheses=expr.atoms)


def test_touching_bounds_are_not_empty():
    decision = decide_empty(parse("|f|<=1 & |f|>=1"))
    assert decision.verdict == UNKNOWN
    assert find_counterexample(parse("|f|<=1 & |f|>=1"), None, np.random.default_rng(1), 2000) is not None


def test_depth_cap_is_reported():
    # scalars, then scaled summands, then their sum: three rounds
    expr = parse("|f|<=1 & |g|<=1 & |1/2*f + 1/2*g|>=2")
    capped = decide_empty(expr, depth=1)
    assert capped.verdict == UNKNOWN
    assert capped.capped
    assert decide_empty(expr, depth=3).verdict == EMPTY


def test_depth_must_be_positive():
    with pytest.raises(ParameterError):
        decide_empty(parse("|f|<=1"), depth=0)


# ---------- Replay ----------

def test_replay_rejects_bad_steps():
    hyp = Le(f, 1)
    good = (Step("hyp", (), hyp), Step("mono-le", (hyp,), Le(f, 2)))
    assert replay(good, hypotheses={hyp}, goals={Le(f, 2)})
    shrinking = (Step("hyp", (), hyp), Step("mono-le", (hyp,), Le(f, Fraction(1, 2))))
    assert not replay(shrinking, hypotheses={hyp})
    unjustified = (Step("mono-le", (hyp,), Le(f, 2)),)
    assert not replay(unjustified)
    foreign = (Step("hyp", (), Le(g, 1)),)
    assert not replay(foreign, hypotheses={hyp})


def test_replay_without_goal_needs_emptiness():
    hyp = Le(f, 1)
    assert not replay((Step("hyp", (), hyp),), hypotheses={hyp})


def test_scalar_certificates():
    two_i = Term.scalar(ExactScalar(0, 2))
    assert replay((Step("scalar-le", (), Le(two_i, 2)),), goals={Le(two_i, 2)})
    assert replay((Step("scalar-ge", (), Ge(two_i, 2)),), goals={Ge(two_i, 2)})
    assert not replay((Step("scalar-le", (), Le(two_i, 1)),), goals={Le(two_i, 1)})


# ---------- Saturation ----------

def test_universe_contains_subterms():
    universe = Universe.build([parse_term("2*f*g + g")])
    for text in ("2*f*g", "f*g", "f", "g", "2"):
        assert parse_term(text) in universe.terms


def test_saturate_weakens_derived_bounds():
    expr = parse("|f|<=1/2 & |g|<=1/3")
    base = saturate(expr)
    assert Le(f + g, Fraction(5, 6)) in base
    assert Le(f + g, 1) in base
    trace = base.trace([Le(f + g, 1)])
    assert [step.rule for step in trace[-2:]] == ["sum-le", "mono-le"]
    assert replay(trace, hypotheses=expr.atoms, goals={Le(f + g, 1)})


def test_pool_offers_integer_rounding():
    base = saturate(parse("|f|>=5/2 & |g|<=1/3"), depth=1)
    assert Ge(f, 2) in base
    assert Le(g, 1) in base


def test_saturate_many():
    first, second = parse("|f|<=1"), parse("|g|>=2")
    bases = saturate([first, second], depth=2)
    assert len(bases) == 2
    assert Le(f, 1) in bases[0]
    assert Ge(g, 2) in bases[1]
    assert Le(f * f, 1) in saturate(first)


@settings(max_examples=30)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_proved_containments_hold_at_samples(a, b, seed):
    lhs = SubsetExpr.of([Le(f, Fraction(1, a)), Le(g, Fraction(1, b))])
    rhs = SubsetExpr.of([Le(f * g, Fraction(1, a * b)), Le(f + g, Fraction(1, a) + Fraction(1, b))])
    decision = decide_containment(lhs, rhs)
    assert decision.verdict == PROVED
    assert find_counterexample(lhs, rhs, np.random.default_rng(seed), 50) is None


def test_holds_at_uses_complex_modulus():
    expr = parse("|f|<=1")
    assert holds_at(expr, {"f": ExactScalar(Fraction(3, 5), Fraction(4, 5))})
    assert not holds_at(expr, {"f": ExactScalar(Fraction(3, 5), Fraction(5, 5))})


def test_atom_text():
    assert str(Atom("le", f * g, Fraction(1, 2))) == "|f*g|<=1/2"
    assert str(SubsetExpr()) == "(whole space)"
