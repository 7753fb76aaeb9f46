import itertools
from fractions import Fraction
from math import comb, prod

import pytest
from hypothesis import given, settings, strategies as st

from geomkit.charclasses import (
    BundleSpec, bundle_projection, chern_character, chern_class, dual, dual_pushforward, euler_class, grr_check, hrr,
    hypersurface_chi, integrate, known_pushforward, line_bundle, oracle_chi_proj, point, proj_bundle, proj_space,
    product, projection, pullback, pushforward, sym_power, tensor, to_point, todd, total_chern, trivial_bundle,
)
from geomkit.errors import MissingPushforwardError, RingMismatchError


def binomial_chi(n, k):
    """chi(P^n, O(k)) = binom(n + k, n) as a polynomial in k."""
    value = Fraction(1)
    for j in range(1, n + 1):
        value *= Fraction(k + j, j)
    return value


def hirzebruch():
    P1 = proj_space(1)
    return proj_bundle(P1, P1.O(0) + P1.O(1))


def catalog_spaces():
    return [proj_space(1), proj_space(2), proj_space(3), hirzebruch()]


def total(V):
    return sum(total_chern(V), V.ring.zero())


# ---------- Projective spaces ----------

@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_tangent_chern_classes(n):
    P = proj_space(n)
    h = P.ring.gen(0)
    for i in range(n + 1):
        assert chern_class(P.tangent, i) == h ** i * comb(n + 1, i)
    assert integrate(P, chern_class(P.tangent, n)) == n + 1


@given(st.integers(0, 4), st.integers(-8, 8))
def test_hrr_matches_oracle(n, k):
    P = proj_space(n)
    chi = hrr(P, P.O(k))
    assert chi == oracle_chi_proj(n, k)
    assert chi == binomial_chi(n, k)


def test_twisted_cubic_count():
    P = proj_space(2)
    assert hrr(P, P.O(3)) == 10


@pytest.mark.parametrize("n, d", [(2, 1), (2, 2), (2, 3), (2, 4), (2, 5)])
def test_plane_curves(n, d):
    assert hypersurface_chi(n, d) == 1 - Fraction((d - 1) * (d - 2), 2)


def test_quartic_surface():
    assert hypersurface_chi(3, 4) == 2


@given(st.integers(-4, 4), st.integers(-4, 4))
def test_kunneth(a, b):
    X = product(proj_space(1), proj_space(1))
    assert hrr(X, X.O(a, b)) == (a + 1) * (b + 1)


def test_todd_of_p1():
    P = proj_space(1)
    assert todd(P.tangent) == P.ring.one() + P.ring.gen(0)


def test_chern_character_is_additive_and_multiplicative():
    P = proj_space(3)
    V, W = P.O(1), P.O(2) + P.O(-1)
    assert chern_character(V + W) == chern_character(V) + chern_character(W)
    assert chern_character(tensor(V, W)) == chern_character(V) * chern_character(W)


def test_virtual_bundles_invert_chern_class():
    P = proj_space(2)
    V = P.O(1)
    total = trivial_bundle(P.ring) - V
    product_ = sum(
        (chern_class(V, i) * chern_class(total, j) for i in range(3) for j in range(3)),
        P.ring.zero(),
    )
    assert product_ == P.ring.one()


def test_euler_class_normalizations():
    P = proj_space(2)
    h = P.ring.gen(0)
    assert euler_class(P.O(1)) == h
    assert euler_class(P.O(1), "hh") == h - h ** 2 * Fraction(1, 2)


def test_ring_mismatch():
    with pytest.raises(RingMismatchError):
        proj_space(1).O(1) + proj_space(2).O(1)


def test_classes_ignore_root_order():
    X = product(proj_space(1), proj_space(2))
    roots = [X.O(1, 0).plus_roots[0], X.O(2, -1).plus_roots[0], X.O(-1, 3).plus_roots[0]]
    V = BundleSpec(X.ring, tuple(roots))
    one = X.ring.one()
    hh_euler = prod((euler_class(line_bundle(X.ring, x), "hh") for x in roots), start=one)
    for order in itertools.permutations(roots):
        W = BundleSpec(X.ring, order)
        lines = [line_bundle(X.ring, x) for x in order]
        assert W == V
        assert total(W) == prod((one + x for x in order), start=one)
        assert chern_character(W) == sum((chern_character(L) for L in lines), X.ring.zero())
        assert todd(W) == prod((todd(L) for L in lines), start=one)
        assert prod((euler_class(L) for L in lines), start=one) == chern_class(V, 3)
        assert prod((euler_class(L, "hh") for L in lines), start=one) == hh_euler


@given(st.integers(-3, 3), st.integers(-3, 3))
def test_hh_euler_class_times_todd_is_c1(a, b):
    X = product(proj_space(1), proj_space(2))
    L = X.O(a, b)
    assert euler_class(L, "hh") * todd(L) == L.plus_roots[0]


degree_pairs = st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), max_size=3)


@settings(max_examples=40)
@given(degree_pairs, degree_pairs, degree_pairs)
def test_whitney_formula(plus, other, minus):
    X = product(proj_space(1), proj_space(2))

    def roots(pairs):
        return tuple(X.O(a, b).plus_roots[0] for a, b in pairs)

    V = BundleSpec(X.ring, roots(plus))
    W = BundleSpec(X.ring, roots(other), roots(minus))
    assert total(V + W) == total(V) * total(W)


@settings(max_examples=30)
@given(st.integers(0, 3), st.integers(0, 3), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_kunneth_on_catalog_pairs(i, j, degrees):
    X, Y = catalog_spaces()[i], catalog_spaces()[j]
    dX, dY = degrees[:X.ring.ngens], degrees[2:2 + Y.ring.ngens]
    Z = product(X, Y)
    assert hrr(Z, Z.O(*dX, *dY)) == hrr(X, X.O(*dX)) * hrr(Y, Y.O(*dY))


# ---------- Projective bundles ----------

def test_hirzebruch_surface():
    P1 = proj_space(1)
    F1 = proj_bundle(P1, P1.O(0) + P1.O(1))
    assert F1.dim == 2
    assert hrr(F1, F1.O(0, 0)) == 1
    # c_2 of the tangent bundle is the topological Euler characteristic
    assert integrate(F1, chern_class(F1.tangent, 2)) == 4


def test_bundle_pushforward_of_twist():
    P1 = proj_space(1)
    W = P1.O(0) + P1.O(1)
    F1 = proj_bundle(P1, W)
    pi = bundle_projection(F1)
    V = F1.O(0, 2)
    pushed = known_pushforward(pi, V)
    assert pushed.rank == 3
    assert pushed == sym_power(dual(W), 2)
    assert grr_check(pi, V, pushed).equal


def test_trivial_projective_bundle_is_a_product():
    P1 = proj_space(1)
    P = proj_bundle(P1, P1.O(0) + P1.O(0))
    Q = product(P1, proj_space(1))
    assert P.ring.powers == (2, 2)
    assert len(P.ring.basis()) == 4
    for i in range(3):
        assert chern_class(P.tangent, i).coeffs == chern_class(Q.tangent, i).coeffs
    for a, b in itertools.product(range(-2, 3), repeat=2):
        assert hrr(P, P.O(a, b)) == hrr(Q, Q.O(a, b)) == (a + 1) * (b + 1)


def test_bundle_and_product_pushforwards_agree():
    P1 = proj_space(1)
    P = proj_bundle(P1, P1.O(0) + P1.O(0))
    Q = product(P1, proj_space(1))
    for e in P.ring.basis():
        pushed = pushforward(bundle_projection(P), P.ring.monomial(e))
        assert pushed.coeffs == pushforward(projection(Q, 0), Q.ring.monomial(e)).coeffs


@pytest.mark.parametrize("a", [-1, 0, 2])
@pytest.mark.parametrize("m", [0, 1, 2])
def test_grr_on_hirzebruch_projection(m, a):
    F1 = hirzebruch()
    pi = bundle_projection(F1)
    V = F1.O(a, m)
    pushed = known_pushforward(pi, V)
    assert pushed.rank == m + 1
    assert grr_check(pi, V, pushed).equal


# ---------- Pushforward and GRR ----------

def test_pushforward_to_point_is_integration():
    P = proj_space(2)
    alpha = P.ring.gen(0) ** 2 * 3 + P.ring.one()
    assert pushforward(to_point(P), alpha) == point().ring.scalar(3)


@pytest.mark.parametrize("which", ["first", "second", "bundle", "point"])
def test_projection_formula(which):
    X = product(proj_space(1), proj_space(2))
    f = {
        "first": lambda: projection(X, 0),
        "second": lambda: projection(X, 1),
        "bundle": lambda: bundle_projection(hirzebruch()),
        "point": lambda: to_point(X),
    }[which]()
    source, target = f.source.ring, f.target.ring
    for b in target.basis():
        beta = target.monomial(b)
        assert pullback(f, beta * beta) == pullback(f, beta) * pullback(f, beta)
        for e in source.basis():
            alpha = source.monomial(e)
            assert pushforward(f, alpha * pullback(f, beta)) == pushforward(f, alpha) * beta


@pytest.mark.parametrize("a, b", [*itertools.product(range(5), repeat=2), (-1, 4), (3, -2)])
def test_grr_on_product_projection(a, b):
    X = product(proj_space(1), proj_space(1))
    f = projection(X, 0)
    V = X.O(a, b)
    pushed = known_pushforward(f, V)
    assert pushed.rank == b + 1
    assert grr_check(f, V, pushed).equal


def test_grr_to_point():
    P = proj_space(3)
    V = P.O(2)
    pushed = known_pushforward(to_point(P), V)
    assert pushed.rank == 10
    assert grr_check(to_point(P), V, pushed).equal


def test_grr_detects_wrong_pushforward():
    X = product(proj_space(1), proj_space(2))
    f = projection(X, 0)
    V = X.O(1, 1)
    wrong = f.target.O(1)
    assert not grr_check(f, V, wrong).equal


def test_grr_needs_a_pushforward():
    P = proj_space(1)
    with pytest.raises(MissingPushforwardError):
        grr_check(to_point(P), P.O(1), None)


def test_dual_pushforward_agrees():
    X = product(proj_space(2), proj_space(1))
    f = projection(X, 1)
    alpha = chern_character(X.O(1, 2)) * todd(X.tangent)
    assert dual_pushforward(f, alpha) == pushforward(f, alpha)


def test_total_chern_of_sum():
    P = proj_space(3)
    V = P.O(1) + P.O(2)
    c = total_chern(V)
    h = P.ring.gen(0)
    assert c[1] == h * 3
    assert c[2] == h ** 2 * 2
    assert c[3] == P.ring.zero()
