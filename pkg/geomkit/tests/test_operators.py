import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geomkit.errors import ContractionError, DomainError, ParameterError, ReductionError
from geomkit.operators import (
    SeqVector, TraceClassDecomposition, apply_series, dense_kernel_dims, diagonal_mult, fredholm_reduce,
    minimal_split, neumann_depth, neumann_inverse, p_norm, random_trace_class, row_sup_certificate,
    schatten_holder_check, sigma_eigen_check, singular_value_product_check, singular_values,
    spectrum_finite, tail_bound, tail_psum, trace_class_from_json, trace_class_to_json,
)
from geomkit.series import MultiSeries, exp_series, parse_series

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load(name):
    with open(FIXTURES / name, encoding="utf-8") as f:
        return json.load(f)


# ---------- Norms ----------

@pytest.mark.parametrize("values, p, expected", [
    ([Fraction(1, 4), Fraction(-1, 9)], Fraction(1, 2), Fraction(1, 2) + Fraction(1, 3)),
    ([3, -4], 2, 5),
    ([1, 1], 1, 2),
    ([1, Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)], 1, Fraction(15, 8)),
])
def test_exact_p_norm(values, p, expected):
    assert p_norm(values, p) == expected


def test_float_p_norm():
    assert p_norm(SeqVector.of([0.5, 0.5]), 3.0) == pytest.approx((2 * 0.125) ** (1 / 3))


def test_p_norm_needs_positive_p():
    with pytest.raises(ParameterError):
        p_norm([1, 2], 0)


def test_diagonal_tail():
    lam = SeqVector.of([1, Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)], exact=True)
    x = SeqVector.of([1, -1, 1, -1], exact=True)
    assert diagonal_mult(lam, x).entries == (1, Fraction(-1, 2), Fraction(1, 4), Fraction(-1, 8))
    measured = tail_psum(lam, x, 2, 1)
    assert measured == pytest.approx(0.375)
    assert measured <= tail_bound(lam, 2, 1, 1)


# ---------- Singular values ----------

def test_singular_values_of_fixture():
    A = np.array(load("matrices.json")["A"], dtype=float)
    spectrum = singular_values(A)
    assert spectrum.sigma == pytest.approx(sorted(np.linalg.svd(A, compute_uv=False), reverse=True))
    assert spectrum.residual < 1e-9
    assert spectrum.schatten_sum(2) == pytest.approx(float(np.sum(A * A)))


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32 - 1))
def test_random_schatten_inequalities(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((4, 4))
    B = rng.standard_normal((4, 4))
    assert sigma_eigen_check(A) < 1e-9
    assert schatten_holder_check(A, B, 2, 2)["holds"]
    assert schatten_holder_check(A, B, 1, 3)["holds"]
    assert singular_value_product_check(A, B)


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32 - 1))
def test_singular_values_survive_orthogonal_conjugation(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((4, 4))
    Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    assert singular_values(Q @ A @ Q.T).sigma == pytest.approx(singular_values(A).sigma, abs=1e-9)


def test_holder_reports_conjugate_exponent():
    data = load("matrices.json")
    check = schatten_holder_check(data["A"], data["B"], 2, 2)
    assert check["r"] == pytest.approx(1.0)
    assert check["lhs"] <= check["rhs"]


# ---------- Neumann series ----------

@pytest.mark.parametrize("s, tol, depth", [
    (Fraction(1, 2), Fraction(1, 8), 3),
    (Fraction(1, 2), Fraction(1), 0),
    (Fraction(1, 10), Fraction(1, 10 ** 6), 6),
])
def test_neumann_depth(s, tol, depth):
    assert neumann_depth(s, tol) == depth


def test_neumann_inverse_of_contraction():
    H = np.array([[float(Fraction(x)) for x in row] for row in load("contraction.json")["A"]])
    assert row_sup_certificate(H) == pytest.approx(0.5)
    result = neumann_inverse(H, tol=1e-10)
    assert result.bound <= 1e-10
    assert result.inverse == pytest.approx(np.linalg.inv(np.eye(2) - H), abs=1e-9)


def test_neumann_inverse_of_nilpotent():
    result = neumann_inverse(np.array([[0.0, 0.5], [0.0, 0.0]]))
    assert result.certificate == 0.5
    assert result.inverse == pytest.approx(np.array([[1.0, 0.5], [0.0, 1.0]]))
    assert result.residual == 0.0


def test_neumann_residual_within_bound():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        H = rng.uniform(-1.0, 1.0, (5, 5))
        H *= rng.uniform(0.1, 0.95) / row_sup_certificate(H)
        result = neumann_inverse(H, tol=1e-8)
        assert result.residual <= result.bound + 1e-12
        assert result.bound <= 1e-8


def test_neumann_refuses_non_contraction():
    with pytest.raises(ContractionError):
        neumann_inverse(np.array([[0.5, 0.5], [0.5, 0.5]]))
    with pytest.raises(ContractionError):
        neumann_inverse(np.array([[0.1, 0.0], [0.0, 0.1]]), s=0.1)


# ---------- Fredholm reduction ----------

def test_trace_class_fixture_exact():
    T = trace_class_from_json(load("trace_class.json"), exact=True)
    assert T.exact
    reduction = fredholm_reduce(T)
    assert reduction.N == 1
    assert reduction.tail_sum == Fraction(7, 8)
    assert (reduction.kernel_dim, reduction.cokernel_dim) == (1, 1)
    assert reduction.index == 0
    assert dense_kernel_dims(T) == (1, 1)


def test_trace_class_fixture_float():
    T = trace_class_from_json(load("trace_class.json"), exact=False)
    reduction = fredholm_reduce(T, tol=1e-12)
    assert reduction.kernel_dim == 1
    assert dense_kernel_dims(T) == (1, 1)


def test_matrix_shape_splits_rows():
    T = trace_class_from_json({"matrix": [["1/2", "-1/4"], [0, "1/8"]]}, exact=True)
    assert T.lambdas == (Fraction(1, 2), Fraction(1, 8))
    assert T.rows[0].entries == (1, Fraction(-1, 2))
    assert T.matrix() == [[Fraction(1, 2), Fraction(-1, 4)], [0, Fraction(1, 8)]]
    assert trace_class_from_json(trace_class_to_json(T), exact=True) == T


def test_row_sup_above_one_is_rejected():
    with pytest.raises(ParameterError):
        trace_class_from_json({"lambdas": [1], "rows": [[2, 0]], "dim": 2}, exact=True)


def test_no_admissible_split():
    T = TraceClassDecomposition(p=Fraction(1), lambdas=(Fraction(1), Fraction(1)),
                                rows=(SeqVector.of([1, 0], True), SeqVector.of([0, 1], True)), dim=2)
    assert minimal_split(T) == 2
    with pytest.raises(ReductionError):
        minimal_split(T, max_split=1)


@settings(max_examples=10)
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 3))
def test_planted_kernel_is_found(seed, kernel_dim):
    T = random_trace_class(np.random.default_rng(seed), 12, kernel_dim=kernel_dim, exact=True)
    reduction = fredholm_reduce(T)
    assert reduction.kernel_dim == dense_kernel_dims(T)[0]
    assert reduction.kernel_dim >= kernel_dim


@pytest.mark.parametrize("seed", range(50))
def test_float_reduction_matches_dense_rank(seed):
    T = random_trace_class(np.random.default_rng(seed), 40, exact=False)
    reduction = fredholm_reduce(T, exact=False, tol=1e-12, rank_tol=1e-8)
    assert reduction.kernel_dim == dense_kernel_dims(T, exact=False, rank_tol=1e-8)[0]


# ---------- Spectra and series ----------

def test_spectrum_of_symmetric_matrix():
    values = spectrum_finite(load("matrices.json")["A"])
    expected = sorted(np.linalg.eigvalsh(np.array([[2.0, 1.0], [1.0, 3.0]])))
    assert [v.real for v in values] == pytest.approx(expected)
    assert all(v.imag == 0 for v in values)


@pytest.mark.parametrize("A, expected", [
    ([[0.0, 1.0], [0.0, 0.0]], [0, 0]),
    ([[0.0, -1.0], [1.0, 0.0]], [-1j, 1j]),
])
def test_spectrum_examples(A, expected):
    assert spectrum_finite(A) == pytest.approx(expected, abs=1e-12)


def test_geometric_series_of_contraction():
    A = np.array([[0.25, 0.125], [0.125, 0.25]])
    f = MultiSeries.from_coefficients([1] * 31)
    result = apply_series(f, A, 1)
    assert result.ratio < 1
    assert result.matrix == pytest.approx(np.linalg.inv(np.eye(2) - A), abs=result.tail_bound + 1e-12)


def test_series_outside_radius():
    with pytest.raises(DomainError):
        apply_series(parse_series("1 + x1", trunc=3), np.eye(2), Fraction(1, 2))


def test_exponential_of_nilpotent():
    N = np.array([[0.0, 1.0], [0.0, 0.0]])
    result = apply_series(exp_series(8), N, 4)
    assert result.matrix == pytest.approx(np.eye(2) + N, abs=1e-12)
