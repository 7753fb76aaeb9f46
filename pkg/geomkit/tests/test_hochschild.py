from math import comb

import pytest

from geomkit.errors import ParameterError
from geomkit.hochschild import (
    check_composites, euler_characteristic_check, hkr_check, hochschild_homology, homology_dims,
    koszul_resolution, monomial_count, omega_model, resolution_acyclicity_check, tensor_down,
)


@pytest.mark.parametrize("n, D", [(1, 5), (2, 4), (3, 3)])
def test_hkr(n, D):
    report = hkr_check(n, D)
    assert report.passed, report.diffs
    assert report.computed == omega_model(n, D)


@pytest.mark.parametrize("n, D", [(1, 4), (2, 3), (3, 2)])
def test_resolution_is_acyclic(n, D):
    report = resolution_acyclicity_check(n, D)
    assert report.acyclic
    assert report.h0_matches
    assert list(report.h0_dims) == [monomial_count(n, m) for m in range(D + 1)]


def test_koszul_dimensions():
    cx = koszul_resolution(2, 3)
    # K_i in internal degree m: binom(2, i) monomials of degree m - i in four variables
    for i in range(3):
        assert cx.dims(i) == [comb(2, i) * monomial_count(4, m - i) for m in range(4)]
    assert check_composites(cx)


def test_one_variable_hochschild():
    dims = hochschild_homology(1, 4)
    assert dims[0] == [1, 1, 1, 1, 1]
    assert dims[1] == [0, 1, 1, 1, 1]


def test_tensored_complex_has_zero_differential():
    cx = tensor_down(2, 3)
    assert all(cx.rank(i, m) == 0 for i in (1, 2) for m in range(4))
    assert homology_dims(cx)[2] == cx.dims(2)


def test_euler_characteristics():
    assert euler_characteristic_check(2, 3) == {"resolution": True, "hochschild": True}


@pytest.mark.parametrize("n, D", [(0, 3), (2, 0)])
def test_bad_parameters(n, D):
    with pytest.raises(ParameterError):
        hkr_check(n, D)
