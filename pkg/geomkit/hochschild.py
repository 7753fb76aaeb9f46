"""Hochschild homology of polynomial rings through the Koszul resolution.

A = Q[x_1..x_n], B = A (x) A = Q[x_1..x_n, y_1..y_n]. The Koszul complex on
x_j - y_j resolves A over B; each exterior generator e_j has internal degree
1, so every internal degree m gives a finite complex of Q-vector spaces.
Tensoring down to A (y_j -> x_j) computes HH_*(A).
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb

from . import linalg
from .errors import NumericError, ParameterError
from .series import exponents_of_degree

logger = logging.getLogger(__name__)

Monomial = tuple[int, ...]
Subset = tuple[int, ...]
BasisElement = tuple[Monomial, Subset]


@dataclass
class GradedComplex:
    """Chain complex K_length -> ... -> K_0, split by internal degree 0..max_degree.

    ``bases[(i, m)]`` lists the basis of K_i in internal degree m and
    ``differentials[(i, m)]`` is the matrix of d: K_i -> K_{i-1} there
    (rows indexed by the basis of K_{i-1}).
    """
    ring_vars: int
    length: int
    max_degree: int
    bases: dict = field(default_factory=dict)
    differentials: dict = field(default_factory=dict)

    def dim(self, i: int, m: int) -> int:
        return len(self.bases.get((i, m), ()))

    def dims(self, i: int) -> list[int]:
        return [self.dim(i, m) for m in range(self.max_degree + 1)]

    def rank(self, i: int, m: int) -> int:
        matrix = self.differentials.get((i, m))
        if not matrix or not matrix[0]:
            return 0
        return linalg.rank(matrix)


def _koszul_basis(ring_vars: int, length: int, i: int, m: int) -> list[BasisElement]:
    if m < i:
        return []
    return [
        (mono, subset)
        for subset in combinations(range(length), i)
        for mono in exponents_of_degree(ring_vars, m - i)
    ]


def _differential_image(images: list[dict], mono: Monomial, subset: Subset) -> dict:
    """d(mono * e_S) = sum_t (-1)^t mono * image(e_{s_t}) * e_{S - s_t}."""
    out: dict = {}
    for t, j in enumerate(subset):
        sign = -1 if t % 2 else 1
        rest = subset[:t] + subset[t + 1:]
        for exp, c in images[j].items():
            key = (tuple(a + b for a, b in zip(mono, exp)), rest)
            out[key] = out.get(key, Fraction(0)) + sign * c
    return {k: v for k, v in out.items() if v}


def _matrix(rows: list, cols: list, column_images: list[dict]) -> list[list[Fraction]]:
    index = {b: r for r, b in enumerate(rows)}
    M = [[Fraction(0)] * len(cols) for _ in rows]
    for c, image in enumerate(column_images):
        for key, value in image.items():
            M[index[key]][c] += value
    return M


def koszul_complex(ring_vars: int, images: list[dict], max_degree: int,
                   project=None, source_vars: int | None = None) -> GradedComplex:
    """Koszul complex over Q[ring_vars variables] on homogeneous degree-1 images.

    With ``project`` (a monomial map from ``source_vars`` to ``ring_vars``
    variables), the differential is computed upstairs on a lift and pushed
    down, which is the base change K (x)_B A.
    """
    length = len(images)
    cx = GradedComplex(ring_vars=ring_vars, length=length, max_degree=max_degree)
    for i in range(length + 1):
        for m in range(max_degree + 1):
            cx.bases[(i, m)] = _koszul_basis(ring_vars, length, i, m)
    for i in range(1, length + 1):
        for m in range(max_degree + 1):
            cols = cx.bases[(i, m)]
            rows = cx.bases[(i - 1, m)]
            column_images = []
            for mono, subset in cols:
                if project is None:
                    column_images.append(_differential_image(images, mono, subset))
                    continue
                lift = tuple(mono) + (0,) * (source_vars - ring_vars)
                upstairs = _differential_image(images, lift, subset)
                down: dict = {}
                for (m2, s2), v in upstairs.items():
                    key = (project(m2), s2)
                    down[key] = down.get(key, Fraction(0)) + v
                column_images.append({k: v for k, v in down.items() if v})
            cx.differentials[(i, m)] = _matrix(rows, cols, column_images)
    return cx


def check_composites(cx: GradedComplex) -> bool:
    """d_{i-1} d_i = 0 in every internal degree, exactly."""
    for i in range(2, cx.length + 1):
        for m in range(cx.max_degree + 1):
            upper = cx.differentials[(i, m)]
            lower = cx.differentials[(i - 1, m)]
            if not upper or not upper[0] or not lower:
                continue
            product = linalg.matmul(lower, upper)
            if any(x for row in product for x in row):
                return False
    return True


def _validate(n: int, D: int):
    if n < 1:
        raise ParameterError(f"Need at least one variable, got {n}")
    if D < 1:
        raise ParameterError(f"Degree bound must be at least 1, got {D}")


def koszul_resolution(n: int, D: int) -> GradedComplex:
    """Koszul resolution of A over A (x) A; variables x_j are 0..n-1, y_j are n..2n-1."""
    _validate(n, D)
    images = []
    for j in range(n):
        x = tuple(1 if t == j else 0 for t in range(2 * n))
        y = tuple(1 if t == n + j else 0 for t in range(2 * n))
        images.append({x: Fraction(1), y: Fraction(-1)})
    cx = koszul_complex(2 * n, images, D)
    if not check_composites(cx):
        raise NumericError("Koszul differentials do not compose to zero")
    logger.debug("koszul: n=%d D=%d dims %s", n, D, [cx.dims(i) for i in range(n + 1)])
    return cx


def homology_dims(cx: GradedComplex) -> dict[int, list[int]]:
    """dim H_i in each internal degree: dim K_i - rank d_i - rank d_{i+1}."""
    out = {}
    for i in range(cx.length + 1):
        row = []
        for m in range(cx.max_degree + 1):
            r_out = cx.rank(i, m) if i >= 1 else 0
            r_in = cx.rank(i + 1, m) if i + 1 <= cx.length else 0
            row.append(cx.dim(i, m) - r_out - r_in)
        out[i] = row
    return out


def monomial_count(nvars: int, degree: int) -> int:
    if degree < 0:
        return 0
    return comb(degree + nvars - 1, nvars - 1)


@dataclass(frozen=True)
class AcyclicityReport:
    n: int
    D: int
    h0_dims: tuple[int, ...]
    higher: dict
    acyclic: bool
    h0_matches: bool

    @property
    def passed(self) -> bool:
        return self.acyclic and self.h0_matches


def resolution_acyclicity_check(n: int, D: int) -> AcyclicityReport:
    """Positive-degree homology vanishes and H_0 has the graded dimensions of A.

    Every internal degree m <= D is a complete finite complex, so vanishing is
    checked for all of them.
    """
    cx = koszul_resolution(n, D)
    dims = homology_dims(cx)
    higher = {i: dims[i] for i in range(1, n + 1)}
    acyclic = all(d == 0 for row in higher.values() for d in row)
    expected_h0 = [monomial_count(n, m) for m in range(D + 1)]
    report = AcyclicityReport(
        n=n, D=D, h0_dims=tuple(dims[0]), higher=higher,
        acyclic=acyclic, h0_matches=dims[0] == expected_h0,
    )
    if not report.passed:
        logger.warning("koszul: resolution check failed for n=%d D=%d", n, D)
    return report


def tensor_down(n: int, D: int) -> GradedComplex:
    """K (x)_B A: the resolution with y_j sent to x_j."""
    _validate(n, D)
    images = []
    for j in range(n):
        x = tuple(1 if t == j else 0 for t in range(2 * n))
        y = tuple(1 if t == n + j else 0 for t in range(2 * n))
        images.append({x: Fraction(1), y: Fraction(-1)})

    def project(mono: Monomial) -> Monomial:
        return tuple(mono[j] + mono[n + j] for j in range(n))

    return koszul_complex(n, images, D, project=project, source_vars=2 * n)


def hochschild_homology(n: int, D: int) -> dict[int, list[int]]:
    """dim HH_i(A) in internal degrees 0..D for i = 0..n; HH_i = 0 beyond n."""
    dims = homology_dims(tensor_down(n, D))
    logger.debug("hochschild: n=%d D=%d -> %s", n, D, dims)
    return dims


def omega_model(n: int, D: int) -> dict[int, list[int]]:
    """dim of Omega^i in internal degree m: binom(n, i) * #monomials of degree m - i."""
    return {i: [comb(n, i) * monomial_count(n, m - i) for m in range(D + 1)] for i in range(n + 1)}


@dataclass(frozen=True)
class HKRReport:
    n: int
    D: int
    computed: dict
    expected: dict
    diffs: tuple

    @property
    def passed(self) -> bool:
        return not self.diffs


def hkr_check(n: int, D: int) -> HKRReport:
    computed = hochschild_homology(n, D)
    expected = omega_model(n, D)
    diffs = tuple(
        {"i": i, "m": m, "computed": computed[i][m], "expected": expected[i][m]}
        for i in range(n + 1) for m in range(D + 1)
        if computed[i][m] != expected[i][m]
    )
    report = HKRReport(n=n, D=D, computed=computed, expected=expected, diffs=diffs)
    logger.info("hkr: n=%d D=%d %s", n, D, "pass" if report.passed else "FAIL")
    return report


def euler_consistent(cx: GradedComplex) -> bool:
    """Per internal degree, sum (-1)^i dim K_i equals sum (-1)^i dim H_i."""
    homology = homology_dims(cx)
    for m in range(cx.max_degree + 1):
        terms = sum((-1) ** i * cx.dim(i, m) for i in range(cx.length + 1))
        classes = sum((-1) ** i * homology[i][m] for i in range(cx.length + 1))
        if terms != classes:
            return False
    return True


def euler_characteristic_check(n: int, D: int) -> dict[str, bool]:
    return {
        "resolution": euler_consistent(koszul_resolution(n, D)),
        "hochschild": euler_consistent(tensor_down(n, D)),
    }
