"""Weierstraß preparation and division for germs at the origin.

X1 is variable 0; X' = (X2, ..., Xn) are the rest. All results are exact
on the precision window of a series truncated at total degree N:

    X1-exponent + max(k, 1) * (X'-degree) <= N   and   X'-degree < M

where k is the X1-order of f and M the working order. Every monomial in the
window has total degree <= N, and neither the inductive preparation step nor
division by a monic g of X1-degree k moves information from outside the
window into it, so window coefficients depend only on known data.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .errors import DimensionError, DivisorError, ParameterError, RegularityError, RetryCapError
from .series import (
    ZERO, ExactScalar, MultiSeries, exponents_of_degree, invert_unit, multiply, restrict, substitute,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PreparedForm:
    k: int
    g: MultiSeries
    u: MultiSeries
    working_order: int

    @property
    def trunc(self) -> int:
        return self.g.trunc


# ---------- Window helpers ----------

def _xprime_degree(exp) -> int:
    return sum(exp[1:])


def window(k: int, trunc: int, order: int, slack: int = 0):
    """Predicate for the precision window, optionally shrunk by ``slack``."""
    weight = max(k, 1)

    def inside(exp) -> bool:
        d = _xprime_degree(exp)
        return d < order and exp[0] + weight * d <= trunc - slack

    return inside


def _split_x1(f: MultiSeries, k: int) -> tuple[MultiSeries, MultiSeries]:
    """(low, shifted high): f = low + X1^k * high, deg_X1 low < k."""
    low = f.filter(lambda e: e[0] < k)
    high = f.map_exponents(lambda e: (e[0] - k,) + tuple(e[1:]) if e[0] >= k else None)
    return low, high


def _x1_power(k: int, nvars: int, trunc: int) -> MultiSeries:
    return MultiSeries(nvars, trunc, {(k,) + (0,) * (nvars - 1): 1})


# ---------- Operations ----------

def x1_vanishing_order(f: MultiSeries) -> int:
    line = restrict(f, [0])
    if line.is_zero():
        raise RegularityError(
            "f(X1, 0, ..., 0) vanishes up to the truncation degree; change coordinates first"
        )
    return min(e[0] for e in line.terms)


def prepare(f: MultiSeries, order: int) -> PreparedForm:
    """Inductive preparation f = g * u.

    Starts from g = X1^k and u = f(X1, 0, ..., 0) / X1^k. Each round splits
    (f - g u) u1^{-1} by X1^k into a part of X1-degree < k, added to g, and
    a quotient that, multiplied back by u1, is added to u. After ``order - 1``
    rounds f - g u lies in (X2, ..., Xn)^order.
    """
    if order < 1:
        raise ParameterError(f"Working order must be at least 1, got {order}")
    k = x1_vanishing_order(f)
    n, N = f.nvars, f.trunc
    inside = window(k, N, order)
    if k == 0:
        return PreparedForm(k=0, g=MultiSeries.one(n, N), u=f.filter(inside), working_order=order)

    f = f.filter(inside)
    _, u1 = _split_x1(restrict(f, [0]), k)
    u1_inv = invert_unit(u1)
    g = _x1_power(k, n, N)
    u = u1
    for step in range(1, order):
        defect = f - multiply(g, u, keep=inside)
        if defect.is_zero():
            logger.debug("prepare: exact after %d rounds", step - 1)
            break
        h, quotient = _split_x1(multiply(defect, u1_inv, keep=inside), k)
        g = g + h
        u = u + multiply(quotient, u1, keep=inside)
        logger.debug("prepare: round %d, |h|=%d terms, |defect|=%d terms", step, len(h.terms), len(defect.terms))
    u = u.filter(window(k, N, order, slack=k))
    return PreparedForm(k=k, g=g.filter(inside), u=u, working_order=order)


def check_divisor(g: MultiSeries) -> int:
    """Validate a monic Weierstraß polynomial in X1 and return its degree k."""
    top = max((e[0] for e in g.terms), default=None)
    if top is None:
        raise DivisorError("Divisor is zero")
    k = top
    lead = [(e, c) for e, c in g.terms.items() if e[0] == k]
    if lead != [((k,) + (0,) * (g.nvars - 1), ExactScalar(1))]:
        raise DivisorError(f"Divisor is not monic in X1 of degree {k}")
    for e in g.terms:
        if e[0] < k and _xprime_degree(e) == 0:
            raise DivisorError(f"Coefficient of X1^{e[0]} in the divisor does not vanish at the origin")
    return k


def divide(f: MultiSeries, g: MultiSeries | PreparedForm, order: int | None = None) -> tuple[MultiSeries, MultiSeries]:
    """Weierstraß division f = q g + r with deg_X1 r < k, exact on the window."""
    if isinstance(g, PreparedForm):
        order = g.working_order if order is None else order
        g = g.g
    if order is None or order < 1:
        raise ParameterError("divide needs a working order of at least 1")
    if g.nvars != f.nvars or g.trunc != f.trunc:
        raise DimensionError("Dividend and divisor must share nvars and trunc")
    k = check_divisor(g)
    n, N = f.nvars, f.trunc
    inside = window(k, N, order)
    tail = g - _x1_power(k, n, N)
    q = MultiSeries.zero(n, N)
    r = MultiSeries.zero(n, N)
    current = f.filter(inside)
    # each round raises the X'-degree of what is left by at least one
    for step in range(order + 1):
        if current.is_zero():
            break
        low, shifted = _split_x1(current, k)
        r = r + low
        q = q + shifted
        current = -multiply(shifted, tail, keep=inside)
        logger.debug("divide: round %d, %d terms carried", step, len(current.terms))
    return q.filter(window(k, N, order, slack=k)), r


# ---------- Linear-system oracle ----------

def prepare_linear(f: MultiSeries, order: int) -> PreparedForm:
    """Solve for g and u order by order in (X2, ..., Xn) as exact linear systems.

    At X'-degree d the unknown parts g_d, u_d satisfy
    X1^k u_d + g_d u_0 = f_d - sum_{0<a<d} g_a u_{d-a}; for a fixed X'-monomial
    this is a square system in the X1-coefficients.
    """
    if order < 1:
        raise ParameterError(f"Working order must be at least 1, got {order}")
    k = x1_vanishing_order(f)
    n, N = f.nvars, f.trunc
    inside = window(k, N, order)
    if k == 0:
        return PreparedForm(k=0, g=MultiSeries.one(n, N), u=f.filter(inside), working_order=order)

    f = f.filter(inside)
    by_degree: dict[int, MultiSeries] = {
        d: f.filter(lambda e, d=d: _xprime_degree(e) == d) for d in range(order)
    }
    _, u0 = _split_x1(by_degree[0], k)
    g_parts: dict[int, MultiSeries] = {}
    u_parts: dict[int, MultiSeries] = {0: u0}
    for d in range(1, order):
        if k * d > N:
            break
        known = by_degree[d]
        for a in range(1, d):
            known = known - multiply(g_parts[a], u_parts[d - a], keep=inside)
        g_terms: dict = {}
        u_terms: dict = {}
        top = N - k * d
        for eprime in exponents_of_degree(n - 1, d):
            unknowns = [("g", j) for j in range(min(k, top + 1))]
            unknowns += [("u", j) for j in range(top - k + 1)]
            rows = []
            rhs = []
            for j in range(top + 1):
                row = []
                for kind, jj in unknowns:
                    if kind == "u":
                        row.append(ExactScalar(1) if j == jj + k else ZERO)
                    else:
                        row.append(u0.coefficient((j - jj,) + (0,) * (n - 1)) if j >= jj else ZERO)
                rows.append(row)
                rhs.append(known.coefficient((j,) + eprime))
            solution = linalg.solve(rows, rhs)
            for (kind, jj), value in zip(unknowns, solution):
                if value:
                    (g_terms if kind == "g" else u_terms)[(jj,) + eprime] = value
        g_parts[d] = MultiSeries(n, N, g_terms)
        u_parts[d] = MultiSeries(n, N, u_terms)
        logger.debug("prepare_linear: X'-degree %d solved", d)
    g = _x1_power(k, n, N)
    for part in g_parts.values():
        g = g + part
    u = MultiSeries.zero(n, N)
    for part in u_parts.values():
        u = u + part
    return PreparedForm(k=k, g=g.filter(inside), u=u.filter(window(k, N, order, slack=k)), working_order=order)


def reconstruction_defect(f: MultiSeries, form: PreparedForm) -> MultiSeries:
    """f - g u on the window; zero exactly when the preparation is correct."""
    inside = window(form.k, f.trunc, form.working_order)
    return f.filter(inside) - multiply(form.g, form.u, keep=inside)


# ---------- Coordinate changes ----------

def apply_linear_change(f: MultiSeries, matrix) -> MultiSeries:
    """Substitute X_i -> sum_j C_ij X_j."""
    n = f.nvars
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise DimensionError(f"Coordinate change must be {n}x{n}")
    images = [
        MultiSeries(n, f.trunc, {
            tuple(1 if t == j else 0 for t in range(n)): int(matrix[i][j])
            for j in range(n) if matrix[i][j]
        })
        for i in range(n)
    ]
    return substitute(f, images)


def random_unimodular(rng: np.random.Generator, n: int, steps: int | None = None) -> list[list[int]]:
    """Random integer matrix of determinant +-1 from elementary row operations and a permutation."""
    C = np.eye(n, dtype=np.int64)
    for _ in range(steps if steps is not None else 2 * n):
        if n < 2:
            break
        i, j = rng.choice(n, size=2, replace=False)
        c = int(rng.choice([-2, -1, 1, 2]))
        C[i] += c * C[j]
    C = C[rng.permutation(n)]
    return [[int(x) for x in row] for row in C]


def generic_coordinate_change(f: MultiSeries, seed: int, retry_cap: int = 16) -> tuple[MultiSeries, list[list[int]], int]:
    """Random unimodular substitution making f X1-regular.

    Attempt t uses seed + t, so any attempt is reproducible on its own.
    Returns (f', change matrix, X1-order of f').
    """
    if f.is_zero():
        raise ParameterError("Cannot make the zero series regular")
    for attempt in range(retry_cap):
        attempt_seed = seed + attempt
        change = random_unimodular(np.random.default_rng(attempt_seed), f.nvars)
        changed = apply_linear_change(f, change)
        try:
            k = x1_vanishing_order(changed)
        except RegularityError:
            logger.debug("coordinate change: seed %d not regular, retrying", attempt_seed)
            continue
        logger.debug("coordinate change: seed %d gives order %d", attempt_seed, k)
        return changed, change, k
    logger.warning("coordinate change: %d attempts exhausted", retry_cap)
    raise RetryCapError(f"No X1-regular coordinates after {retry_cap} attempts", last_seed=seed + retry_cap - 1)


def random_regular_series(rng: np.random.Generator, nvars: int, trunc: int, max_k: int = 3,
                          density: float = 0.35) -> MultiSeries:
    """Sparse series with small rational coefficients and X1-order in 1..max_k."""
    k = int(rng.integers(1, max_k + 1))
    terms = {(k,) + (0,) * (nvars - 1): Fraction(int(rng.integers(1, 4)), int(rng.integers(1, 3)))}
    for total in range(1, trunc + 1):
        for exp in exponents_of_degree(nvars, total):
            if exp[0] < k and sum(exp[1:]) == 0:
                continue
            if exp in terms or rng.random() > density / total:
                continue
            terms[exp] = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
    return MultiSeries(nvars, trunc, terms)
