"""Finite-truncation operator calculus.

Float work goes through numpy (SVD, eigensolves, dense solves); rank-critical
paths also run in exact mode over ``Fraction`` via ``linalg``.

p_norm convention: for p <= 1 the norm is sum |x_i|^p (no root), for p > 1 it
is (sum |x_i|^p)^(1/p).
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg
from .errors import (
    ContractionError, DimensionError, DomainError, NumericError, ParameterError, ReductionError,
)
from .series import MultiSeries, rational_power, sup_weighted_coefficient, to_fraction

logger = logging.getLogger(__name__)

ORTHOGONALITY_TOL = 1e-9
EIGEN_RESIDUAL_TOL = 1e-8


# ---------- Types ----------

@dataclass(frozen=True)
class SeqVector:
    entries: tuple
    exact: bool = False

    @classmethod
    def of(cls, values: Sequence, exact: bool = False) -> "SeqVector":
        if exact:
            return cls(tuple(to_fraction(v) for v in values), True)
        return cls(tuple(float(v) for v in values), False)

    def __len__(self):
        return len(self.entries)

    def sup(self):
        return max((abs(x) for x in self.entries), default=0)


@dataclass(frozen=True)
class TraceClassDecomposition:
    """Matrix of size ``dim`` whose i-th row is lambdas[i] * rows[i]; later rows are zero."""
    p: Fraction
    lambdas: tuple
    rows: tuple[SeqVector, ...]
    dim: int

    def __post_init__(self):
        if len(self.lambdas) != len(self.rows):
            raise DimensionError("Need one scale per row")
        if len(self.rows) > self.dim:
            raise DimensionError(f"{len(self.rows)} rows exceed dimension {self.dim}")
        for i, (lam, row) in enumerate(zip(self.lambdas, self.rows)):
            if lam < 0:
                raise ParameterError(f"Row scale {i} is negative")
            if len(row) != self.dim:
                raise DimensionError(f"Row {i} has length {len(row)}, expected {self.dim}")
            if row.sup() > 1:
                raise ParameterError(f"Row {i} has sup-norm above 1")
        if not 0 < self.p <= 1:
            raise ParameterError(f"p must lie in (0, 1], got {self.p}")

    @property
    def exact(self) -> bool:
        return all(r.exact for r in self.rows) and all(isinstance(x, Fraction) for x in self.lambdas)

    def matrix(self, exact: bool | None = None):
        exact = self.exact if exact is None else exact
        if exact:
            zero = [Fraction(0)] * self.dim
            out = [[lam * x for x in row.entries] for lam, row in zip(self.lambdas, self.rows)]
            return out + [list(zero) for _ in range(self.dim - len(self.rows))]
        out = np.zeros((self.dim, self.dim))
        for i, (lam, row) in enumerate(zip(self.lambdas, self.rows)):
            out[i] = float(lam) * np.asarray([float(x) for x in row.entries])
        return out

    def tail_sum(self, start: int):
        return sum(self.lambdas[start:], Fraction(0) if self.exact else 0.0)


@dataclass(frozen=True)
class FiniteReduction:
    N: int
    E_prime: object
    tail_sum: object
    neumann_error: float
    neumann_depth: int
    kernel_dim: int
    cokernel_dim: int
    exact: bool

    @property
    def index(self) -> int:
        return self.kernel_dim - self.cokernel_dim


@dataclass(frozen=True)
class SingularSpectrum:
    sigma: tuple[float, ...]
    residual: float
    schatten: dict = field(default_factory=dict, compare=False)

    def schatten_sum(self, p) -> float:
        p = float(p)
        if p not in self.schatten:
            self.schatten[p] = float(sum(s ** p for s in self.sigma if s > 0))
        return self.schatten[p]


@dataclass(frozen=True)
class NeumannInverse:
    inverse: np.ndarray
    depth: int
    certificate: float
    bound: float
    residual: float


@dataclass(frozen=True)
class SeriesApplication:
    matrix: np.ndarray
    opnorm: float
    ratio: float
    tail_bound: float


# ---------- Matrix I/O ----------

def as_matrix(data, exact: bool = False):
    """List-of-rows JSON (numbers or "p/q" strings) to a Fraction matrix or ndarray."""
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise ParameterError("Matrix must be a list of rows")
    if data and any(len(r) != len(data[0]) for r in data):
        raise DimensionError("Ragged matrix")
    if exact:
        return [[to_fraction(str(x) if isinstance(x, float) else x) for x in row] for row in data]
    try:
        return np.asarray([[float(Fraction(x)) if isinstance(x, str) else float(x) for x in row] for row in data],
                          dtype=float).reshape(len(data), len(data[0]) if data else 0)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"Bad matrix entry: {exc}")


def trace_class_from_json(data, exact: bool = False) -> TraceClassDecomposition:
    """Read a decomposition from either shape:

      A) {"p": "1", "dim": d, "lambdas": [...], "rows": [[...], ...]}
      B) {"matrix": [[...], ...]}  (each row is split as its sup-norm times a unit row)
    """
    if not isinstance(data, dict):
        raise ParameterError("Trace-class input must be a JSON object")
    if "matrix" in data:
        A = as_matrix(data["matrix"], exact=exact)
        n = _require_square(A)
        lambdas, rows = [], []
        for row in A:
            lam = max((abs(x) for x in row), default=0)
            lambdas.append(Fraction(lam) if exact else float(lam))
            rows.append(SeqVector.of([x / lam if lam else 0 for x in row], exact=exact))
        return TraceClassDecomposition(p=to_fraction(str(data.get("p", 1))), lambdas=tuple(lambdas),
                                       rows=tuple(rows), dim=n)
    try:
        lambdas = data["lambdas"]
        rows = as_matrix(data["rows"], exact=exact)
        dim = int(data.get("dim", len(rows[0]) if len(rows) else 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterError(f"Trace-class input needs lambdas and rows: {exc}")
    if not isinstance(lambdas, list):
        raise ParameterError("lambdas must be a list")
    lambdas = tuple(as_matrix([lambdas], exact=exact)[0]) if lambdas else ()
    rows = tuple(SeqVector.of(list(r), exact=exact) for r in rows)
    return TraceClassDecomposition(p=to_fraction(str(data.get("p", 1))), lambdas=lambdas, rows=rows, dim=dim)


def trace_class_to_json(T: TraceClassDecomposition) -> dict:
    return {
        "p": str(T.p),
        "dim": T.dim,
        "lambdas": [str(x) if isinstance(x, Fraction) else x for x in T.lambdas],
        "rows": [[str(x) if isinstance(x, Fraction) else x for x in r.entries] for r in T.rows],
    }


def _require_square(A) -> int:
    n = len(A)
    if any(len(row) != n for row in A):
        raise DimensionError("Expected a square matrix")
    return n


# ---------- Norms ----------

def p_norm(x: SeqVector | Sequence, p):
    """Sum |x_i|^p for p <= 1, (sum |x_i|^p)^(1/p) for p > 1.

    Exact vectors with a rational p give a Fraction when every root is exact;
    otherwise the result is a float.
    """
    if not isinstance(x, SeqVector):
        x = SeqVector.of(x, exact=all(isinstance(v, (int, Fraction)) for v in x))
    p_exact = to_fraction(p) if not isinstance(p, float) else Fraction(p).limit_denominator(10 ** 6)
    if p_exact <= 0:
        raise ParameterError(f"p must be positive, got {p}")
    if x.exact:
        parts = [rational_power(abs(v), p_exact) for v in x.entries]
        if all(ok for _, ok in parts):
            total = sum((t for t, _ in parts), Fraction(0))
            if p_exact <= 1:
                return total
            root, ok = rational_power(total, 1 / p_exact)
            if ok:
                return root
    values = np.abs(np.asarray([float(v) for v in x.entries]))
    s = float(np.sum(values ** float(p)))
    return s if float(p) <= 1 else s ** (1.0 / float(p))


def singular_values(A) -> SingularSpectrum:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise DimensionError("Expected a matrix")
    if A.size == 0:
        return SingularSpectrum(sigma=(), residual=0.0)
    try:
        U, S, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD did not converge: {exc}")
    k = len(S)
    residual = max(
        float(np.max(np.abs(U.T @ U - np.eye(k)))),
        float(np.max(np.abs(Vt @ Vt.T - np.eye(k)))),
        float(np.max(np.abs((U * S) @ Vt - A))) / max(1.0, float(np.max(np.abs(A)))),
    )
    if residual > ORTHOGONALITY_TOL:
        raise NumericError("SVD orthogonality check failed", residual)
    sigma = tuple(sorted((float(s) for s in S), reverse=True))
    return SingularSpectrum(sigma=sigma, residual=residual)


def sigma_eigen_check(A, tol: float = 1e-9) -> float:
    """Largest gap between sigma_i^2 and the eigenvalues of A^T A, relative to sigma_max^2."""
    A = np.asarray(A, dtype=float)
    sigma = np.asarray(singular_values(A).sigma)
    if sigma.size == 0:
        return 0.0
    eig = np.sort(np.linalg.eigvalsh(A.T @ A))[::-1][:sigma.size]
    gap = float(np.max(np.abs(sigma ** 2 - eig))) / max(1.0, float(sigma[0]) ** 2)
    if gap > tol:
        logger.warning("schatten: sigma^2 and eig(A^T A) differ by %.3e", gap)
    return gap


def schatten_sum(A, p) -> float:
    return singular_values(A).schatten_sum(p)


def schatten_holder_check(A, B, p, q) -> dict:
    """||AB||_r <= ||A||_p ||B||_q for 1/r = 1/p + 1/q, with ||X||_t = (sum sigma^t)^(1/t)."""
    p, q = float(p), float(q)
    if p <= 0 or q <= 0:
        raise ParameterError("Schatten exponents must be positive")
    r = 1.0 / (1.0 / p + 1.0 / q)
    AB = np.asarray(A, dtype=float) @ np.asarray(B, dtype=float)
    lhs = schatten_sum(AB, r) ** (1.0 / r)
    rhs = schatten_sum(A, p) ** (1.0 / p) * schatten_sum(B, q) ** (1.0 / q)
    return {"r": r, "lhs": lhs, "rhs": rhs, "holds": lhs <= rhs * (1 + 1e-12) + 1e-12}


def singular_value_product_check(A, B, tol: float = 1e-9) -> bool:
    """sigma_{i+j}(AB) <= sigma_i(A) sigma_j(B), zero-based."""
    sa = singular_values(A).sigma
    sb = singular_values(B).sigma
    sab = singular_values(np.asarray(A, dtype=float) @ np.asarray(B, dtype=float)).sigma
    for i, a in enumerate(sa):
        for j, b in enumerate(sb):
            if i + j < len(sab) and sab[i + j] > a * b + tol:
                return False
    return True


# ---------- Diagonal maps ----------

def diagonal_mult(lam: SeqVector | Sequence, x: SeqVector | Sequence) -> SeqVector:
    lam = lam if isinstance(lam, SeqVector) else SeqVector.of(lam)
    x = x if isinstance(x, SeqVector) else SeqVector.of(x, exact=lam.exact)
    if len(lam) != len(x):
        raise DimensionError(f"Length mismatch: {len(lam)} vs {len(x)}")
    exact = lam.exact and x.exact
    return SeqVector(tuple(a * b for a, b in zip(lam.entries, x.entries)), exact)


def _outside(head, n: int) -> list[int]:
    head = set(range(head)) if isinstance(head, int) else set(head)
    return [i for i in range(n) if i not in head]


def tail_bound(lam: SeqVector | Sequence, head, p, C) -> float:
    """2^p C^p sum_{i not in head} |lambda_i|^p; ``head`` is an index set or a prefix length."""
    lam = lam if isinstance(lam, SeqVector) else SeqVector.of(lam)
    p, C = float(p), float(C)
    rest = _outside(head, len(lam))
    return 2 ** p * C ** p * float(sum(abs(float(lam.entries[i])) ** p for i in rest))


def tail_psum(lam: SeqVector | Sequence, x: SeqVector | Sequence, head, p) -> float:
    """Measured sum_{i not in head} |lambda_i x_i|^p."""
    y = diagonal_mult(lam, x)
    rest = _outside(head, len(y))
    return float(sum(abs(float(y.entries[i])) ** float(p) for i in rest))


# ---------- Neumann series ----------

def row_sup_certificate(H) -> float:
    """Sum over rows of the largest absolute entry; bounds every power: cert(H^j) <= cert(H)^j."""
    H = np.asarray(H, dtype=float)
    if H.size == 0:
        return 0.0
    return float(np.sum(np.max(np.abs(H), axis=1)))


def neumann_depth(s, tol) -> int:
    """Minimal J with s^(J+1) / (1 - s) <= tol."""
    s, tol = Fraction(s), Fraction(tol)
    if tol <= 0:
        raise ParameterError("Tolerance must be positive")
    J, power = 0, s
    while power / (1 - s) > tol:
        J += 1
        power *= s
    return J


def neumann_inverse(H, s=None, tol=1e-8) -> NeumannInverse:
    """(1 - H)^{-1} as 1 + H + ... + H^J."""
    H = np.asarray(H, dtype=float)
    n = _require_square(H)
    certificate = row_sup_certificate(H)
    s = certificate if s is None else float(s)
    if s < certificate - 1e-15:
        raise ContractionError(f"Declared bound {s} is below the row certificate {certificate}")
    if s >= 1:
        raise ContractionError(f"Neumann series needs a contraction, certificate is {s}")
    J = neumann_depth(s, tol)
    inverse = np.eye(n)
    power = np.eye(n)
    for _ in range(J):
        power = power @ H
        inverse = inverse + power
    residual = float(np.max(np.abs(inverse @ (np.eye(n) - H) - np.eye(n)))) if n else 0.0
    bound = s ** (J + 1) / (1 - s)
    logger.debug("neumann: certificate %.6g, depth %d, residual %.3e", s, J, residual)
    return NeumannInverse(inverse=inverse, depth=J, certificate=s, bound=bound, residual=residual)


# ---------- Fredholm reduction ----------

def minimal_split(T: TraceClassDecomposition, max_split: int | None = None) -> int:
    """Smallest N whose tail sum is below 1.

    The empty tail at N = len(lambdas) always qualifies, so ReductionError
    can only come from a max_split cap.
    """
    limit = len(T.lambdas) if max_split is None else min(max_split, len(T.lambdas))
    for N in range(limit + 1):
        if T.tail_sum(N) < 1:
            return N
    raise ReductionError(f"No split N <= {limit} has tail sum below 1")


def _exact_rank(M) -> int:
    return linalg.rank(M) if M and M[0] else 0


def fredholm_reduce(T: TraceClassDecomposition, exact: bool | None = None, tol=1e-8,
                    rank_tol: float = 1e-8, max_split: int | None = None) -> FiniteReduction:
    """Schur-complement reduction of 1 - f to the N x N matrix
    E' = (1 - E) - F (1 - H)^{-1} G, where (E F; G H) splits f at the minimal N.
    """
    exact = T.exact if exact is None else exact
    N = minimal_split(T, max_split)
    s = T.tail_sum(N)
    A = T.matrix(exact)
    d = T.dim
    logger.debug("fredholm: split N=%d, tail %s", N, s)
    if exact:
        E = [row[:N] for row in A[:N]]
        F = [row[N:] for row in A[:N]]
        G = [row[:N] for row in A[N:]]
        H = [row[N:] for row in A[N:]]
        one_minus_H = linalg.matsub(linalg.identity(d - N), H)
        correction = linalg.matmul(linalg.matmul(F, linalg.inverse(one_minus_H)), G) if N < d else \
            [[Fraction(0)] * N for _ in range(N)]
        E_prime = linalg.matsub(linalg.matsub(linalg.identity(N), E), correction)
        r = _exact_rank(E_prime)
        depth, error = 0, 0.0
    else:
        E, F, G, H = A[:N, :N], A[:N, N:], A[N:, :N], A[N:, N:]
        if N < d:
            neumann = neumann_inverse(H, s=max(float(s), row_sup_certificate(H)), tol=tol)
            depth, error = neumann.depth, neumann.bound
            E_prime = np.eye(N) - E - F @ neumann.inverse @ G
        else:
            depth, error = 0, 0.0
            E_prime = np.eye(N) - E
        r = int(np.linalg.matrix_rank(E_prime, tol=rank_tol)) if N else 0
    reduction = FiniteReduction(
        N=N, E_prime=E_prime, tail_sum=s, neumann_error=error, neumann_depth=depth,
        kernel_dim=N - r, cokernel_dim=N - r, exact=exact,
    )
    logger.info("fredholm: N=%d ker=%d coker=%d", N, reduction.kernel_dim, reduction.cokernel_dim)
    return reduction


def dense_kernel_dims(T: TraceClassDecomposition, exact: bool | None = None, rank_tol: float = 1e-8) -> tuple[int, int]:
    """ker/coker dimensions of 1 - f by a dense rank computation."""
    exact = T.exact if exact is None else exact
    d = T.dim
    if d == 0:
        return 0, 0
    if exact:
        r = _exact_rank(linalg.matsub(linalg.identity(d), T.matrix(True)))
    else:
        r = int(np.linalg.matrix_rank(np.eye(d) - T.matrix(False), tol=rank_tol))
    return d - r, d - r


def random_trace_class(rng: np.random.Generator, size: int, kernel_dim: int | None = None,
                       exact: bool = False, p=1) -> TraceClassDecomposition:
    """Random decomposition with ``kernel_dim`` planted rows e_i (scale 1), so 1 - f kills e_i.

    The remaining scales decay geometrically, which keeps every tail past the
    planted block below 1.
    """
    if kernel_dim is None:
        kernel_dim = int(rng.integers(0, 3))
    if kernel_dim > size:
        raise ParameterError("Planted kernel larger than the matrix")
    lambdas, rows = [], []
    for i in range(size):
        if i < kernel_dim:
            entries = [1 if j == i else 0 for j in range(size)]
            lam = 1
        elif exact:
            entries = [Fraction(int(rng.integers(-8, 9)), 8) for _ in range(size)]
            lam = Fraction(1, 2 ** (i - kernel_dim + 1))
        else:
            entries = list(rng.uniform(-1.0, 1.0, size))
            lam = float(rng.uniform(0.2, 0.9)) / 2 ** (i - kernel_dim)
        lambdas.append(Fraction(lam) if exact else float(lam))
        rows.append(SeqVector.of(entries, exact=exact))
    return TraceClassDecomposition(p=to_fraction(p), lambdas=tuple(lambdas), rows=tuple(rows), dim=size)


# ---------- Spectra and functional calculus ----------

def spectrum_finite(A, tol: float = EIGEN_RESIDUAL_TOL, check: bool = True) -> list[complex]:
    A = np.asarray(A, dtype=float)
    n = _require_square(A)
    if n == 0:
        raise DimensionError("Spectrum of an empty matrix")
    try:
        values, vectors = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"Eigensolver did not converge: {exc}")
    if check:
        residual = max(
            float(np.linalg.norm(A @ vectors[:, i] - values[i] * vectors[:, i])) for i in range(n)
        )
        if residual > tol:
            raise NumericError("Eigenpair residual too large", residual)
    return sorted((complex(v) for v in values), key=lambda z: (round(z.real, 12), round(z.imag, 12)))


def apply_series(f: MultiSeries, A, radius, coefficient_bound=None) -> SeriesApplication:
    """sum_n a_n A^n with tail bound B rho^(N+1) / (1 - rho), rho = ||A||_2 / radius.

    B defaults to max_n |a_n|_# radius^n over the stored coefficients.
    """
    if f.nvars != 1:
        raise DimensionError("apply_series needs a one-variable series")
    A = np.asarray(A, dtype=float)
    n = _require_square(A)
    radius = to_fraction(radius)
    if radius <= 0:
        raise ParameterError("Radius must be positive")
    opnorm = float(np.linalg.norm(A, 2)) if n else 0.0
    if opnorm >= float(radius):
        raise DomainError(f"Operator norm {opnorm:.6g} is not below the series radius {float(radius)}")
    complex_coeffs = not f.is_real()
    result = np.zeros((n, n), dtype=complex if complex_coeffs else float)
    power = np.eye(n)
    for k in range(f.trunc + 1):
        c = f.coefficient((k,))
        if c:
            value = complex(float(c.re), float(c.im)) if complex_coeffs else float(c.re)
            result = result + value * power
        power = power @ A
    ratio = opnorm / float(radius)
    B = float(sup_weighted_coefficient(f, radius) if coefficient_bound is None else coefficient_bound)
    tail = B * ratio ** (f.trunc + 1) / (1 - ratio)
    return SeriesApplication(matrix=result, opnorm=opnorm, ratio=ratio, tail_bound=tail)
