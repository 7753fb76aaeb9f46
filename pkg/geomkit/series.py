"""Truncated multivariate power series over the Gaussian rationals.

A ``MultiSeries`` is a sparse map from exponent vectors to ``ExactScalar``
coefficients, truncated at a total-degree bound. Values are immutable; every
operation returns a new series.
"""
import itertools
import logging
import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from tokenize import TokenError
from types import MappingProxyType
from typing import Callable, Iterable, Mapping

import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.polyerrors import CoercionFailed, PolynomialError

from .errors import DimensionError, DivergenceError, NonUnitError, ParameterError, ParseError

logger = logging.getLogger(__name__)

Exponent = tuple[int, ...]

# bits of precision used when a p-th power has to be bounded from above
ROOT_PRECISION_BITS = 40


def to_fraction(value) -> Fraction:
    """Coerce ints, Fractions, sympy Rationals and "p/q" strings."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParameterError(f"Not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ParameterError(f"Not a rational: {value!r}")
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    raise ParameterError(f"Not a rational: {value!r}")


# ---------- Scalars ----------

@dataclass(frozen=True)
class ExactScalar:
    """An element re + im*i of Q(i)."""
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", to_fraction(self.re))
        object.__setattr__(self, "im", to_fraction(self.im))

    @classmethod
    def of(cls, value) -> "ExactScalar":
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, (tuple, list)) and len(value) == 2:
            return cls(value[0], value[1])
        return cls(to_fraction(value))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __neg__(self):
        return ExactScalar(-self.re, -self.im)

    def __add__(self, other):
        other = _coerce_scalar(other)
        if other is NotImplemented:
            return other
        return ExactScalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_scalar(other)
        if other is NotImplemented:
            return other
        return ExactScalar(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce_scalar(other)
        if other is NotImplemented:
            return other
        if not self.im and not other.im:
            return ExactScalar(self.re * other.re)
        return ExactScalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "ExactScalar":
        return ExactScalar(self.re, -self.im)

    def abs_squared(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "ExactScalar":
        norm = self.abs_squared()
        if not norm:
            raise ZeroDivisionError("ExactScalar division by zero")
        return ExactScalar(self.re / norm, -self.im / norm)

    def __truediv__(self, other):
        other = _coerce_scalar(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return ExactScalar.of(other) * self.inverse()

    def sharp_abs(self) -> Fraction:
        """|re| + |im|: rational, subadditive, and within a factor 2 of |z|."""
        return abs(self.re) + abs(self.im)

    def abs_bounds(self) -> tuple[Fraction, Fraction]:
        """Rational (lower, upper) bounds on |z|, exact on the axes."""
        if not self.im:
            return abs(self.re), abs(self.re)
        if not self.re:
            return abs(self.im), abs(self.im)
        sharp = self.sharp_abs()
        return sharp / 2, sharp

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


def _coerce_scalar(value):
    if isinstance(value, ExactScalar):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return ExactScalar(value)
    return NotImplemented


ZERO = ExactScalar()
ONE = ExactScalar(1)
I_UNIT = ExactScalar(0, 1)


# ---------- Series ----------

class MultiSeries:
    """Sparse power series in ``nvars`` variables, exact up to total degree ``trunc``."""

    __slots__ = ("nvars", "trunc", "_terms")

    def __init__(self, nvars: int, trunc: int, terms: Mapping[Exponent, object] | Iterable = ()):
        if nvars < 1:
            raise DimensionError(f"nvars must be at least 1, got {nvars}")
        if trunc < 0:
            raise ParameterError(f"trunc must be nonnegative, got {trunc}")
        self.nvars = nvars
        self.trunc = trunc
        items = terms.items() if isinstance(terms, Mapping) else terms
        store: dict[Exponent, ExactScalar] = {}
        for exp, coeff in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars or any(e < 0 for e in exp):
                raise DimensionError(f"Bad exponent {exp} for {nvars} variables")
            if sum(exp) > trunc:
                continue
            coeff = ExactScalar.of(coeff)
            if exp in store:
                coeff = store[exp] + coeff
            if coeff:
                store[exp] = coeff
            else:
                store.pop(exp, None)
        self._terms = store

    # construction helpers

    @classmethod
    def _raw(cls, nvars: int, trunc: int, store: dict) -> "MultiSeries":
        # store is already canonical: in-range exponents, nonzero coefficients
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.trunc = trunc
        obj._terms = store
        return obj

    @classmethod
    def zero(cls, nvars: int, trunc: int) -> "MultiSeries":
        return cls(nvars, trunc)

    @classmethod
    def constant(cls, value, nvars: int, trunc: int) -> "MultiSeries":
        return cls(nvars, trunc, {(0,) * nvars: value})

    @classmethod
    def one(cls, nvars: int, trunc: int) -> "MultiSeries":
        return cls.constant(1, nvars, trunc)

    @classmethod
    def variable(cls, index: int, nvars: int, trunc: int) -> "MultiSeries":
        if not 0 <= index < nvars:
            raise DimensionError(f"Variable index {index} out of range for {nvars} variables")
        exp = tuple(1 if j == index else 0 for j in range(nvars))
        return cls(nvars, trunc, {exp: 1})

    @classmethod
    def from_coefficients(cls, coeffs: Iterable, trunc: int | None = None) -> "MultiSeries":
        """One-variable series from a coefficient list a_0, a_1, ..."""
        coeffs = list(coeffs)
        if trunc is None:
            trunc = max(len(coeffs) - 1, 0)
        return cls(1, trunc, {(n,): c for n, c in enumerate(coeffs)})

    # inspection

    @property
    def terms(self) -> Mapping[Exponent, ExactScalar]:
        return MappingProxyType(self._terms)

    def coefficient(self, exp: Exponent) -> ExactScalar:
        return self._terms.get(tuple(exp), ZERO)

    @property
    def constant_term(self) -> ExactScalar:
        return self.coefficient((0,) * self.nvars)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Largest total degree present, -1 for the zero series."""
        return max((sum(e) for e in self._terms), default=-1)

    def order(self) -> int | None:
        """Smallest total degree present, None for the zero series."""
        return min((sum(e) for e in self._terms), default=None)

    def is_real(self) -> bool:
        return all(c.is_real for c in self._terms.values())

    def homogeneous_parts(self) -> dict[int, dict[Exponent, ExactScalar]]:
        parts: dict[int, dict[Exponent, ExactScalar]] = defaultdict(dict)
        for exp, coeff in self._terms.items():
            parts[sum(exp)][exp] = coeff
        return parts

    def __eq__(self, other):
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return (self.nvars, self.trunc, self._terms) == (other.nvars, other.trunc, other._terms)

    def __hash__(self):
        return hash((self.nvars, self.trunc, frozenset(self._terms.items())))

    def __repr__(self):
        return f"MultiSeries(nvars={self.nvars}, trunc={self.trunc}, {format_series(self)!r})"

    def __str__(self):
        return format_series(self)

    # arithmetic

    def _check_compatible(self, other: "MultiSeries"):
        if not isinstance(other, MultiSeries):
            raise DimensionError(f"Expected a MultiSeries, got {type(other).__name__}")
        if other.nvars != self.nvars or other.trunc != self.trunc:
            raise DimensionError(
                f"Series shapes differ: (nvars={self.nvars}, trunc={self.trunc}) "
                f"vs (nvars={other.nvars}, trunc={other.trunc})"
            )

    def __neg__(self):
        return MultiSeries._raw(self.nvars, self.trunc, {e: -c for e, c in self._terms.items()})

    def __add__(self, other):
        if not isinstance(other, MultiSeries):
            return NotImplemented
        self._check_compatible(other)
        store = dict(self._terms)
        for exp, coeff in other._terms.items():
            total = store.get(exp, ZERO) + coeff
            if total:
                store[exp] = total
            else:
                store.pop(exp, None)
        return MultiSeries._raw(self.nvars, self.trunc, store)

    def __sub__(self, other):
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, MultiSeries):
            return multiply(self, other)
        scalar = _coerce_scalar(other)
        if scalar is NotImplemented:
            return NotImplemented
        return self.scale(scalar)

    def __rmul__(self, other):
        scalar = _coerce_scalar(other)
        if scalar is NotImplemented:
            return NotImplemented
        return self.scale(scalar)

    def __pow__(self, n: int):
        if n < 0:
            raise ParameterError("Negative powers need invert_unit")
        result = MultiSeries.one(self.nvars, self.trunc)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "MultiSeries":
        c = ExactScalar.of(c)
        if not c:
            return MultiSeries.zero(self.nvars, self.trunc)
        return MultiSeries._raw(self.nvars, self.trunc, {e: c * v for e, v in self._terms.items()})

    def truncate(self, trunc: int) -> "MultiSeries":
        if trunc > self.trunc:
            raise ParameterError(f"Cannot raise truncation from {self.trunc} to {trunc}")
        return MultiSeries._raw(
            self.nvars, trunc, {e: c for e, c in self._terms.items() if sum(e) <= trunc}
        )

    def filter(self, keep: Callable[[Exponent], bool]) -> "MultiSeries":
        return MultiSeries._raw(
            self.nvars, self.trunc, {e: c for e, c in self._terms.items() if keep(e)}
        )

    def map_exponents(self, fn: Callable[[Exponent], Exponent | None], nvars: int | None = None,
                      trunc: int | None = None) -> "MultiSeries":
        """Re-key terms through ``fn``; terms mapped to None are dropped."""
        nvars = self.nvars if nvars is None else nvars
        trunc = self.trunc if trunc is None else trunc
        out = []
        for exp, coeff in self._terms.items():
            new = fn(exp)
            if new is not None:
                out.append((new, coeff))
        return MultiSeries(nvars, trunc, out)

    def with_trunc(self, trunc: int) -> "MultiSeries":
        return MultiSeries(self.nvars, trunc, self._terms)


def multiply(a: MultiSeries, b: MultiSeries, keep: Callable[[Exponent], bool] | None = None) -> MultiSeries:
    """Truncated product; ``keep`` optionally restricts the exponents computed."""
    a._check_compatible(b)
    trunc = a.trunc
    acc: dict[Exponent, ExactScalar] = {}
    b_items = [(e, sum(e), c) for e, c in b._terms.items()]
    for ea, ca in a._terms.items():
        da = sum(ea)
        for eb, db, cb in b_items:
            if da + db > trunc:
                continue
            exp = tuple(x + y for x, y in zip(ea, eb))
            if keep is not None and not keep(exp):
                continue
            prod_ = ca * cb
            if exp in acc:
                acc[exp] = acc[exp] + prod_
            else:
                acc[exp] = prod_
    return MultiSeries._raw(a.nvars, trunc, {e: c for e, c in acc.items() if c})


RING_OPS = ("add", "sub", "mul", "scale")


def ring_ops(a: MultiSeries, b, op: str) -> MultiSeries:
    if op not in RING_OPS:
        raise ParameterError(f"Unknown ring operation {op!r}; expected one of {RING_OPS}")
    if op == "scale":
        return a.scale(b)
    a._check_compatible(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    return multiply(a, b)


def invert_unit(f: MultiSeries) -> MultiSeries:
    """Inverse of a unit, computed one homogeneous degree at a time."""
    c0 = f.constant_term
    if not c0:
        raise NonUnitError(f"Series {format_series(f)} has zero constant term")
    inv_c0 = c0.inverse()
    parts = f.homogeneous_parts()
    result: dict[int, dict[Exponent, ExactScalar]] = {0: {(0,) * f.nvars: inv_c0}}
    for d in range(1, f.trunc + 1):
        acc: dict[Exponent, ExactScalar] = {}
        for e in range(1, d + 1):
            fe = parts.get(e)
            gd = result.get(d - e)
            if not fe or not gd:
                continue
            for ea, ca in fe.items():
                for eb, cb in gd.items():
                    exp = tuple(x + y for x, y in zip(ea, eb))
                    acc[exp] = acc.get(exp, ZERO) + ca * cb
        result[d] = {exp: -(c * inv_c0) for exp, c in acc.items() if c}
    store = {exp: c for part in result.values() for exp, c in part.items()}
    return MultiSeries._raw(f.nvars, f.trunc, store)


def substitute(f: MultiSeries, g: list[MultiSeries], polynomial: bool = False) -> MultiSeries:
    """Composition f(g_1, ..., g_m), truncated.

    Unless ``polynomial`` declares f an exact polynomial, every g_j must have
    zero constant term; the result is then exact up to the degree that the
    truncation of f still controls.
    """
    if len(g) != f.nvars:
        raise DimensionError(f"Need {f.nvars} substitutions, got {len(g)}")
    if not g:
        raise DimensionError("Empty substitution")
    head = g[0]
    for gj in g[1:]:
        head._check_compatible(gj)
    nvars, trunc = head.nvars, head.trunc
    constants = [gj.constant_term for gj in g]
    if any(constants) and not polynomial:
        raise DivergenceError(
            "Substituting series with nonzero constant terms into a truncated series does not terminate"
        )
    if not polynomial:
        orders = [gj.order() for gj in g if not gj.is_zero()]
        if orders:
            trunc = min(trunc, min(orders) * (f.trunc + 1) - 1)
    g = [gj.with_trunc(trunc) for gj in g]
    powers: dict[tuple[int, int], MultiSeries] = {}

    def power(j: int, e: int) -> MultiSeries:
        key = (j, e)
        if key not in powers:
            if e == 0:
                powers[key] = MultiSeries.one(nvars, trunc)
            else:
                powers[key] = power(j, e - 1) * g[j]
        return powers[key]

    result = MultiSeries.zero(nvars, trunc)
    for exp, coeff in sorted(f.terms.items()):
        if not polynomial and sum(exp) > trunc:
            continue
        term = MultiSeries.constant(coeff, nvars, trunc)
        for j, e in enumerate(exp):
            if e:
                term = term * power(j, e)
        result = result + term
    return result


def exponents_of_degree(count: int, degree: int):
    """All exponent vectors of length ``count`` and total degree ``degree``."""
    if count == 0:
        if degree == 0:
            yield ()
        return
    for combo in itertools.combinations_with_replacement(range(count), degree):
        exp = [0] * count
        for j in combo:
            exp[j] += 1
        yield tuple(exp)


def restrict(f: MultiSeries, keep: Iterable[int]) -> MultiSeries:
    """Set every variable outside ``keep`` to zero."""
    keep = set(keep)
    return f.filter(lambda e: all(x == 0 or j in keep for j, x in enumerate(e)))


def evaluate(f: MultiSeries, point: Iterable) -> ExactScalar:
    point = [ExactScalar.of(x) for x in point]
    if len(point) != f.nvars:
        raise DimensionError(f"Point has {len(point)} coordinates, series has {f.nvars} variables")
    total = ZERO
    for exp, coeff in f.terms.items():
        value = coeff
        for x, e in zip(point, exp):
            for _ in range(e):
                value = value * x
        total = total + value
    return total


def divide_diagonal(F: MultiSeries) -> tuple[MultiSeries, MultiSeries]:
    """Write F(T, U) = (U - T) Q(T, U) + F(T, T).

    T is the first variable, U the second.
    """
    if F.nvars != 2:
        raise DimensionError(f"divide_diagonal needs a series in 2 variables, got {F.nvars}")
    q_terms: dict[Exponent, ExactScalar] = {}
    r_terms: dict[Exponent, ExactScalar] = {}
    for (a, b), coeff in F.terms.items():
        r_terms[(a + b, 0)] = r_terms.get((a + b, 0), ZERO) + coeff
        # T^a (U^b - T^b) / (U - T) = T^a * sum_j U^j T^(b-1-j)
        for j in range(b):
            exp = (a + b - 1 - j, j)
            q_terms[exp] = q_terms.get(exp, ZERO) + coeff
    Q = MultiSeries(2, F.trunc, q_terms)
    R = MultiSeries(2, F.trunc, r_terms)
    return Q, R


# ---------- Norms ----------

@dataclass(frozen=True)
class WeightedBound:
    radii: tuple[Fraction, ...]
    p: Fraction
    value: Fraction
    exact: bool


def rational_power(t: Fraction, p: Fraction) -> tuple[Fraction, bool]:
    """t**p for rational p > 0: exact when possible, else a rational upper bound."""
    if t == 0:
        return Fraction(0), True
    num = t.numerator ** p.numerator
    den = t.denominator ** p.numerator
    b = p.denominator
    rn, exact_n = sympy.integer_nthroot(num, b)
    rd, exact_d = sympy.integer_nthroot(den, b)
    if exact_n and exact_d:
        return Fraction(int(rn), int(rd)), True
    scale = 2 ** (b * ROOT_PRECISION_BITS)
    upper_n, _ = sympy.integer_nthroot(num * scale, b)
    lower_d, _ = sympy.integer_nthroot(den * scale, b)
    return Fraction(int(upper_n) + 1, int(lower_d)), False


def weighted_norm(f: MultiSeries, radii, p=1) -> WeightedBound:
    """Sum over terms of (|a_I|_# * r^I)^p, with |a+bi|_# = |a| + |b|."""
    p = to_fraction(p)
    if not 0 < p <= 1:
        raise ParameterError(f"p must lie in (0, 1], got {p}")
    if not isinstance(radii, (list, tuple)):
        radii = [radii] * f.nvars
    radii = tuple(to_fraction(r) for r in radii)
    if len(radii) != f.nvars:
        raise DimensionError(f"Need {f.nvars} radii, got {len(radii)}")
    if any(r <= 0 for r in radii):
        raise ParameterError("Radii must be positive")
    value = Fraction(0)
    exact = True
    for exp, coeff in f.terms.items():
        weighted = coeff.sharp_abs() * prod((r ** e for r, e in zip(radii, exp)), start=Fraction(1))
        term, term_exact = rational_power(weighted, p)
        value += term
        exact = exact and term_exact
    return WeightedBound(radii=radii, p=p, value=value, exact=exact)


def sup_weighted_coefficient(f: MultiSeries, radius) -> Fraction:
    """max_n |a_n|_# r^n for a one-variable series."""
    radius = to_fraction(radius)
    return max(
        (c.sharp_abs() * radius ** sum(e) for e, c in f.terms.items()),
        default=Fraction(0),
    )


# ---------- Universal one-variable series ----------

def exp_series(trunc: int) -> MultiSeries:
    return MultiSeries.from_coefficients([Fraction(1, factorial(k)) for k in range(trunc + 1)], trunc)


def todd_series(trunc: int) -> MultiSeries:
    """x / (1 - e^{-x}), as the inverse of (1 - e^{-x}) / x."""
    quotient = [Fraction((-1) ** k, factorial(k + 1)) for k in range(trunc + 1)]
    return invert_unit(MultiSeries.from_coefficients(quotient, trunc))


# ---------- Text and JSON ----------

_VAR_RE = re.compile(r"^x(\d+)$")
_IMAG_NUMBER_RE = re.compile(r"(?<![A-Za-z_0-9.])(\d+(?:\.\d+)?)\s*i\b")
_IMAG_UNIT_RE = re.compile(r"(?<![A-Za-z_0-9])i\b")


def _sympy_scalar(value) -> ExactScalar:
    re_part, im_part = sympy.re(value), sympy.im(value)
    if not (re_part.is_Rational and im_part.is_Rational):
        raise ParseError(f"Coefficient {value} is not a Gaussian rational", 0)
    return ExactScalar(to_fraction(re_part), to_fraction(im_part))


def parse_polynomial(text: str, symbol_names: Iterable[str] | None = None):
    """Parse human syntax into (generator names, {exponent: ExactScalar}).

    Accepts ``^`` for powers and ``1i`` / ``i`` for the imaginary unit.
    """
    source = _IMAG_NUMBER_RE.sub(r"(\1*I)", text)
    source = _IMAG_UNIT_RE.sub("I", source)
    try:
        expr = parse_expr(source, transformations=standard_transformations + (convert_xor,),
                          evaluate=True)
    except (SyntaxError, TokenError) as exc:
        offset = getattr(exc, "offset", None) or 0
        raise ParseError(f"Cannot parse {text!r}", max(offset - 1, 0))
    except Exception as exc:  # sympy raises assorted errors on garbage
        raise ParseError(f"Cannot parse {text!r}: {exc}", 0)
    if not isinstance(expr, sympy.Expr):
        raise ParseError(f"Not a polynomial expression: {text!r}", 0)
    names = sorted((str(s) for s in expr.free_symbols)) if symbol_names is None else list(symbol_names)
    unknown = {str(s) for s in expr.free_symbols} - set(names)
    if unknown:
        raise ParseError(f"Unknown symbols {sorted(unknown)} in {text!r}", text.find(sorted(unknown)[0]))
    gens = [sympy.Symbol(n) for n in names]
    try:
        poly = sympy.Poly(sympy.expand(expr), *gens, domain=sympy.QQ_I) if gens else None
    except (PolynomialError, CoercionFailed) as exc:
        raise ParseError(f"Not a Gaussian-rational polynomial: {text!r} ({exc})", 0)
    if poly is None:
        return names, {(): _sympy_scalar(sympy.expand(expr))}
    return names, {tuple(m): _sympy_scalar(c) for m, c in poly.terms()}


def parse_series(text: str, nvars: int | None = None, trunc: int = 8) -> MultiSeries:
    """Parse e.g. ``"1 - 2/3*x1^2*x2 + (1+1i)*x2^3"``; variables are x1..xn."""
    found_names, _ = parse_polynomial(text)
    indices = []
    for name in found_names:
        match = _VAR_RE.match(name)
        if not match or int(match.group(1)) < 1:
            raise ParseError(f"Unknown variable {name!r}; use x1, x2, ...", max(text.find(name), 0))
        indices.append(int(match.group(1)))
    needed = max(indices, default=1)
    if nvars is None:
        nvars = needed
    elif needed > nvars:
        raise DimensionError(f"Expression uses x{needed} but nvars={nvars}")
    names = [f"x{j}" for j in range(1, nvars + 1)]
    _, terms = parse_polynomial(text, names)
    if () in terms:
        terms = {(0,) * nvars: terms[()]}
    return MultiSeries(nvars, trunc, terms)


def format_series(f: MultiSeries, names: list[str] | None = None) -> str:
    if names is None:
        names = [f"x{j}" for j in range(1, f.nvars + 1)]
    if f.is_zero():
        return "0"
    pieces = []
    for exp in sorted(f.terms, key=lambda e: (sum(e), tuple(-x for x in e))):
        coeff = f.terms[exp]
        monomial = "*".join(
            name if e == 1 else f"{name}^{e}" for name, e in zip(names, exp) if e
        )
        negative = coeff.is_real and coeff.re < 0
        shown = -coeff if negative else coeff
        if not monomial:
            body = str(shown)
        elif shown == ONE:
            body = monomial
        else:
            body = f"{shown}*{monomial}"
        pieces.append(("-" if negative else "+", body))
    text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


def series_to_json(f: MultiSeries) -> dict:
    return {
        "nvars": f.nvars,
        "trunc": f.trunc,
        "terms": [
            {"exp": list(exp), "re": str(c.re), "im": str(c.im)}
            for exp, c in sorted(f.terms.items())
        ],
    }


def _term_from_json(entry: dict) -> tuple[Exponent, ExactScalar]:
    try:
        return tuple(entry["exp"]), ExactScalar(entry.get("re", "0"), entry.get("im", "0"))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"Bad series term {entry!r}: {exc}", 0)


def series_from_json(data, default_trunc: int = 8) -> MultiSeries:
    """Accept the shapes written by tools and by hand.

      A) {"nvars": n, "trunc": N, "terms": [{"exp": [...], "re": "p/q", "im": "p/q"}, ...]}
      B) [{"nvars": n, "trunc": N}, {"exp": ...}, ...]  (header anywhere in the list)
      C) {"expr": "1 - x1^2", "nvars"?: n, "trunc"?: N}
    """
    if isinstance(data, dict) and "expr" in data:
        return parse_series(data["expr"], data.get("nvars"), int(data.get("trunc", default_trunc)))
    if isinstance(data, dict) and "terms" in data:
        header, entries = data, data["terms"]
    elif isinstance(data, list):
        headers = [d for d in data if isinstance(d, dict) and "nvars" in d]
        if len(headers) != 1:
            raise ParseError("Series list needs exactly one {'nvars', 'trunc'} header", 0)
        header = headers[0]
        entries = [d for d in data if d is not header]
    else:
        raise ParseError("Unrecognized series JSON; expected terms/nvars/trunc or an 'expr'", 0)
    try:
        nvars = int(header["nvars"])
        trunc = int(header.get("trunc", default_trunc))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"Bad series header: {exc}", 0)
    return MultiSeries(nvars, trunc, [_term_from_json(e) for e in entries])
