"""Hodge-cohomology model rings and characteristic classes.

Rings are generated by degree-1 classes with one triangular relation per
generator: gen_j^{d_j} rewrites into lower powers of gen_j whose coefficients
only involve earlier generators. Products of projective spaces and iterated
projective bundles all have this shape, so normal forms are computed by
rewriting alone.

Conventions: integral over P^n of h^n is 1; c(T_{P^n}) = (1+h)^{n+1}; on
P(V) (lines in V) xi = c_1(O(1)), sum_i c_i(V) xi^{d-i} = 0, the relative
tangent bundle is pi^*V (x) O(1) minus a trivial line, and for m >= 0 the
pushforward of O(m) is Sym^m(V^dual).
"""
import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .errors import CatalogError, MissingPushforwardError, ParameterError, RingMismatchError
from .series import exp_series, todd_series

logger = logging.getLogger(__name__)

Monomial = tuple[int, ...]


def _freeze(poly: dict) -> tuple:
    return tuple(sorted((e, c) for e, c in poly.items() if c))


def _add_exp(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def _shift(poly: dict, offset: int, width: int) -> dict:
    out = {}
    for e, c in poly.items():
        out[(0,) * offset + tuple(e) + (0,) * (width - offset - len(e))] = c
    return out


# ---------- Rings ----------

@dataclass(frozen=True)
class HodgeRing:
    generators: tuple[str, ...]
    powers: tuple[int, ...]
    replacements: tuple[tuple, ...]

    @property
    def ngens(self) -> int:
        return len(self.generators)

    @property
    def top_degree(self) -> int:
        return sum(d - 1 for d in self.powers)

    def top_monomial(self) -> Monomial:
        return tuple(d - 1 for d in self.powers)

    def basis(self) -> list[Monomial]:
        monomials = itertools.product(*(range(d) for d in self.powers))
        return sorted(monomials, key=lambda e: (sum(e), e))

    def relation(self, j: int) -> dict:
        return dict(self.replacements[j])

    def reduce(self, poly: dict) -> dict:
        """Normal form: rewrite the highest-index violating generator first."""
        top = self.top_degree
        result: dict[Monomial, Fraction] = {}
        stack = [(tuple(e), Fraction(c)) for e, c in poly.items() if c]
        while stack:
            e, c = stack.pop()
            if not c or sum(e) > top:
                continue
            j = next((j for j in reversed(range(self.ngens)) if e[j] >= self.powers[j]), None)
            if j is None:
                result[e] = result.get(e, Fraction(0)) + c
                continue
            base = list(e)
            base[j] -= self.powers[j]
            base = tuple(base)
            for re_, rc in self.replacements[j]:
                stack.append((_add_exp(base, re_), c * rc))
        return {e: c for e, c in result.items() if c}

    def element(self, poly: dict | None = None) -> "CohClass":
        return CohClass(self, _freeze(self.reduce(poly or {})))

    def zero(self) -> "CohClass":
        return CohClass(self, ())

    def one(self) -> "CohClass":
        return self.scalar(1)

    def scalar(self, value) -> "CohClass":
        return self.element({(0,) * self.ngens: Fraction(value)})

    def gen(self, which: int | str) -> "CohClass":
        j = self.generators.index(which) if isinstance(which, str) else which
        return self.element({tuple(1 if i == j else 0 for i in range(self.ngens)): Fraction(1)})

    def monomial(self, exp: Monomial) -> "CohClass":
        return self.element({tuple(exp): Fraction(1)})

    def describe(self) -> str:
        return "Q[" + ", ".join(self.generators) + f"] / (top degree {self.top_degree})"


@dataclass(frozen=True)
class CohClass:
    ring: HodgeRing
    items: tuple = ()

    @property
    def coeffs(self) -> dict:
        return dict(self.items)

    def _check(self, other: "CohClass"):
        if not isinstance(other, CohClass) or other.ring != self.ring:
            raise RingMismatchError("Classes live in different rings")

    def __bool__(self):
        return bool(self.items)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.scalar(other)
        self._check(other)
        out = self.coeffs
        for e, c in other.items:
            out[e] = out.get(e, Fraction(0)) + c
        return CohClass(self.ring, _freeze(out))

    __radd__ = __add__

    def __neg__(self):
        return CohClass(self.ring, tuple((e, -c) for e, c in self.items))

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CohClass(self.ring, _freeze({e: c * other for e, c in self.items}))
        self._check(other)
        top = self.ring.top_degree
        out: dict = {}
        for ea, ca in self.items:
            da = sum(ea)
            for eb, cb in other.items:
                if da + sum(eb) > top:
                    continue
                e = _add_exp(ea, eb)
                out[e] = out.get(e, Fraction(0)) + ca * cb
        return self.ring.element(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = self.ring.one()
        for _ in range(n):
            result = result * self
        return result

    def component(self, degree: int) -> "CohClass":
        return CohClass(self.ring, tuple((e, c) for e, c in self.items if sum(e) == degree))

    def is_homogeneous(self, degree: int) -> bool:
        return all(sum(e) == degree for e, _ in self.items)

    def coefficient(self, exp: Monomial) -> Fraction:
        return self.coeffs.get(tuple(exp), Fraction(0))

    def sort_key(self):
        return self.items

    def __str__(self):
        return format_class(self)


def format_class(alpha: CohClass) -> str:
    if not alpha.items:
        return "0"
    pieces = []
    for e, c in sorted(alpha.items, key=lambda t: (sum(t[0]), t[0])):
        mono = "*".join(
            g if k == 1 else f"{g}^{k}" for g, k in zip(alpha.ring.generators, e) if k
        )
        if not mono:
            pieces.append(str(c))
        elif c == 1:
            pieces.append(mono)
        elif c == -1:
            pieces.append(f"-{mono}")
        else:
            pieces.append(f"{c}*{mono}")
    return " + ".join(pieces).replace("+ -", "- ")


def apply_series(coefficients: list[Fraction], x: CohClass) -> CohClass:
    """sum_k a_k x^k, truncated by the ring's top degree."""
    result = x.ring.zero()
    power = x.ring.one()
    for k, a in enumerate(coefficients):
        if k > x.ring.top_degree:
            break
        if a:
            result = result + power * a
        power = power * x
    return result


def _exp_coefficients(top: int) -> list[Fraction]:
    s = exp_series(top)
    return [s.coefficient((k,)).re for k in range(top + 1)]


def _todd_coefficients(top: int) -> list[Fraction]:
    s = todd_series(top)
    return [s.coefficient((k,)).re for k in range(top + 1)]


def _inverse_todd_coefficients(top: int) -> list[Fraction]:
    # (1 - e^{-x}) / x
    out = []
    factorial = 1
    for k in range(top + 1):
        factorial *= k + 1
        out.append(Fraction((-1) ** k, factorial))
    return out


# ---------- Bundles ----------

@dataclass(frozen=True)
class BundleSpec:
    """Virtual bundle sum_j L(x_j) - sum_k L(y_k) given by Chern roots."""
    ring: HodgeRing
    plus_roots: tuple[CohClass, ...] = ()
    minus_roots: tuple[CohClass, ...] = ()

    def __post_init__(self):
        for root in self.plus_roots + self.minus_roots:
            if root.ring != self.ring:
                raise RingMismatchError("Chern root from a different ring")
            if not root.is_homogeneous(1):
                raise ParameterError(f"Chern root {root} is not of pure degree 1")
        plus = Counter(self.plus_roots)
        minus = Counter(self.minus_roots)
        common = plus & minus
        plus, minus = plus - common, minus - common
        object.__setattr__(self, "plus_roots", tuple(sorted(plus.elements(), key=CohClass.sort_key)))
        object.__setattr__(self, "minus_roots", tuple(sorted(minus.elements(), key=CohClass.sort_key)))

    @property
    def rank(self) -> int:
        return len(self.plus_roots) - len(self.minus_roots)

    def __add__(self, other: "BundleSpec") -> "BundleSpec":
        return direct_sum(self, other)

    def __sub__(self, other: "BundleSpec") -> "BundleSpec":
        if other.ring != self.ring:
            raise RingMismatchError("Bundles on different spaces")
        return BundleSpec(self.ring, self.plus_roots + other.minus_roots, self.minus_roots + other.plus_roots)

    def scaled(self, n: int) -> "BundleSpec":
        if n < 0:
            return BundleSpec(self.ring, self.minus_roots * -n, self.plus_roots * -n)
        return BundleSpec(self.ring, self.plus_roots * n, self.minus_roots * n)


def line_bundle(ring: HodgeRing, c1: CohClass) -> BundleSpec:
    return BundleSpec(ring, (c1,))


def trivial_bundle(ring: HodgeRing, rank: int = 1) -> BundleSpec:
    return BundleSpec(ring, (ring.zero(),) * rank)


def direct_sum(V: BundleSpec, W: BundleSpec) -> BundleSpec:
    if V.ring != W.ring:
        raise RingMismatchError("Bundles on different spaces")
    return BundleSpec(V.ring, V.plus_roots + W.plus_roots, V.minus_roots + W.minus_roots)


def dual(V: BundleSpec) -> BundleSpec:
    return BundleSpec(V.ring, tuple(-x for x in V.plus_roots), tuple(-y for y in V.minus_roots))


def tensor(V: BundleSpec, W: BundleSpec) -> BundleSpec:
    if V.ring != W.ring:
        raise RingMismatchError("Bundles on different spaces")
    plus = [a + b for a in V.plus_roots for b in W.plus_roots]
    plus += [a + b for a in V.minus_roots for b in W.minus_roots]
    minus = [a + b for a in V.plus_roots for b in W.minus_roots]
    minus += [a + b for a in V.minus_roots for b in W.plus_roots]
    return BundleSpec(V.ring, tuple(plus), tuple(minus))


def sym_power(V: BundleSpec, m: int) -> BundleSpec:
    if V.minus_roots:
        raise ParameterError("Symmetric powers need an honest bundle")
    if m < 0:
        raise ParameterError("Symmetric power must be nonnegative")
    roots = [
        sum(combo, V.ring.zero())
        for combo in itertools.combinations_with_replacement(V.plus_roots, m)
    ]
    return BundleSpec(V.ring, tuple(roots))


def pullback_bundle(f: "SpaceMap", V: BundleSpec) -> BundleSpec:
    return BundleSpec(
        f.source.ring,
        tuple(pullback(f, x) for x in V.plus_roots),
        tuple(pullback(f, y) for y in V.minus_roots),
    )


# ---------- Classes of bundles ----------

def total_chern(V: BundleSpec) -> list[CohClass]:
    """[c_0, c_1, ..., c_top]: the coefficients of t^i in prod(1+x t) / prod(1+y t)."""
    ring = V.ring
    total = ring.one()
    for x in V.plus_roots:
        total = total * (ring.one() + x)
    for y in V.minus_roots:
        inverse = apply_series([Fraction((-1) ** k) for k in range(ring.top_degree + 1)], y)
        total = total * inverse
    return [total.component(i) for i in range(ring.top_degree + 1)]


def chern_class(V: BundleSpec, i: int) -> CohClass:
    parts = total_chern(V)
    return parts[i] if i < len(parts) else V.ring.zero()


def chern_character(V: BundleSpec) -> CohClass:
    ring = V.ring
    coefficients = _exp_coefficients(ring.top_degree)
    total = ring.zero()
    for x in V.plus_roots:
        total = total + apply_series(coefficients, x)
    for y in V.minus_roots:
        total = total - apply_series(coefficients, y)
    return total


def todd(V: BundleSpec) -> CohClass:
    ring = V.ring
    q = _todd_coefficients(ring.top_degree)
    q_inv = _inverse_todd_coefficients(ring.top_degree)
    total = ring.one()
    for x in V.plus_roots:
        total = total * apply_series(q, x)
    for y in V.minus_roots:
        total = total * apply_series(q_inv, y)
    return total


EULER_NORMALIZATIONS = ("hodge", "hh")


def euler_class(L: BundleSpec, normalization: str = "hodge") -> CohClass:
    """c_1(L) in Hodge normalization, 1 - e^{-c_1(L)} in Hochschild normalization."""
    if normalization not in EULER_NORMALIZATIONS:
        raise ParameterError(f"Unknown normalization {normalization!r}")
    if len(L.plus_roots) != 1 or L.minus_roots:
        raise ParameterError(f"Euler class needs a line bundle, got rank {L.rank}")
    c1 = L.plus_roots[0]
    if normalization == "hodge":
        return c1
    return L.ring.one() - apply_series(_exp_coefficients(L.ring.top_degree), -c1)


# ---------- Spaces ----------

@dataclass(frozen=True)
class Space:
    ring: HodgeRing
    tangent: BundleSpec
    dim: int
    provenance: tuple
    name: str = field(default="", compare=False)

    @property
    def kind(self) -> str:
        return self.provenance[0]

    def O(self, *degrees: int) -> BundleSpec:
        """Line bundle with c_1 = sum degrees[j] * gen_j."""
        if len(degrees) != self.ring.ngens:
            raise ParameterError(f"{self.name or 'space'} needs {self.ring.ngens} degrees")
        c1 = self.ring.zero()
        for j, a in enumerate(degrees):
            if a:
                c1 = c1 + self.ring.gen(j) * a
        return line_bundle(self.ring, c1)


def _fresh_name(base: str, taken: set[str]) -> str:
    name = base
    while name in taken:
        name += "'"
    return name


def point() -> Space:
    ring = HodgeRing((), (), ())
    return Space(ring, BundleSpec(ring), 0, ("point",), "pt")


def proj_space(n: int, generator: str = "h") -> Space:
    if n < 0:
        raise ParameterError("Projective space dimension must be nonnegative")
    ring = HodgeRing((generator,), (n + 1,), ((),))
    h = ring.gen(0)
    tangent = BundleSpec(ring, (h,) * (n + 1), (ring.zero(),))
    return Space(ring, tangent, n, ("proj_space", n), f"P{n}")


def _rename_ring(ring: HodgeRing, taken: set[str]) -> tuple[str, ...]:
    names = []
    for g in ring.generators:
        new = _fresh_name(g, taken | set(names))
        names.append(new)
    return tuple(names)


def embed(alpha: CohClass, target: HodgeRing, offset: int) -> CohClass:
    return target.element(_shift(alpha.coeffs, offset, target.ngens))


def _embed_bundle(V: BundleSpec, target: HodgeRing, offset: int) -> BundleSpec:
    return BundleSpec(
        target,
        tuple(embed(x, target, offset) for x in V.plus_roots),
        tuple(embed(y, target, offset) for y in V.minus_roots),
    )


def product(X: Space, Y: Space) -> Space:
    a, b = X.ring.ngens, Y.ring.ngens
    width = a + b
    names = X.ring.generators + _rename_ring(Y.ring, set(X.ring.generators))
    replacements = tuple(_freeze(_shift(dict(r), 0, width)) for r in X.ring.replacements)
    replacements += tuple(_freeze(_shift(dict(r), a, width)) for r in Y.ring.replacements)
    ring = HodgeRing(names, X.ring.powers + Y.ring.powers, replacements)
    tangent = direct_sum(_embed_bundle(X.tangent, ring, 0), _embed_bundle(Y.tangent, ring, a))
    return Space(ring, tangent, X.dim + Y.dim, ("product", X, Y), f"{_wrap(X)}x{_wrap(Y)}")


def _wrap(X: Space) -> str:
    return f"({X.name})" if X.kind == "proj_bundle" or "x" in X.name else X.name


def proj_bundle(X: Space, V: BundleSpec, generator: str = "xi") -> Space:
    if V.ring != X.ring:
        raise RingMismatchError("Bundle does not live on the base space")
    if V.minus_roots:
        raise ParameterError("Projective bundles need an honest bundle (no minus roots)")
    d = V.rank
    if d < 1:
        raise ParameterError("Projective bundle of a rank 0 bundle")
    a = X.ring.ngens
    width = a + 1
    xi_name = _fresh_name(generator, set(X.ring.generators))
    chern = total_chern(V)
    # xi^d -> -sum_{i>=1} c_i(V) xi^{d-i}
    relation: dict = {}
    for i in range(1, d + 1):
        if i >= len(chern):
            break
        for e, c in chern[i].items:
            key = tuple(e) + (d - i,)
            relation[key] = relation.get(key, Fraction(0)) - c
    replacements = tuple(_freeze(_shift(dict(r), 0, width)) for r in X.ring.replacements)
    replacements += (_freeze(relation),)
    ring = HodgeRing(X.ring.generators + (xi_name,), X.ring.powers + (d,), replacements)
    xi = ring.gen(a)
    relative = BundleSpec(ring, tuple(xi + embed(x, ring, 0) for x in V.plus_roots), (ring.zero(),))
    tangent = direct_sum(_embed_bundle(X.tangent, ring, 0), relative)
    return Space(ring, tangent, X.dim + d - 1, ("proj_bundle", X, V), f"P({describe_bundle(V)})/{_wrap(X)}")


def describe_bundle(V: BundleSpec) -> str:
    def root_name(r: CohClass) -> str:
        if not r:
            return "O"
        return f"L({format_class(r)})"

    plus = " + ".join(root_name(r) for r in V.plus_roots) or "0"
    if V.minus_roots:
        plus += " - (" + " + ".join(root_name(r) for r in V.minus_roots) + ")"
    return plus


# ---------- Maps ----------

MAP_KINDS = ("identity", "to_point", "product_first", "product_second", "bundle")


@dataclass(frozen=True)
class SpaceMap:
    source: Space
    target: Space
    kind: str

    def __post_init__(self):
        if self.kind not in MAP_KINDS:
            raise CatalogError(f"Unsupported map kind {self.kind!r}")
        src = self.source
        if self.kind in ("product_first", "product_second") and src.kind != "product":
            raise CatalogError(f"{src.name} is not a product")
        if self.kind == "bundle" and src.kind != "proj_bundle":
            raise CatalogError(f"{src.name} is not a projective bundle")


def identity_map(X: Space) -> SpaceMap:
    return SpaceMap(X, X, "identity")


def to_point(X: Space) -> SpaceMap:
    return SpaceMap(X, point(), "to_point")


def projection(P: Space, factor: int = 0) -> SpaceMap:
    if P.kind != "product":
        raise CatalogError(f"{P.name} is not a product")
    return SpaceMap(P, P.provenance[1 + factor], "product_first" if factor == 0 else "product_second")


def bundle_projection(P: Space) -> SpaceMap:
    if P.kind != "proj_bundle":
        raise CatalogError(f"{P.name} is not a projective bundle")
    return SpaceMap(P, P.provenance[1], "bundle")


def _factor_split(f: SpaceMap) -> int:
    """Number of generators belonging to the first factor / base."""
    if f.kind == "bundle":
        return f.source.ring.ngens - 1
    return f.source.provenance[1].ring.ngens


# ---------- Integration, pushforward, pullback ----------

def integrate(X: Space, alpha: CohClass) -> Fraction:
    if alpha.ring != X.ring:
        raise RingMismatchError(f"Class does not live on {X.name}")
    return alpha.coefficient(X.ring.top_monomial())


def pushforward(f: SpaceMap, alpha: CohClass) -> CohClass:
    src, tgt = f.source, f.target
    if alpha.ring != src.ring:
        raise RingMismatchError(f"Class does not live on {src.name}")
    if f.kind == "identity":
        return alpha
    if f.kind == "to_point":
        return tgt.ring.scalar(integrate(src, alpha))
    a = _factor_split(f)
    out: dict = {}
    if f.kind == "product_first":
        fiber_top = src.provenance[2].ring.top_monomial()
        for e, c in alpha.items:
            if e[a:] == fiber_top:
                out[e[:a]] = c
    elif f.kind == "product_second":
        base_top = src.provenance[1].ring.top_monomial()
        for e, c in alpha.items:
            if e[:a] == base_top:
                out[e[a:]] = c
    else:
        d = src.ring.powers[-1]
        for e, c in alpha.items:
            if e[-1] == d - 1:
                out[e[:-1]] = c
    return tgt.ring.element(out)


def pullback(f: SpaceMap, beta: CohClass) -> CohClass:
    src, tgt = f.source, f.target
    if beta.ring != tgt.ring:
        raise RingMismatchError(f"Class does not live on {tgt.name}")
    if f.kind == "identity":
        return beta
    if f.kind == "to_point":
        return src.ring.scalar(beta.coefficient(()))
    offset = _factor_split(f) if f.kind == "product_second" else 0
    return embed(beta, src.ring, offset)


def pairing_matrix(X: Space) -> tuple[list[Monomial], list[list[Fraction]]]:
    basis = X.ring.basis()
    classes = [X.ring.monomial(b) for b in basis]
    matrix = [[integrate(X, p * q) for q in classes] for p in classes]
    return basis, matrix


def dual_pushforward(f: SpaceMap, alpha: CohClass) -> CohClass:
    """f_* alpha as the class beta with int_Y beta.gamma = int_X alpha.f^*gamma for all gamma."""
    Y = f.target
    basis, matrix = pairing_matrix(Y)
    rhs = [integrate(f.source, alpha * pullback(f, Y.ring.monomial(b))) for b in basis]
    coeffs = linalg.solve(matrix, rhs)
    return Y.ring.element({b: c for b, c in zip(basis, coeffs)})


# ---------- Riemann-Roch ----------

def hrr(X: Space, V: BundleSpec) -> Fraction:
    """chi(X, V) = int_X ch(V) Td(T_X)."""
    if V.ring != X.ring:
        raise RingMismatchError(f"Bundle does not live on {X.name}")
    return integrate(X, chern_character(V) * todd(X.tangent))


def _count_compositions(total: int, parts: int, low: int, high: int) -> int:
    """#{a in [low, high]^parts : sum a = total}, by enumeration."""
    if parts == 0:
        return 1 if total == 0 else 0
    return sum(
        _count_compositions(total - a, parts - 1, low, high)
        for a in range(low, high + 1)
    )


def oracle_chi_proj(n: int, k: int) -> int:
    """Euler characteristic of O(k) on P^n from monomial counts (Cech cohomology)."""
    h0 = _count_compositions(k, n + 1, 0, k) if k >= 0 else 0
    hn = _count_compositions(k, n + 1, k + n, -1) if k <= -(n + 1) else 0
    return h0 + (-1) ** n * hn


def hypersurface_chi(n: int, d: int) -> Fraction:
    """chi(O_X) for a degree-d hypersurface X in P^n, from 0 -> O(-d) -> O -> O_X -> 0."""
    P = proj_space(n)
    return hrr(P, P.O(0)) - hrr(P, P.O(-d))


@dataclass(frozen=True)
class GRRResult:
    lhs: CohClass
    rhs: CohClass

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def grr_check(f: SpaceMap, V: BundleSpec, pushed: BundleSpec | None) -> GRRResult:
    """ch(f_*V) Td(T_Y) against f_*(ch(V) Td(T_X))."""
    if pushed is None:
        raise MissingPushforwardError("GRR needs the K-theory pushforward f_*V on the target")
    if V.ring != f.source.ring:
        raise RingMismatchError("Bundle does not live on the source")
    if pushed.ring != f.target.ring:
        raise RingMismatchError("Pushed-forward bundle does not live on the target")
    lhs = chern_character(pushed) * todd(f.target.tangent)
    rhs = pushforward(f, chern_character(V) * todd(f.source.tangent))
    result = GRRResult(lhs=lhs, rhs=rhs)
    logger.info("grr: %s on %s -> %s: %s", describe_bundle(V), f.source.name, f.target.name,
                "equal" if result.equal else "MISMATCH")
    return result


def _line_degrees(V: BundleSpec) -> dict | None:
    if len(V.plus_roots) != 1 or V.minus_roots:
        return None
    return V.plus_roots[0].coeffs


def _single_proj_dim(X: Space) -> int | None:
    return X.provenance[1] if X.kind == "proj_space" else None


def known_pushforward(f: SpaceMap, V: BundleSpec) -> BundleSpec:
    """K-theory pushforward for the catalog cases.

    X x P^n -> X with V = L boxtimes O(b): chi(P^n, O(b)) copies of L.
    P(W) -> X with V = O(m) (x) pi^*L, m >= 0: Sym^m(W^dual) (x) L; zero for -rank(W) < m < 0.
    X -> pt with X a projective space or a product of two: chi(X, V) trivial lines.
    """
    src, tgt = f.source, f.target
    if f.kind == "identity":
        return V
    line = _line_degrees(V)
    if line is None:
        raise MissingPushforwardError("Known pushforwards cover line bundles only")
    c1 = V.plus_roots[0]
    if f.kind == "to_point":
        chi = _chi_by_oracle(src, c1)
        return trivial_bundle(tgt.ring).scaled(chi)
    a = _factor_split(f)
    if f.kind in ("product_first", "product_second"):
        fiber = src.provenance[2] if f.kind == "product_first" else src.provenance[1]
        n = _single_proj_dim(fiber)
        if n is None:
            raise MissingPushforwardError(f"Fiber {fiber.name} is not a projective space")
        fiber_idx = a if f.kind == "product_first" else 0
        base_offset = 0 if f.kind == "product_first" else a
        b = c1.coefficient(tuple(1 if j == fiber_idx else 0 for j in range(src.ring.ngens)))
        base_part = {e[base_offset:base_offset + tgt.ring.ngens]: c for e, c in c1.items
                     if e[fiber_idx] == 0}
        L = line_bundle(tgt.ring, tgt.ring.element(base_part))
        return L.scaled(oracle_chi_proj(n, int(b)))
    # projective bundle
    W = src.provenance[2]
    d = W.rank
    m = c1.coefficient(tuple(1 if j == a else 0 for j in range(src.ring.ngens)))
    if m.denominator != 1:
        raise MissingPushforwardError("Fractional twist")
    m = int(m)
    base_part = {e[:a]: c for e, c in c1.items if e[a] == 0}
    L = line_bundle(tgt.ring, tgt.ring.element(base_part))
    if m >= 0:
        return tensor(sym_power(dual(W), m), L)
    if m > -d:
        return BundleSpec(tgt.ring)
    raise MissingPushforwardError(f"O({m}) on a P^{d - 1}-bundle has top cohomology; not in the catalog")


def _chi_by_oracle(X: Space, c1: CohClass) -> int:
    if X.kind == "point":
        return 1
    if X.kind == "proj_space":
        return oracle_chi_proj(X.provenance[1], int(c1.coefficient((1,))))
    if X.kind == "product":
        A, B = X.provenance[1], X.provenance[2]
        if A.kind == "proj_space" and B.kind == "proj_space":
            return (oracle_chi_proj(A.provenance[1], int(c1.coefficient((1, 0))))
                    * oracle_chi_proj(B.provenance[1], int(c1.coefficient((0, 1)))))
    raise MissingPushforwardError(f"No Euler-characteristic oracle for {X.name}")
