"""Formal closed subsets {|f| <= r}, {|f| >= r} and a saturation prover.

A SubsetExpr is a finite intersection of atoms Le(t, r) / Ge(t, r) over
polynomial terms t in named symbols. Containment and emptiness are decided
by forward chaining over a finite universe of terms: the subterm closure of
the query plus one-step sums and products. Every verdict comes with a trace
that ``replay`` checks against the rule schemata alone; a negative answer is
always ``Unknown``, never "not contained".

Rule schemata (r, s > 0 rational):

    mono-le           Le(t, r)              => Le(t, s)         s >= r
    mono-ge           Ge(t, r)              => Ge(t, s)         s <= r
    scalar-le         (scalar a)            => Le(a, r)         |a| <= r certified
    scalar-ge         (scalar a)            => Ge(a, r)         |a| >= r certified
    product-le        Le(f, r), Le(g, s)    => Le(f*g, r*s)
    product-ge        Ge(f, r), Ge(g, s)    => Ge(f*g, r*s)
    sum-le            Le(f, r), Le(g, s)    => Le(f+g, r+s)
    reverse-triangle  Ge(f+g, r), Le(g, s)  => Ge(f, r-s)       s < r
    quotient          Ge(f*g, r), Le(g, s)  => Ge(f, r/s)
    disjoint          Le(t, r), Ge(t, s)    => empty            r < s
    scalar-empty      Ge(a, s) or Le(a, r)  => empty            certified |a| < s, |a| > r
"""
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from math import ceil, floor

import numpy as np

from .errors import ParameterError, ParseError
from .series import ONE, ZERO, ExactScalar, parse_polynomial

logger = logging.getLogger(__name__)

LE, GE = "le", "ge"
PROVED, EMPTY, UNKNOWN = "Proved", "Empty", "Unknown"

# sub-sums of a sum term are enumerated only up to this many summands
MAX_SUBSUM_TERMS = 4

Monomial = tuple[tuple[str, int], ...]


# ---------- Terms ----------

def _mono_key(m: Monomial):
    return sum(e for _, e in m), m


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    powers = dict(a)
    for name, e in b:
        powers[name] = powers.get(name, 0) + e
    return tuple(sorted(powers.items()))


@dataclass(frozen=True)
class Term:
    """Polynomial with Gaussian-rational coefficients, in canonical expanded form."""
    items: tuple[tuple[Monomial, ExactScalar], ...] = ()

    @classmethod
    def from_dict(cls, data: dict) -> "Term":
        return cls(tuple(sorted(((m, c) for m, c in data.items() if c), key=lambda mc: _mono_key(mc[0]))))

    @classmethod
    def scalar(cls, value) -> "Term":
        return cls.from_dict({(): ExactScalar.of(value)})

    @classmethod
    def symbol(cls, name: str) -> "Term":
        return cls(((((name, 1),), ONE),))

    @property
    def is_zero(self) -> bool:
        return not self.items

    @property
    def is_scalar(self) -> bool:
        return all(m == () for m, _ in self.items)

    @property
    def value(self) -> ExactScalar:
        """The constant of a scalar term."""
        if not self.is_scalar:
            raise ParameterError(f"{self} is not a scalar term")
        return self.items[0][1] if self.items else ZERO

    @property
    def degree(self) -> int:
        return max((sum(e for _, e in m) for m, _ in self.items), default=0)

    @property
    def symbols(self) -> frozenset[str]:
        return frozenset(name for m, _ in self.items for name, _ in m)

    def sort_key(self):
        return self.degree, len(self.items), str(self)

    def summands(self) -> list["Term"]:
        return [Term(((m, c),)) for m, c in self.items]

    def __add__(self, other: "Term") -> "Term":
        data = dict(self.items)
        for m, c in other.items:
            data[m] = data.get(m, ZERO) + c
        return Term.from_dict(data)

    def __neg__(self) -> "Term":
        return Term(tuple((m, -c) for m, c in self.items))

    def __sub__(self, other: "Term") -> "Term":
        return self + (-other)

    def __mul__(self, other: "Term") -> "Term":
        data: dict = {}
        for ma, ca in self.items:
            for mb, cb in other.items:
                m = _mono_mul(ma, mb)
                data[m] = data.get(m, ZERO) + ca * cb
        return Term.from_dict(data)

    def evaluate(self, point: dict) -> ExactScalar:
        total = ZERO
        for m, c in self.items:
            value = c
            for name, e in m:
                if name not in point:
                    raise ParameterError(f"No value for symbol {name!r}")
                for _ in range(e):
                    value = value * point[name]
            total = total + value
        return total

    def __str__(self):
        if not self.items:
            return "0"
        pieces = []
        for m, c in self.items:
            monomial = "*".join(name if e == 1 else f"{name}^{e}" for name, e in m)
            negative = c.is_real and c.re < 0
            shown = -c if negative else c
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


def parse_term(text: str) -> Term:
    names, terms = parse_polynomial(text)
    data = {}
    for exp, c in terms.items():
        m = tuple((name, e) for name, e in zip(names, exp) if e)
        data[m] = data.get(m, ZERO) + c
    return Term.from_dict(data)


# ---------- Atoms and expressions ----------

@dataclass(frozen=True)
class Atom:
    kind: str
    term: Term
    radius: Fraction

    def __post_init__(self):
        if self.kind not in (LE, GE):
            raise ParameterError(f"Atom kind must be 'le' or 'ge', got {self.kind!r}")
        object.__setattr__(self, "radius", Fraction(self.radius))
        if self.radius <= 0:
            raise ParameterError(f"Radius must be positive, got {self.radius}")

    def sort_key(self):
        return self.term.sort_key(), self.kind, self.radius

    def holds_at(self, point: dict) -> bool:
        size = self.term.evaluate(point).abs_squared()
        bound = self.radius * self.radius
        return size <= bound if self.kind == LE else size >= bound

    def __str__(self):
        return f"|{self.term}|{'<=' if self.kind == LE else '>='}{self.radius}"


def Le(term: Term, radius) -> Atom:
    return Atom(LE, term, Fraction(radius))


def Ge(term: Term, radius) -> Atom:
    return Atom(GE, term, Fraction(radius))


@dataclass(frozen=True)
class SubsetExpr:
    """Intersection of atoms; no atoms means the whole space."""
    atoms: frozenset[Atom] = frozenset()

    @classmethod
    def of(cls, atoms) -> "SubsetExpr":
        return cls(frozenset(atoms))

    def sorted_atoms(self) -> list[Atom]:
        return sorted(self.atoms, key=Atom.sort_key)

    def terms(self) -> set[Term]:
        return {a.term for a in self.atoms}

    def symbols(self) -> set[str]:
        return {s for a in self.atoms for s in a.term.symbols}

    def __and__(self, other: "SubsetExpr") -> "SubsetExpr":
        return SubsetExpr(self.atoms | other.atoms)

    def __str__(self):
        if not self.atoms:
            return "(whole space)"
        return " & ".join(str(a) for a in self.sorted_atoms())


_RADIUS_RE = re.compile(r"\d+/\d+|\d*\.\d+|\d+")


def parse(text: str) -> SubsetExpr:
    """atom := "|" poly "|" ("<=" | ">=") rational ; expr := atom ("&" atom)*"""
    atoms = []
    pos = 0

    def skip(p: int) -> int:
        while p < len(text) and text[p].isspace():
            p += 1
        return p

    while True:
        pos = skip(pos)
        if not text.startswith("|", pos):
            raise ParseError(f"Expected '|' in {text!r}", pos)
        close = text.find("|", pos + 1)
        if close < 0:
            raise ParseError(f"Unterminated '|' in {text!r}", pos)
        body = text[pos + 1:close]
        if not body.strip():
            raise ParseError(f"Empty term in {text!r}", pos + 1)
        try:
            term = parse_term(body)
        except ParseError as exc:
            raise ParseError(f"Bad term {body.strip()!r} in {text!r}", pos + 1 + exc.position)
        pos = skip(close + 1)
        if text.startswith("<=", pos):
            kind = LE
        elif text.startswith(">=", pos):
            kind = GE
        else:
            raise ParseError(f"Expected '<=' or '>=' in {text!r}", pos)
        pos = skip(pos + 2)
        match = _RADIUS_RE.match(text, pos)
        end = match.end() if match else pos
        if not match or (end < len(text) and (text[end].isalnum() or text[end] in "_./")):
            raise ParseError(f"Radius must be a positive rational in {text!r}", pos)
        radius = Fraction(match.group(0))
        if radius <= 0:
            raise ParseError(f"Radius must be a positive rational in {text!r}", pos)
        atoms.append(Atom(kind, term, radius))
        pos = skip(end)
        if pos == len(text):
            break
        if text[pos] != "&":
            raise ParseError(f"Expected '&' in {text!r}", pos)
        pos += 1
    return SubsetExpr.of(atoms)


# ---------- Derivations ----------

@dataclass(frozen=True)
class Step:
    rule: str
    premises: tuple[Atom, ...]
    conclusion: Atom | None

    def __str__(self):
        lhs = ", ".join(str(p) for p in self.premises) or "-"
        rhs = str(self.conclusion) if self.conclusion is not None else "empty"
        return f"{self.rule}: {lhs} => {rhs}"

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "premises": [str(p) for p in self.premises],
            "conclusion": str(self.conclusion) if self.conclusion is not None else None,
        }


@dataclass(frozen=True)
class Containment:
    lhs: SubsetExpr
    rhs: SubsetExpr
    rule_trace: tuple[Step, ...]

    def replay(self) -> bool:
        return replay(self.rule_trace, hypotheses=self.lhs.atoms, goals=self.rhs.atoms)


@dataclass(frozen=True)
class Decision:
    verdict: str
    trace: tuple[Step, ...] = ()
    rounds: int = 0
    facts: int = 0
    capped: bool = False
    missing: tuple[Atom, ...] = ()
    containment: Containment | None = None


def _certified_le(a: ExactScalar, r: Fraction) -> bool:
    return a.abs_bounds()[1] <= r


def _certified_ge(a: ExactScalar, r: Fraction) -> bool:
    return a.abs_bounds()[0] >= r


def _check_step(step: Step) -> bool:
    rule, ps, c = step.rule, step.premises, step.conclusion
    kinds = tuple(p.kind for p in ps)
    if rule == "mono-le":
        return kinds == (LE,) and c.kind == LE and c.term == ps[0].term and c.radius >= ps[0].radius
    if rule == "mono-ge":
        return kinds == (GE,) and c.kind == GE and c.term == ps[0].term and c.radius <= ps[0].radius
    if rule == "scalar-le":
        return not ps and c.kind == LE and c.term.is_scalar and _certified_le(c.term.value, c.radius)
    if rule == "scalar-ge":
        return not ps and c.kind == GE and c.term.is_scalar and _certified_ge(c.term.value, c.radius)
    if rule == "product-le":
        return (kinds == (LE, LE) and c.kind == LE and c.term == ps[0].term * ps[1].term
                and c.radius == ps[0].radius * ps[1].radius)
    if rule == "product-ge":
        return (kinds == (GE, GE) and c.kind == GE and c.term == ps[0].term * ps[1].term
                and c.radius == ps[0].radius * ps[1].radius)
    if rule == "sum-le":
        return (kinds == (LE, LE) and c.kind == LE and c.term == ps[0].term + ps[1].term
                and c.radius == ps[0].radius + ps[1].radius)
    if rule == "reverse-triangle":
        return (kinds == (GE, LE) and ps[1].radius < ps[0].radius and c.kind == GE
                and c.term == ps[0].term - ps[1].term and c.radius == ps[0].radius - ps[1].radius)
    if rule == "quotient":
        return (kinds == (GE, LE) and c.kind == GE and c.term * ps[1].term == ps[0].term
                and c.radius == ps[0].radius / ps[1].radius)
    if rule == "disjoint":
        return (c is None and kinds == (LE, GE) and ps[0].term == ps[1].term
                and ps[0].radius < ps[1].radius)
    if rule == "scalar-empty":
        if c is not None or len(ps) != 1 or not ps[0].term.is_scalar:
            return False
        lower, upper = ps[0].term.value.abs_bounds()
        return upper < ps[0].radius if ps[0].kind == GE else lower > ps[0].radius
    return False


def replay(trace, hypotheses=None, goals=None) -> bool:
    """Check a derivation step by step against the rule schemata.

    ``hyp`` steps must name members of ``hypotheses`` (when given); every
    other step may use only atoms concluded earlier in the trace. With
    ``goals`` every goal must be concluded; without, a trace ending in an
    emptiness step is required.
    """
    known: set[Atom] = set()
    empty = False
    for index, step in enumerate(trace):
        if step.rule == "hyp":
            ok = not step.premises and step.conclusion is not None and (
                hypotheses is None or step.conclusion in hypotheses)
        else:
            ok = all(p in known for p in step.premises) and _check_step(step)
        if not ok:
            logger.debug("replay: step %d rejected: %s", index, step)
            return False
        if step.conclusion is None:
            empty = True
        else:
            known.add(step.conclusion)
    if goals is not None:
        return all(g in known for g in goals)
    return empty


# ---------- Saturation ----------

def _subterm_closure(terms) -> list[Term]:
    closure: set[Term] = set()
    pending = list(terms)
    while pending:
        t = pending.pop()
        if t in closure or t.is_zero:
            continue
        closure.add(t)
        parts = t.summands()
        if len(parts) > 1:
            pending.extend(parts)
            if len(parts) <= MAX_SUBSUM_TERMS:
                for size in range(2, len(parts)):
                    for chosen in combinations(parts, size):
                        total = Term()
                        for piece in chosen:
                            total = total + piece
                        pending.append(total)
            continue
        (m, c), = t.items
        if not m:
            continue
        if c != ONE:
            pending.append(Term.scalar(c))
            pending.append(Term(((m, ONE),)))
            continue
        # proper divisors of a monic monomial
        ranges = [range(e + 1) for _, e in m]
        for exps in product(*ranges):
            divisor = tuple((name, e) for (name, _), e in zip(m, exps) if e)
            if divisor and divisor != m:
                pending.append(Term(((divisor, ONE),)))
    return sorted(closure, key=Term.sort_key)


@dataclass
class Universe:
    """Subterm closure of the query plus one-step sums and products."""
    base: list[Term]
    sums: list[tuple[Term, Term, Term]]
    products: list[tuple[Term, Term, Term]]
    terms: set[Term] = field(default_factory=set)

    @classmethod
    def build(cls, terms) -> "Universe":
        base = _subterm_closure(terms)
        sums, products = [], []
        for a, b in combinations_with_replacement(base, 2):
            s = a + b
            if not s.is_zero:
                sums.append((a, b, s))
            products.append((a, b, a * b))
        everything = set(base) | {s for *_, s in sums} | {p for *_, p in products}
        return cls(base=base, sums=sums, products=products, terms=everything)

    def scalars(self) -> list[Term]:
        return sorted((t for t in self.terms if t.is_scalar), key=Term.sort_key)


class FactBase:
    """Derived atoms with one derivation each, plus the first emptiness witness.

    ``pool`` holds the radii monotonicity may move to. It starts from the
    given radii and grows each round by the radii the other rules produce,
    rounded outward to integers as well (5/6 also offers 1).
    """

    def __init__(self, hypotheses: SubsetExpr, universe: Universe, pool):
        self.hypotheses = hypotheses
        self.universe = universe
        self.pool = sorted(set(pool))
        self.facts: dict[Atom, Step] = {}
        self.radii: dict[tuple[Term, str], set[Fraction]] = {}
        self.empty: Step | None = None
        self.rounds = 0
        self.capped = False
        for atom in hypotheses.sorted_atoms():
            self._add(Step("hyp", (), atom))

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.facts

    def __len__(self) -> int:
        return len(self.facts)

    def _add(self, step: Step):
        atom = step.conclusion
        self.facts[atom] = step
        self.radii.setdefault((atom.term, atom.kind), set()).add(atom.radius)

    def _dominated(self, atom: Atom) -> bool:
        known = self.radii.get((atom.term, atom.kind), ())
        if atom.kind == LE:
            return any(r <= atom.radius for r in known)
        return any(r >= atom.radius for r in known)

    def best(self, term: Term, kind: str) -> Atom | None:
        known = self.radii.get((term, kind))
        if not known:
            return None
        return Atom(kind, term, min(known) if kind == LE else max(known))

    def _candidates(self):
        for atom in sorted(self.facts, key=Atom.sort_key):
            for s in self.pool:
                if atom.kind == LE and s > atom.radius:
                    yield Step("mono-le", (atom,), Le(atom.term, s))
                elif atom.kind == GE and s < atom.radius:
                    yield Step("mono-ge", (atom,), Ge(atom.term, s))
        for t in self.universe.scalars():
            lower, upper = t.value.abs_bounds()
            if upper > 0:
                yield Step("scalar-le", (), Le(t, upper))
            if lower > 0:
                yield Step("scalar-ge", (), Ge(t, lower))
        for a, b, p in self.universe.products:
            la, lb = self.best(a, LE), self.best(b, LE)
            if la and lb:
                yield Step("product-le", (la, lb), Le(p, la.radius * lb.radius))
            ga, gb = self.best(a, GE), self.best(b, GE)
            if ga and gb:
                yield Step("product-ge", (ga, gb), Ge(p, ga.radius * gb.radius))
            gp = self.best(p, GE)
            if gp:
                if lb:
                    yield Step("quotient", (gp, lb), Ge(a, gp.radius / lb.radius))
                if la:
                    yield Step("quotient", (gp, la), Ge(b, gp.radius / la.radius))
        for a, b, s in self.universe.sums:
            la, lb = self.best(a, LE), self.best(b, LE)
            if la and lb:
                yield Step("sum-le", (la, lb), Le(s, la.radius + lb.radius))
            gs = self.best(s, GE)
            if gs:
                if lb and lb.radius < gs.radius:
                    yield Step("reverse-triangle", (gs, lb), Ge(a, gs.radius - lb.radius))
                if la and la.radius < gs.radius:
                    yield Step("reverse-triangle", (gs, la), Ge(b, gs.radius - la.radius))

    def _find_empty(self) -> Step | None:
        for atom in sorted(self.facts, key=Atom.sort_key):
            if atom.term.is_scalar:
                lower, upper = atom.term.value.abs_bounds()
                if (atom.kind == GE and upper < atom.radius) or (atom.kind == LE and lower > atom.radius):
                    return Step("scalar-empty", (atom,), None)
            if atom.kind == LE:
                ge = self.best(atom.term, GE)
                if ge and atom.radius < ge.radius:
                    return Step("disjoint", (atom, ge), None)
        return None

    def _grow_pool(self, atoms):
        radii = set(self.pool)
        for atom in atoms:
            radii.add(atom.radius)
            if atom.kind == LE:
                radii.add(Fraction(ceil(atom.radius)))
            elif floor(atom.radius) > 0:
                radii.add(Fraction(floor(atom.radius)))
        self.pool = sorted(radii)

    def run(self, depth: int) -> "FactBase":
        if depth < 1:
            raise ParameterError(f"Saturation depth must be at least 1, got {depth}")
        self.empty = self._find_empty()
        for round_ in range(1, depth + 1):
            if self.empty is not None:
                break
            added, derived = 0, []
            for step in list(self._candidates()):
                atom = step.conclusion
                if atom in self.facts or atom.term not in self.universe.terms:
                    continue
                if not step.rule.startswith("mono"):
                    if self._dominated(atom):
                        continue
                    derived.append(atom)
                self._add(step)
                added += 1
            self._grow_pool(derived)
            self.rounds = round_
            logger.debug("saturate: round %d added %d atoms (%d total)", round_, added, len(self.facts))
            self.empty = self._find_empty()
            if not added:
                break
        else:
            self.capped = self.empty is None
        if self.capped:
            logger.debug("saturate: depth cap %d reached with %d atoms", depth, len(self.facts))
        return self

    def trace(self, targets) -> tuple[Step, ...]:
        """Ancestors of ``targets`` in derivation order."""
        out: list[Step] = []
        seen: set[Atom] = set()

        def visit(atom: Atom):
            if atom in seen:
                return
            seen.add(atom)
            step = self.facts[atom]
            for p in step.premises:
                visit(p)
            out.append(step)

        for target in targets:
            if isinstance(target, Step):
                for p in target.premises:
                    visit(p)
                out.append(target)
            else:
                visit(target)
        return tuple(out)


def saturate(exprs, depth: int = 3, extra_terms=(), pool=None):
    """Saturate each expression on its own; returns one FactBase per expression, in order.

    A single SubsetExpr gives a single FactBase.
    """
    if isinstance(exprs, SubsetExpr):
        return _saturate_one(exprs, depth, extra_terms, pool)
    return [_saturate_one(e, depth, extra_terms, pool) for e in exprs]


def _saturate_one(expr: SubsetExpr, depth: int, extra_terms=(), pool=None) -> FactBase:
    universe = Universe.build(list(expr.terms()) + list(extra_terms))
    radii = {a.radius for a in expr.atoms} if pool is None else set(pool)
    base = FactBase(expr, universe, radii)
    base._grow_pool(expr.atoms)
    return base.run(depth)


# ---------- Decisions ----------

def decide_containment(lhs: SubsetExpr, rhs: SubsetExpr, depth: int = 3) -> Decision:
    pool = {a.radius for a in lhs.atoms | rhs.atoms}
    base = _saturate_one(lhs, depth, extra_terms=rhs.terms(), pool=pool)
    missing = tuple(a for a in rhs.sorted_atoms() if a not in base)
    if missing:
        if base.capped:
            logger.warning("locale: depth cap %d reached, %d goal atoms unproved", depth, len(missing))
        return Decision(UNKNOWN, rounds=base.rounds, facts=len(base), capped=base.capped, missing=missing)
    trace = base.trace(rhs.sorted_atoms())
    containment = Containment(lhs=lhs, rhs=rhs, rule_trace=trace)
    logger.info("locale: %s contains %s (%d steps)", lhs, rhs, len(trace))
    return Decision(PROVED, trace=trace, rounds=base.rounds, facts=len(base), containment=containment)


def decide_empty(expr: SubsetExpr, depth: int = 3) -> Decision:
    base = _saturate_one(expr, depth)
    if base.empty is None:
        if base.capped:
            logger.warning("locale: depth cap %d reached without a contradiction", depth)
        return Decision(UNKNOWN, rounds=base.rounds, facts=len(base), capped=base.capped)
    trace = base.trace([base.empty])
    logger.info("locale: %s is empty (%d steps)", expr, len(trace))
    return Decision(EMPTY, trace=trace, rounds=base.rounds, facts=len(base))


# ---------- Point semantics ----------

def holds_at(expr: SubsetExpr, point: dict) -> bool:
    """Membership of a point (symbol -> Gaussian rational) under |.| on C."""
    return all(a.holds_at(point) for a in expr.atoms)


def random_point(rng: np.random.Generator, symbols, spread: int = 8) -> dict:
    return {
        name: ExactScalar(Fraction(int(rng.integers(-spread, spread + 1)), int(rng.integers(1, 5))),
                          Fraction(int(rng.integers(-spread, spread + 1)), int(rng.integers(1, 5))))
        for name in sorted(symbols)
    }


def find_counterexample(lhs: SubsetExpr, rhs: SubsetExpr | None, rng: np.random.Generator,
                        samples: int = 1000) -> dict | None:
    """A sampled point of ``lhs`` outside ``rhs`` (or, with rhs None, any point of lhs)."""
    symbols = lhs.symbols() | (rhs.symbols() if rhs is not None else set())
    for _ in range(samples):
        point = random_point(rng, symbols)
        if holds_at(lhs, point) and (rhs is None or not holds_at(rhs, point)):
            return point
    return None
