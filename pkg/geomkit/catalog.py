"""Text syntax for catalog spaces, bundles and maps.

    space   := factor ("x" factor)*
    factor  := "pt" | "P" INT | "P(" bundle ")/" factor | "(" space ")"
    bundle  := term (("+" | "-") term)*
    term    := [INT "*"] ("O" ["(" degree ("," degree)* ")"] | "T")
    map     := space "->" space

A single degree on a space with several generators twists the tautological
generator of a projective bundle, and every generator of anything else.
Degrees may be names bound through ``params`` (``O(a,b)`` with a=2, b=3).
"""
import logging
import re

from .charclasses import (
    BundleSpec, Space, SpaceMap, bundle_projection, identity_map, point, proj_bundle, proj_space,
    product, projection, to_point,
)
from .errors import CatalogError

logger = logging.getLogger(__name__)

_INT_RE = re.compile(r"[+-]?\d+")
_NAME_RE = re.compile(r"[A-Za-z_]\w*")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, token: str) -> bool:
        self.skip()
        return self.text.startswith(token, self.pos)

    def accept(self, token: str) -> bool:
        if self.peek(token):
            self.pos += len(token)
            return True
        return False

    def expect(self, token: str):
        if not self.accept(token):
            self.fail(f"expected {token!r}")

    def match(self, pattern: re.Pattern) -> str | None:
        self.skip()
        m = pattern.match(self.text, self.pos)
        if not m:
            return None
        self.pos = m.end()
        return m.group(0)

    def at_end(self) -> bool:
        self.skip()
        return self.pos == len(self.text)

    def balanced(self) -> str:
        """Text up to the parenthesis closing the one just consumed."""
        depth, start = 1, self.pos
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            depth += (ch == "(") - (ch == ")")
            self.pos += 1
            if depth == 0:
                return self.text[start:self.pos - 1]
        self.fail("unbalanced parenthesis")

    def fail(self, what: str):
        raise CatalogError(f"Cannot parse {self.text!r}: {what} at position {self.pos}")


# ---------- Spaces ----------

def _parse_space(sc: _Scanner) -> Space:
    X = _parse_factor(sc)
    while sc.accept("x"):
        X = product(X, _parse_factor(sc))
    return X


def _parse_factor(sc: _Scanner) -> Space:
    if sc.accept("pt"):
        return point()
    if sc.accept("P("):
        bundle_text = sc.balanced()
        sc.expect("/")
        base = _parse_factor(sc)
        V = parse_bundle(bundle_text, base)
        return proj_bundle(base, V)
    if sc.accept("P"):
        n = sc.match(re.compile(r"\d+"))
        if n is None:
            sc.fail("expected a dimension after 'P'")
        return proj_space(int(n))
    if sc.accept("("):
        X = _parse_space(sc)
        sc.expect(")")
        return X
    sc.fail("expected a space")


def parse_space(text: str) -> Space:
    sc = _Scanner(text)
    X = _parse_space(sc)
    if not sc.at_end():
        sc.fail("trailing input")
    return X


# ---------- Bundles ----------

def _degree(sc: _Scanner, params: dict) -> int:
    value = sc.match(_INT_RE)
    if value is not None:
        return int(value)
    name = sc.match(_NAME_RE)
    if name is None:
        sc.fail("expected a degree")
    if name not in params:
        raise CatalogError(f"Unbound degree {name!r} in {sc.text!r}; pass it as a parameter")
    return int(params[name])


def _line(X: Space, degrees: list[int], sc: _Scanner) -> BundleSpec:
    n = X.ring.ngens
    if len(degrees) == n:
        return X.O(*degrees)
    if len(degrees) == 1 and n > 1:
        if X.kind == "proj_bundle":
            return X.O(*([0] * (n - 1) + degrees))
        return X.O(*(degrees * n))
    if n == 0 and degrees == [0]:
        return X.O()
    sc.fail(f"{X.name} takes {n} degrees, got {len(degrees)}")


def _parse_term(sc: _Scanner, X: Space, params: dict) -> BundleSpec:
    count = 1
    save = sc.pos
    value = sc.match(re.compile(r"\d+"))
    if value is not None:
        if sc.accept("*"):
            count = int(value)
        else:
            sc.pos = save
    if sc.accept("T"):
        V = X.tangent
    elif sc.accept("O"):
        degrees = [0] * max(X.ring.ngens, 1)
        if sc.accept("("):
            degrees = [_degree(sc, params)]
            while sc.accept(","):
                degrees.append(_degree(sc, params))
            sc.expect(")")
        V = _line(X, degrees, sc) if X.ring.ngens else X.O()
    else:
        sc.fail("expected 'O' or 'T'")
    return V.scaled(count)


def parse_bundle(text: str, X: Space, params: dict | None = None) -> BundleSpec:
    params = params or {}
    sc = _Scanner(text)
    V = _parse_term(sc, X, params)
    while True:
        if sc.accept("+"):
            V = V + _parse_term(sc, X, params)
        elif sc.accept("-"):
            V = V - _parse_term(sc, X, params)
        else:
            break
    if not sc.at_end():
        sc.fail("trailing input")
    return V


# ---------- Maps ----------

def parse_map(text: str, source_text: str | None = None) -> SpaceMap:
    """Parse SOURCE->TARGET; "X" stands for ``source_text`` (so "X->pt", "X->X")."""
    if text.count("->") != 1:
        raise CatalogError(f"A map is written SOURCE->TARGET, got {text!r}")
    src_text, tgt_text = (part.strip() for part in text.split("->"))
    if src_text == "X":
        if source_text is None:
            raise CatalogError("'X' needs a source space (--space)")
        src_text = source_text
    source = parse_space(src_text)
    if tgt_text == "X":
        return identity_map(source)
    return classify_map(source, parse_space(tgt_text))


def classify_map(source: Space, target: Space) -> SpaceMap:
    if source == target:
        return identity_map(source)
    if target.kind == "point":
        return to_point(source)
    if source.kind == "product":
        if source.provenance[1] == target:
            return projection(source, 0)
        if source.provenance[2] == target:
            return projection(source, 1)
    if source.kind == "proj_bundle" and source.provenance[1] == target:
        return bundle_projection(source)
    raise CatalogError(f"No catalog map {source.name} -> {target.name}")

