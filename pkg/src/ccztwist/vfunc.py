"""Vectorial functions as value tables and as univariate polynomials."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, Mapping

import numpy as np

from . import _kernels
from .gfield import (
    FieldCtx,
    FieldElement,
    FieldMismatchError,
    ParseError,
    SubfieldEmbedding,
    embedding,
    format_element,
)


class DegreeError(ValueError):
    """An operation that needs a quadratic (or affine) input got something else."""


def p_weight(e: int, p: int) -> int:
    """Sum of the base-p digits of e."""
    w = 0
    while e:
        w += e % p
        e //= p
    return w


def _reduce_exponent(e: int, q: int) -> int:
    # x^q = x as functions on F_q.
    if e < q:
        return e
    return (e - 1) % (q - 1) + 1


# ---------------------------------------------------------------------------
# Value tables.


class VectorialFunction:
    """A map F_{p^n} -> F_{p^m} (m | n) stored as its full value table.

    ``table[r]`` is the rank, in the codomain field, of F evaluated at the
    domain element of rank r.
    """

    __slots__ = ("dom", "cod", "table", "meta", "_emb", "_quad")

    def __init__(self, dom: FieldCtx, cod: FieldCtx, table, meta: dict | None = None):
        if dom.p != cod.p or dom.n % cod.n:
            raise FieldMismatchError(f"codomain {cod!r} is not a subfield size of {dom!r}")
        t = np.array(table, dtype=np.int64)
        if t.shape != (dom.q,):
            raise ValueError(f"table must have exactly {dom.q} entries, got {t.shape}")
        if t.size and (t.min() < 0 or t.max() >= cod.q):
            raise ValueError("table entries out of range for the codomain")
        t.setflags(write=False)
        self.dom = dom
        self.cod = cod
        self.table = t
        self.meta = dict(meta or {})
        self._emb: SubfieldEmbedding | None = None
        self._quad: bool | None = None

    # -- construction ----------------------------------------------------
    @classmethod
    def from_callable(cls, dom: FieldCtx, fn: Callable[[FieldElement], FieldElement], cod: FieldCtx | None = None):
        cod = cod or dom
        return cls(dom, cod, [cod.element(fn(x)).rank for x in dom.elements()])

    @classmethod
    def identity(cls, ctx: FieldCtx) -> "VectorialFunction":
        return cls(ctx, ctx, ctx.all_ranks())

    @classmethod
    def constant(cls, dom: FieldCtx, value: FieldElement, cod: FieldCtx | None = None):
        cod = cod or value.ctx
        return cls(dom, cod, np.full(dom.q, cod.element(value).rank, dtype=np.int64))

    # -- basic protocol ----------------------------------------------------
    @property
    def p(self) -> int:
        return self.dom.p

    @property
    def n(self) -> int:
        return self.dom.n

    @property
    def m(self) -> int:
        return self.cod.n

    @property
    def is_square(self) -> bool:
        return self.dom == self.cod

    def __call__(self, x: FieldElement) -> FieldElement:
        return FieldElement(self.cod, int(self.table[self.dom.element(x).rank]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VectorialFunction):
            return NotImplemented
        return self.dom == other.dom and self.cod == other.cod and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.dom, self.cod, self.table.tobytes()))

    def __repr__(self) -> str:
        return f"VectorialFunction(({self.n},{self.m}) over F_{self.p})"

    def _check(self, other: "VectorialFunction") -> None:
        if self.dom != other.dom or self.cod != other.cod:
            raise FieldMismatchError("functions have different domains or codomains")

    def __add__(self, other: "VectorialFunction") -> "VectorialFunction":
        self._check(other)
        return VectorialFunction(self.dom, self.cod, self.cod.add(self.table, other.table))

    def __sub__(self, other: "VectorialFunction") -> "VectorialFunction":
        self._check(other)
        return VectorialFunction(self.dom, self.cod, self.cod.sub(self.table, other.table))

    def scale(self, c: FieldElement) -> "VectorialFunction":
        """x -> c * F(x) for c in the codomain."""
        c = self.cod.element(c)
        return VectorialFunction(self.dom, self.cod, self.cod.mul(self.table, c.rank))

    def mismatches(self, other: "VectorialFunction") -> int:
        self._check(other)
        return int(np.count_nonzero(self.table != other.table))

    def is_permutation(self) -> bool:
        return self.is_square and np.unique(self.table).size == self.dom.q

    def inverse(self) -> "VectorialFunction":
        if not self.is_permutation():
            raise ValueError("function is not a permutation")
        inv = np.empty_like(self.table)
        inv[self.table] = np.arange(self.dom.q, dtype=np.int64)
        return VectorialFunction(self.dom, self.dom, inv)

    # -- (n,m) handling --------------------------------------------------
    def embedding(self) -> SubfieldEmbedding:
        if self._emb is None:
            self._emb = embedding(self.cod, self.dom)
        return self._emb

    def lift(self) -> "VectorialFunction":
        """The same map with values embedded into the domain field."""
        if self.is_square:
            return self
        return VectorialFunction(self.dom, self.dom, self.embedding().embed(self.table))

    def component(self, b: FieldElement) -> np.ndarray:
        """Tr(b F(x)) for every x, as integers in [0, p); b lives in the codomain."""
        b = self.cod.element(b)
        return self.cod.trace(self.cod.mul(self.table, b.rank))

    # -- file format -------------------------------------------------------
    def to_text(self) -> str:
        return "".join(f"{int(v):x}\n" for v in self.table)

    @classmethod
    def from_text(cls, text: str, dom: FieldCtx, cod: FieldCtx | None = None) -> "VectorialFunction":
        cod = cod or dom
        vals = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            s = line.strip()
            if not re.fullmatch(r"[0-9a-fA-F]+", s):
                col = 1 + len(line) - len(line.lstrip())
                raise ParseError(f"line {lineno}: expected a hex rank, got {s!r}", col, line)
            vals.append(int(s, 16))
        if len(vals) != dom.q:
            raise ParseError(f"expected {dom.q} lines, found {len(vals)}", 1, text[:40])
        return cls(dom, cod, vals)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def read(cls, path: str | Path, dom: FieldCtx, cod: FieldCtx | None = None) -> "VectorialFunction":
        return cls.from_text(Path(path).read_text(), dom, cod)


# ---------------------------------------------------------------------------
# Univariate polynomials.


class UnivariatePoly:
    """Sparse polynomial sum(a_e x^e) over F_{p^n} with exponents below p^n."""

    __slots__ = ("ctx", "_terms")

    def __init__(self, ctx: FieldCtx, terms: Mapping[int, "FieldElement | int"] | None = None):
        self.ctx = ctx
        acc: dict[int, int] = {}
        for e, c in (terms or {}).items():
            e = int(e)
            if e < 0:
                raise ValueError("negative exponent")
            r = ctx.element(c).rank if isinstance(c, FieldElement) else int(c)
            if not 0 <= r < ctx.q:
                raise ValueError(f"coefficient rank {r} out of range")
            e = _reduce_exponent(e, ctx.q)
            acc[e] = int(ctx.add(acc.get(e, 0), r)) if e in acc else r
        self._terms = {e: r for e, r in sorted(acc.items()) if r}

    @classmethod
    def monomial(cls, ctx: FieldCtx, e: int, c: "FieldElement | int" = 1) -> "UnivariatePoly":
        return cls(ctx, {e: c})

    @classmethod
    def x(cls, ctx: FieldCtx) -> "UnivariatePoly":
        return cls(ctx, {1: 1})

    @property
    def terms(self) -> dict[int, FieldElement]:
        """Exponent to nonzero coefficient, ascending by exponent."""
        return {e: FieldElement(self.ctx, r) for e, r in self._terms.items()}

    def coeff(self, e: int) -> FieldElement:
        return FieldElement(self.ctx, self._terms.get(e, 0))

    def coeff_ranks(self) -> dict[int, int]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[int, FieldElement]]:
        return iter(self.terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnivariatePoly):
            return NotImplemented
        return self.ctx == other.ctx and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.ctx, tuple(self._terms.items())))

    def __repr__(self) -> str:
        return f"UnivariatePoly({self})"

    def __str__(self) -> str:
        return format_poly(self)

    def _coerce(self, other) -> "UnivariatePoly":
        if isinstance(other, UnivariatePoly):
            if other.ctx != self.ctx:
                raise FieldMismatchError("polynomials over different fields")
            return other
        if isinstance(other, FieldElement):
            return UnivariatePoly(self.ctx, {0: other})
        if isinstance(other, (int, np.integer)):
            return UnivariatePoly(self.ctx, {0: self.ctx.constant(int(other))})
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        terms = dict(self._terms)
        for e, r in o._terms.items():
            terms[e] = int(self.ctx.add(terms.get(e, 0), r))
        return UnivariatePoly(self.ctx, terms)

    __radd__ = __add__

    def __neg__(self):
        return UnivariatePoly(self.ctx, {e: int(self.ctx.neg(r)) for e, r in self._terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        q = self.ctx.q
        out: dict[int, int] = {}
        for e1, r1 in self._terms.items():
            for e2, r2 in o._terms.items():
                e = _reduce_exponent(e1 + e2, q)
                out[e] = int(self.ctx.add(out.get(e, 0), self.ctx._smul(r1, r2)))
        return UnivariatePoly(self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = UnivariatePoly(self.ctx, {0: 1})
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def degree(self) -> int:
        """Algebraic degree (maximum p-weight of an exponent)."""
        return algebraic_degree(self)

    def max_exponent(self) -> int:
        return max(self._terms, default=0)

    def __call__(self, x: FieldElement) -> FieldElement:
        x = self.ctx.element(x)
        acc = self.ctx.zero
        for e, r in self._terms.items():
            acc = acc + FieldElement(self.ctx, r) * x**e
        return acc


def evaluate(poly: UnivariatePoly, cod: FieldCtx | None = None) -> VectorialFunction:
    """Value table of ``poly`` on every element of its field.

    With ``cod`` given (a subfield size), the values must lie in that subfield
    and are pulled back into it.
    """
    ctx = poly.ctx
    xs = ctx.all_ranks()
    acc = np.zeros(ctx.q, dtype=np.int64)
    if ctx.log is not None and len(poly) > 0:
        nz = xs[1:]
        lx = ctx.log[nz]
        order = ctx.q - 1
        for e, r in poly.coeff_ranks().items():
            if e == 0:
                acc = ctx.add(acc, np.full(ctx.q, r, dtype=np.int64))
                continue
            vals = ctx.exp[(lx * e + int(ctx.log[r])) % order]
            acc[1:] = ctx.add(acc[1:], vals)
    else:
        for e, r in poly.coeff_ranks().items():
            acc = ctx.add(acc, ctx.mul(ctx.power(xs, e), r))
    if cod is None or cod == ctx:
        return VectorialFunction(ctx, ctx, acc)
    return VectorialFunction(ctx, cod, embedding(cod, ctx).restrict(acc))


def interpolate(f: VectorialFunction) -> UnivariatePoly:
    """The unique polynomial of degree below p^n whose value table is ``f``.

    (n,m)-functions are first lifted into the domain field.
    """
    g = f.lift()
    ctx = g.dom
    if ctx.log is None:
        raise ValueError("interpolation needs discrete-log tables (field too large)")
    coeffs = _kernels.interpolate(g.table, ctx.exp, ctx.log, ctx.p, ctx.n)
    nz = np.nonzero(coeffs)[0]
    return UnivariatePoly(ctx, {int(e): int(coeffs[e]) for e in nz})


def algebraic_degree(poly: UnivariatePoly) -> int:
    """Maximum p-weight of an exponent; 0 for constants and the zero polynomial."""
    p = poly.ctx.p
    return max((p_weight(e, p) for e in poly.coeff_ranks()), default=0)


def degree_of(f: VectorialFunction) -> int:
    return algebraic_degree(interpolate(f))


def fp_anf_degrees(values: np.ndarray, p: int, n: int) -> np.ndarray:
    """Total degree of the reduced multivariate form of F_p-valued functions on F_p^n.

    ``values`` has shape (..., p^n) indexed by rank.  The reduced form comes
    from inverting the p x p Vandermonde matrix along every coordinate axis
    (the Moebius transform when p = 2).  Returns -1 for the zero function.
    """
    from .fplinalg import inverse

    v = np.asarray(values, dtype=np.int64) % p
    lead = v.shape[:-1]
    flat = v.reshape((-1,) + (p,) * n)
    if p == 2:
        for axis in range(1, n + 1):
            lo = np.take(flat, [0], axis=axis)
            hi = np.take(flat, [1], axis=axis)
            flat = np.concatenate([lo, lo ^ hi], axis=axis)
    else:
        vinv = inverse(np.array([[pow(x, k, p) for k in range(p)] for x in range(p)], dtype=np.int64), p)
        for axis in range(1, n + 1):
            flat = np.moveaxis(np.tensordot(vinv, flat, axes=([1], [axis])) % p, 0, axis)
    flat = flat.reshape(flat.shape[0], -1)
    monodeg = np.indices((p,) * n).reshape(n, -1).sum(axis=0)
    degs = np.where(flat != 0, monodeg[None, :], -1).max(axis=1)
    return degs.reshape(lead)


def coordinate_degree(f: VectorialFunction) -> int:
    """Algebraic degree computed from the coordinate functions instead of interpolation.

    The maximum total degree over the coordinates of F equals the univariate
    algebraic degree (the zero function gets 0).
    """
    g = f.lift()
    coords = np.moveaxis(g.dom.to_digits(g.table), -1, 0)
    return max(0, int(fp_anf_degrees(coords, g.p, g.n).max()))


def component_degree(vals: np.ndarray, ctx: FieldCtx) -> int:
    """Degree of an F_p-valued function on ``ctx`` (0 for constants)."""
    return max(0, int(fp_anf_degrees(np.asarray(vals)[None, :], ctx.p, ctx.n)[0]))


# ---------------------------------------------------------------------------
# Structural operations.


def do_decompose(poly: UnivariatePoly) -> tuple[UnivariatePoly, UnivariatePoly, FieldElement]:
    """Split a polynomial of degree <= 2 into (DO part, linear part, constant)."""
    p = poly.ctx.p
    parts: dict[int, dict[int, int]] = {0: {}, 1: {}, 2: {}}
    for e, r in poly.coeff_ranks().items():
        w = p_weight(e, p)
        if w > 2:
            raise DegreeError(f"exponent {e} has {p}-weight {w} > 2")
        parts[w][e] = r
    return (
        UnivariatePoly(poly.ctx, parts[2]),
        UnivariatePoly(poly.ctx, parts[1]),
        FieldElement(poly.ctx, parts[0].get(0, 0)),
    )


def compose(f: VectorialFunction, g: VectorialFunction) -> VectorialFunction:
    """x -> f(g(x))."""
    if g.cod != f.dom:
        raise FieldMismatchError("codomain of the inner function differs from the outer domain")
    return VectorialFunction(g.dom, f.cod, f.table[g.table])


def translate(f: VectorialFunction, gamma: FieldElement) -> VectorialFunction:
    """x -> f(x + gamma)."""
    gamma = f.dom.element(gamma)
    shifted = f.dom.add(f.dom.all_ranks(), gamma.rank)
    return VectorialFunction(f.dom, f.cod, f.table[shifted])


def derivative(f: VectorialFunction, gamma: FieldElement) -> VectorialFunction:
    """D_gamma f(x) = f(x + gamma) - f(x)."""
    return translate(f, gamma) - f


def trace_function(f: VectorialFunction, m: int) -> VectorialFunction:
    """x -> Tr^n_m(f(x)) as an (n, m)-function with values in the default F_{p^m}."""
    from .gfield import get_field

    if not f.is_square:
        raise FieldMismatchError("relative trace needs an (n,n)-function")
    small = get_field(f.p, m)
    vals = f.dom.rel_trace(f.table, m)
    return VectorialFunction(f.dom, small, embedding(small, f.dom).restrict(vals))


# ---------------------------------------------------------------------------
# Polynomial strings.


def format_poly(poly: UnivariatePoly, symbol: str = "g") -> str:
    """Render as ``x^9 + g^5*x^3 + g^2`` (descending exponents, coefficients as generator powers)."""
    parts = []
    for e in sorted(poly.coeff_ranks(), reverse=True):
        c = poly.coeff(e)
        cs = format_element(c, symbol)
        mon = "x" if e == 1 else f"x^{e}"
        if e == 0:
            parts.append(cs)
        elif cs == "1":
            parts.append(mon)
        else:
            parts.append(f"{cs}*{mon}")
    return " + ".join(parts) if parts else "0"


_TOKEN_RE = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^()]))")


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            col = pos + 1 + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[col - 1]!r}", col, text)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), start + 1))
        pos = m.end()
    toks.append(_Tok("end", "", len(text) + 1))
    return toks


class _PolyParser:
    def __init__(self, text: str, ctx: FieldCtx, symbols: Mapping[str, FieldElement]):
        self.text = text
        self.ctx = ctx
        self.symbols = dict(symbols)
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(msg, tok.col, self.text)

    def parse(self) -> UnivariatePoly:
        if self.peek().kind == "end":
            raise self.error("empty polynomial")
        out = self.expr()
        if self.peek().kind != "end":
            raise self.error(f"unexpected {self.peek().text!r}")
        return out

    def expr(self) -> UnivariatePoly:
        neg = False
        if self.peek().text in "+-" and self.peek().kind == "op":
            neg = self.take().text == "-"
        acc = self.term()
        if neg:
            acc = -acc
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> UnivariatePoly:
        acc = self.power()
        while self.peek().kind == "op" and self.peek().text == "*":
            self.take()
            acc = acc * self.power()
        return acc

    def power(self) -> UnivariatePoly:
        base_tok = self.peek()
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            k = self.exponent()
            if base_tok.kind == "name" and base_tok.text == "x":
                return UnivariatePoly(self.ctx, {k: 1})
            if len(base) == 1 and 0 in base.coeff_ranks():
                return UnivariatePoly(self.ctx, {0: base.coeff(0) ** k})
            return base**k
        return base

    def exponent(self) -> int:
        """An integer literal or a parenthesised integer expression such as (2^3+2)."""
        t = self.peek()
        if t.kind == "int":
            self.take()
            return int(t.text)
        if t.kind == "op" and t.text == "(":
            self.take()
            k = self.int_expr()
            if self.peek().text != ")":
                raise self.error("expected ')'")
            self.take()
            return k
        raise self.error("expected an integer exponent")

    def int_expr(self) -> int:
        sign = 1
        if self.peek().kind == "op" and self.peek().text in "+-":
            sign = -1 if self.take().text == "-" else 1
        acc = sign * self.int_term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            v = self.int_term()
            acc = acc + v if op == "+" else acc - v
        if acc < 0:
            raise self.error("exponent must be nonnegative")
        return acc

    def int_term(self) -> int:
        acc = self.int_power()
        while self.peek().kind == "op" and self.peek().text == "*":
            self.take()
            acc *= self.int_power()
        return acc

    def int_power(self) -> int:
        base = self.exponent()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            return base ** self.int_power()
        return base

    def atom(self) -> UnivariatePoly:
        t = self.take()
        if t.kind == "int":
            return UnivariatePoly(self.ctx, {0: self.ctx.constant(int(t.text))})
        if t.kind == "name":
            if t.text == "x":
                return UnivariatePoly(self.ctx, {1: 1})
            if t.text == "g":
                return UnivariatePoly(self.ctx, {0: self.ctx.gen})
            if t.text in self.symbols:
                return UnivariatePoly(self.ctx, {0: self.ctx.element(self.symbols[t.text])})
            raise self.error(f"unknown symbol {t.text!r}", t)
        if t.kind == "op" and t.text == "(":
            inner = self.expr()
            if self.peek().text != ")":
                raise self.error("expected ')'")
            self.take()
            return inner
        if t.kind == "end":
            raise self.error("unexpected end of input", t)
        raise self.error(f"unexpected {t.text!r}", t)


def parse_poly(text: str, ctx: FieldCtx, symbols: Mapping[str, FieldElement] | None = None) -> UnivariatePoly:
    """Parse a polynomial string; ``g`` is the field generator, extra names come from ``symbols``."""
    return _PolyParser(text, ctx, symbols or {}).parse()


def is_quadratic(f: VectorialFunction) -> bool:
    """True when deg f <= 2, i.e. every second derivative along basis pairs is constant.

    Bi-additivity of (a, b) -> D_a D_b f for such f extends the check to all
    direction pairs.
    """
    if f._quad is None:
        f._quad = _second_derivatives_constant(f)
    return f._quad


def _second_derivatives_constant(f: VectorialFunction) -> bool:
    dom, cod = f.dom, f.cod
    xs = dom.all_ranks()
    basis = [dom.p**i for i in range(dom.n)]
    shifted = {b: f.table[dom.add(xs, b)] for b in basis}
    for i, a in enumerate(basis):
        da = cod.sub(shifted[a], f.table)
        for b in basis[i:]:
            both = f.table[dom.add(dom.add(xs, a), b)]
            dab = cod.sub(cod.sub(both, shifted[b]), da)
            if np.any(dab != dab[0]):
                return False
    return True
