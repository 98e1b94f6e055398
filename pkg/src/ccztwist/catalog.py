"""Named quadratic families with their instantiation conditions.

Every builder returns a ``VectorialFunction`` whose ``meta`` dict records the
family, the concrete parameters and any predicted invariants.  Binary APN
families also carry the expected annihilator polynomial ``ell`` as a value
table (a linearised polynomial of degree below 2^n is determined by its
values).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Callable

import numpy as np

from .construct import ConstructionParams, complete_params, recipe_alpha, recipe_beta
from .gfield import FieldCtx, FieldElement, embedding, find_roots, get_field
from .vfunc import VectorialFunction, evaluate, parse_poly, trace_function


class FamilyConditionError(ValueError):
    """The requested size or parameters violate the family's conditions."""


@dataclass(frozen=True)
class FamilySpec:
    family_id: str
    description: str
    conditions: str
    source: str
    sizes: tuple[int, ...]  # field degrees used by the default sweep
    build: Callable[..., VectorialFunction] = field(repr=False, compare=False)


# ---------------------------------------------------------------------------
# Vectorised helpers on rank arrays of one field.


class _Ops:
    def __init__(self, ctx: FieldCtx):
        self.ctx = ctx
        self.x = ctx.all_ranks()

    def const(self, a) -> np.ndarray:
        return np.full(self.ctx.q, self.ctx.element(a).rank, dtype=np.int64)

    def mul(self, *args) -> np.ndarray:
        acc = args[0]
        for b in args[1:]:
            acc = self.ctx.mul(acc, b)
        return acc

    def add(self, *args) -> np.ndarray:
        acc = args[0]
        for b in args[1:]:
            acc = self.ctx.add(acc, b)
        return acc

    def frob(self, a, k: int) -> np.ndarray:
        return self.ctx.frob(a, k % self.ctx.n)

    def scal(self, c, a) -> np.ndarray:
        return self.ctx.mul(a, self.ctx.element(c).rank)

    def rtr(self, a, m: int) -> np.ndarray:
        return self.ctx.rel_trace(a, m)

    def tr(self, a) -> np.ndarray:
        return self.ctx.trace(a)  # in F_p, also the rank of the prime-field element


def _mon(o: _Ops, e: int) -> np.ndarray:
    """x^e on the whole field (0^e = 0 for e > 0)."""
    return o.ctx.power(o.x, e)


def _fn(ctx: FieldCtx, vals: np.ndarray, meta: dict) -> VectorialFunction:
    return VectorialFunction(ctx, ctx, vals, meta=meta)


def _ell(ctx: FieldCtx, vals: np.ndarray) -> VectorialFunction:
    return VectorialFunction(ctx, ctx, vals)


# ---------------------------------------------------------------------------
# Gold functions.


def gold_delta(p: int, n: int, i: int) -> int:
    d = gcd(i, n)
    if p == 2:
        return 2**d
    return 1 if (n // d) % 2 else p**d


def make_gold(p: int, n: int, i: int, modulus=None) -> VectorialFunction:
    """x^(p^i + 1) on F_{p^n}."""
    if not 1 <= i < n:
        raise FamilyConditionError("need 1 <= i < n")
    ctx = get_field(p, n, modulus)
    f = evaluate(parse_poly(f"x^{p**i + 1}", ctx))
    d = gcd(i, n)
    planar = p != 2 and (n // d) % 2 == 1
    return _fn(ctx, f.table, {"family": "gold", "i": i, "planar": planar, "delta": gold_delta(p, n, i)})


def gold_params(F0: VectorialFunction, c: int | None = None) -> ConstructionParams:
    """Explicit parameters for Gold functions.

    p = 2: alpha = 0, beta = gamma = 1 and c = n mod 2 unless given (c = 1 is
    also valid for even n).  Odd p: gamma = 1, c = 0, alpha from the trace
    recipe and beta = zeta - zeta^(p^d) with d = gcd(i, n), which needs n/d
    even.
    """
    ctx = F0.dom
    p, n, i = ctx.p, ctx.n, F0.meta["i"]
    if p == 2:
        cc = n % 2 if c is None else c
        return complete_params(F0, ctx.one, ctx.one, "recipe", alpha=ctx.zero, c=ctx.constant(cc))
    d = gcd(i, n)
    if (n // d) % 2:
        raise FamilyConditionError("odd p needs n/gcd(i,n) even (planar Gold functions have no linear structure)")
    beta = recipe_beta(ctx, d)
    return complete_params(F0, ctx.one, beta, "recipe", alpha=recipe_alpha(ctx), c=ctx.zero)


def gold_closed_form(F0: VectorialFunction, c: int) -> VectorialFunction:
    """Reference formulas for the binary Gold twist with alpha = 0 and beta = gamma = 1.

    c = 1: x^(2^i+1) + x + (x^(2^i) + x) Tr(x^(2^i+1) + x).
    c = 0: x^(2^i+1) + (x^(2^i) + x + 1) Tr(x^(2^i+1)).
    """
    ctx, i = F0.dom, F0.meta["i"]
    o = _Ops(ctx)
    g = _mon(o, 2**i + 1)
    xi = _mon(o, 2**i)
    if c:
        base = o.add(g, o.x)
        return _fn(ctx, o.add(base, ctx.scale_by(o.add(xi, o.x), o.tr(base))), {})
    lin = o.add(xi, o.x, o.const(1))
    return _fn(ctx, o.add(g, ctx.scale_by(lin, o.tr(g))), {})


def gold_odd_closed_form(F0: VectorialFunction, params: ConstructionParams) -> VectorialFunction:
    """x^(p^i+1) + eps (x^(p^i) + x + 1) + eps^2 - eps with eps = Tr(alpha x + beta x^(p^i+1))."""
    ctx, i, p = F0.dom, F0.meta["i"], F0.p
    o = _Ops(ctx)
    g = _mon(o, p**i + 1)
    eps = (o.tr(o.scal(params.alpha, o.x)) + o.tr(o.scal(params.beta, g))) % p
    lin = o.add(_mon(o, p**i), o.x, o.const(1))
    vals = o.add(g, ctx.scale_by(lin, eps), ctx.scale_by(o.const(1), (eps * eps - eps) % p))
    return _fn(ctx, vals, {})


# ---------------------------------------------------------------------------
# Binary quadratic APN families.


def _apn_bcl_binomial(ctx, r=3, k=None, s=None):
    n = ctx.n
    if r not in (3, 4) or n % r:
        raise FamilyConditionError("need n = r k with r in {3, 4}")
    k = n // r
    if gcd(k, r) != 1:
        raise FamilyConditionError("need gcd(k, r) = 1")
    if s is None:
        s = next((s for s in range(1, n) if gcd(s, n) == 1), None)
    if gcd(s, n) != 1:
        raise FamilyConditionError("need gcd(s, r k) = 1")
    i = (s * k) % r
    t = r - i
    g = ctx.gen
    G = g ** (2**k - 1)
    o = _Ops(ctx)
    vals = o.add(_mon(o, 2**s + 1), o.scal(G, _mon(o, 2 ** (i * k) + 2 ** (t * k + s))))
    gx = o.scal(G, o.x)
    ell = o.add(o.frob(o.x, n - s), o.x, o.frob(gx, t * k), o.frob(gx, i * k - s))
    return vals, ell, {"r": r, "k": k, "s": s, "i": i, "t": t, "omega": G.hex()}


def _bc_condition(ctx: FieldCtx, v: FieldElement, i: int) -> bool:
    """X^(2^i+1) + v X^(2^i) + v^q X + 1 has no zero with X^(q+1) = 1."""
    m = ctx.n // 2
    q = 2**m
    o = _Ops(ctx)
    U = o.x[_mon(o, q + 1) == 1]
    ev = ctx.add(
        ctx.add(ctx.power(U, 2**i + 1), ctx.mul(ctx.power(U, 2**i), v.rank)),
        ctx.add(ctx.mul(U, (v ** q).rank), 1),
    )
    return not np.any(ev == 0)


def _apn_bc_hexanomial(ctx, i=1, a=None, v=None):
    n = ctx.n
    if n % 2:
        raise FamilyConditionError("need n = 2m")
    m = n // 2
    q = 2**m
    if gcd(i, m) != 1:
        raise FamilyConditionError("need gcd(i, m) = 1")
    if v is None:
        v = next((ctx.element(r) for r in range(ctx.q) if _bc_condition(ctx, ctx.element(r), i)), None)
        if v is None:
            raise FamilyConditionError("no v satisfies the root condition")
    v = ctx.element(v)
    if not _bc_condition(ctx, v, i):
        raise FamilyConditionError("v violates the root condition")
    if a is None:
        a = next(ctx.element(r) for r in range(ctx.q) if not ctx.element(r).in_subfield(m))
    a = ctx.element(a)
    if a.in_subfield(m):
        raise FamilyConditionError("need a outside F_q")
    o = _Ops(ctx)
    vals = o.add(
        o.scal(a, _mon(o, 2**i * (q + 1))),
        _mon(o, 2**i + 1),
        _mon(o, q * (2**i + 1)),
        _mon(o, q + 1),
        o.scal(v, _mon(o, 2**i * q + 1)),
        o.scal(v**q, _mon(o, 2**i + q)),
    )
    one = ctx.one
    ell = o.add(
        o.frob(o.scal(a + v**q + one, o.x), 2 * m - i),
        o.frob(o.scal(a + v + one, o.x), m - i),
        o.scal(v, o.frob(o.x, m)),
        o.scal(v, o.x),
    )
    return vals, ell, {"i": i, "a": a.hex(), "v": v.hex()}


def _a_tilde(ctx: FieldCtx, a: FieldElement) -> FieldElement:
    return a ** (3 * 2 ** (ctx.n - 3)) + a**3


def _apn_bcl_trace(ctx, a=None):
    a = ctx.one if a is None else ctx.element(a)
    if a.rank == 0:
        raise FamilyConditionError("need a != 0")
    o = _Ops(ctx)
    ainv = a.inverse()
    tr = o.tr(o.scal(a**3, _mon(o, 9)))
    vals = o.add(_mon(o, 3), ctx.scale_by(o.const(ainv), tr))
    n = ctx.n
    xa = o.scal(ainv, o.x)
    ell = o.add(o.frob(o.x, n - 1), o.x, ctx.scale_by(o.const(_a_tilde(ctx, a)), o.tr(xa)))
    return vals, ell, {"a": a.hex()}


def _apn_bcl_trace3(ctx, a=None, variant="a"):
    n = ctx.n
    if n % 3:
        raise FamilyConditionError("need 3 | n")
    a = ctx.one if a is None else ctx.element(a)
    if a.rank == 0:
        raise FamilyConditionError("need a != 0")
    o = _Ops(ctx)
    ainv = a.inverse()
    if variant == "a":
        inner = o.add(o.scal(a**3, _mon(o, 9)), o.scal(a**6, _mon(o, 18)))
    else:
        inner = o.add(o.scal(a**6, _mon(o, 18)), o.scal(a**12, _mon(o, 36)))
    vals = o.add(_mon(o, 3), o.scal(ainv, o.rtr(inner, 3)))
    xa = o.scal(ainv, o.x)
    lin = o.add(xa, o.frob(xa, 2)) if variant == "a" else o.add(o.frob(xa, 1), o.frob(xa, 2))
    ell = o.add(o.frob(o.x, n - 1), o.x, o.scal(_a_tilde(ctx, a), o.rtr(lin, 3)))
    return vals, ell, {"a": a.hex()}


def _apn_bbmm(ctx, s=None, v=None, w=None):
    n = ctx.n
    if n % 3:
        raise FamilyConditionError("need n = 3k")
    k = n // 3
    if gcd(k, 3) != 1:
        raise FamilyConditionError("need gcd(k, 3) = 1")
    if s is None:
        s = next((s for s in range(1, n) if gcd(s, n) == 1 and (k + s) % 3 == 0), None)
    if s is None or gcd(s, n) != 1 or (k + s) % 3:
        raise FamilyConditionError("need gcd(s, 3k) = 1 and 3 | k + s")
    v = ctx.zero if v is None else ctx.element(v)
    w = ctx.zero if w is None else ctx.element(w)
    if not (v.in_subfield(k) and w.in_subfield(k)):
        raise FamilyConditionError("need v, w in F_(2^k)")
    if v * w == ctx.one:
        raise FamilyConditionError("need v w != 1")
    g = ctx.gen
    gk = g ** (2**k)
    o = _Ops(ctx)
    vals = o.add(
        o.scal(g, _mon(o, 2**s + 1)),
        o.scal(gk, _mon(o, 2 ** (2 * k) + 2 ** (k + s))),
        o.scal(v, _mon(o, 2 ** (2 * k) + 1)),
        o.scal(w * g ** (2**k + 1), _mon(o, 2**s + 2 ** (k + s))),
    )
    wg = w * g ** (2**k + 1)
    ell = o.add(
        o.frob(o.scal(g + wg, o.x), 3 * k - s),
        o.frob(o.scal(gk + wg, o.x), 2 * k - s),
        o.frob(o.scal(gk + v, o.x), k),
        o.scal(g + v, o.x),
    )
    return vals, ell, {"k": k, "s": s, "v": v.hex(), "w": w.hex()}


def _apn_zp(ctx, k=1, i=2, v=None):
    n = ctx.n
    if n % 2:
        raise FamilyConditionError("need n = 2m")
    m = n // 2
    if m < 2 or m % 2 or gcd(k, m) != 1 or i < 2 or i % 2:
        raise FamilyConditionError("need m >= 2 even, gcd(k, m) = 1 and i >= 2 even")
    sub = [ctx.element(int(r)) for r in ctx.subfield_ranks(m)]
    cubes = {(b**3).rank for b in sub}
    if v is None:
        v = next((b for b in sub if b.rank not in cubes), None)
    v = ctx.element(v)
    if not v.in_subfield(m) or v.rank in cubes:
        raise FamilyConditionError("need v in F_(2^m) not a cube")
    g = ctx.gen
    o = _Ops(ctx)
    u = o.add(o.x, o.frob(o.x, m))
    gxm = o.add(o.scal(g, o.x), o.scal(g ** (2**m), o.frob(o.x, m)))
    vals = o.add(
        ctx.power(u, 2**k + 1),
        o.scal(v, ctx.power(gxm, (2**k + 1) * 2**i % (ctx.q - 1) or (ctx.q - 1))),
        o.scal(g, o.mul(u, gxm)),
    )
    gt = g ** (2**m) + g
    vx = o.scal(v, o.x)
    w1 = o.add(o.frob(vx, m), vx)
    gx = o.scal(g, o.x)
    ell = o.add(
        o.scal(g * gt ** (2 ** ((m - k) % n)), o.frob(w1, m - k - i)),
        o.scal(g * gt ** (2**k), o.frob(w1, m - i)),
        o.scal(gt, o.add(o.frob(gx, m), gx)),
    )
    return vals, ell, {"k": k, "i": i, "v": v.hex()}


def _bcccv_ok(ctx: FieldCtx, a: FieldElement, v: FieldElement, w: FieldElement, U: np.ndarray) -> bool:
    m = ctx.n // 3
    L = ctx.add(ctx.add(ctx.mul(ctx.frob(U, 2 * m), a.rank), ctx.mul(ctx.frob(U, m), v.rank)), ctx.mul(U, w.rank))
    if np.any(L == 0) or np.any(L == U):
        return False
    u1, u2 = np.meshgrid(U, U, indexing="ij")
    L1, L2 = np.meshgrid(L, L, indexing="ij")
    den = ctx.add(ctx.mul(ctx.power(u1, 2), L2), ctx.mul(u2, ctx.power(L1, 2)))
    num = ctx.add(ctx.mul(ctx.power(u2, 2), L1), ctx.mul(u1, ctx.power(L2, 2)))
    # u1 = u2 always gives ratio 1, so only distinct pairs are constrained.
    nz = (den != 0) & (u1 != u2)
    ratio = ctx.mul(num[nz], ctx.inv(den[nz]))
    return not np.any(ctx.in_subfield(ratio, m))


def _apn_bcccv(ctx, a=None, v=None, w=None, budget=1 << 16):
    n = ctx.n
    if n % 3 or (n // 3) % 2 == 0:
        raise FamilyConditionError("need n = 3m with m odd")
    m = n // 3
    order = 2 ** (2 * m) + 2**m + 1
    o = _Ops(ctx)
    U = o.x[(o.x != 0) & (_mon(o, order) == 1)]
    if a is None or v is None or w is None:
        found = None
        tried = 0
        for ar in range(ctx.q):
            for vr in range(ctx.q):
                for wr in range(ctx.q):
                    tried += 1
                    if tried > budget:
                        raise FamilyConditionError(f"no valid (a, v, w) among the first {budget} triples")
                    cand = (ctx.element(ar), ctx.element(vr), ctx.element(wr))
                    if _bcccv_ok(ctx, *cand, U):
                        found = cand
                        break
                if found:
                    break
            if found:
                break
        a, v, w = found
    a, v, w = ctx.element(a), ctx.element(v), ctx.element(w)
    if not _bcccv_ok(ctx, a, v, w, U):
        raise FamilyConditionError("(a, v, w) violates the subgroup condition")
    vals = o.add(
        o.scal(a**2, _mon(o, 2 ** (2 * m + 1) + 1)),
        o.scal(v**2, _mon(o, 2 ** (m + 1) + 1)),
        o.scal(a, _mon(o, 2 ** (2 * m) + 2)),
        o.scal(v, _mon(o, 2**m + 2)),
        o.scal(w**2 + w, _mon(o, 3)),
    )
    ell = o.add(
        o.frob(o.scal(a + v + w**2 + w, o.x), 3 * m - 1),
        o.frob(o.scal(v, o.x), 2 * m),
        o.frob(o.scal(v**2, o.x), 2 * m - 1),
        o.frob(o.scal(a, o.x), m),
        o.frob(o.scal(a**2, o.x), m - 1),
        o.scal(a**2 + v**2 + w**2 + w, o.x),
    )
    return vals, ell, {"a": a.hex(), "v": v.hex(), "w": w.hex()}


def _tani_ok(ctx: FieldCtx, a: FieldElement, w: FieldElement, i: int) -> bool:
    m = ctx.n // 2
    X = ctx.subfield_ranks(m)
    ev = ctx.add(ctx.add(ctx.power(X, 2**i + 1), ctx.mul(X, a.rank)), w.rank)
    return not np.any(ev == 0)


def _apn_taniguchi(ctx, i=1, v=None, a=None, w=None):
    n = ctx.n
    if n % 2:
        raise FamilyConditionError("need n = 2m")
    m = n // 2
    q = 2**m
    if gcd(i, m) != 1:
        raise FamilyConditionError("need gcd(i, m) = 1")
    if v is None:
        v = next(ctx.element(r) for r in range(ctx.q) if not ctx.element(r).in_subfield(m))
    v = ctx.element(v)
    if v.in_subfield(m):
        raise FamilyConditionError("need v outside F_q")
    sub = [ctx.element(int(r)) for r in ctx.subfield_ranks(m)]
    if a is None or w is None:
        pair = next(((aa, ww) for aa in sub for ww in sub if _tani_ok(ctx, aa, ww, i)), None)
        if pair is None:
            raise FamilyConditionError("no (a, w) satisfies the root condition")
        a, w = pair
    a, w = ctx.element(a), ctx.element(w)
    if not (a.in_subfield(m) and w.in_subfield(m)) or not _tani_ok(ctx, a, w, i):
        raise FamilyConditionError("need a, w in F_q with X^(2^i+1) + aX + w zero-free on F_q")
    o = _Ops(ctx)
    y = o.add(o.scal(v**q, o.x), o.scal(v, o.frob(o.x, m)))
    z = o.add(o.frob(o.x, m), o.x)
    vals = o.add(
        o.scal(v, o.mul(y, z)),
        ctx.power(y, 2 ** (2 * i) + 2 ** (3 * i)),
        o.scal(a, o.mul(o.frob(y, 2 * i), o.frob(z, i))),
        o.scal(w, ctx.power(z, 2**i + 1)),
    )
    vt = v**q + v
    ax = o.scal(a, o.x)
    vx = o.scal(v, o.x)
    ell = o.add(
        o.scal(vt ** (2**i), o.frob(o.add(o.frob(ax, m), ax), m - i)),
        o.scal(v**q * vt ** (2**i), o.frob(z, m - 2 * i)),
        o.scal(v**q * vt ** (2 ** ((m - i) % n)), o.frob(z, m - 3 * i)),
        o.scal(vt, o.add(o.frob(vx, m), vx)),
    )
    return vals, ell, {"i": i, "v": v.hex(), "a": a.hex(), "w": w.hex()}


def _apn_bhk(ctx, i=None, k=0):
    n = ctx.n
    if n % 2:
        raise FamilyConditionError("need n = 2m")
    m = n // 2
    if m % 2 == 0 or m % 3 == 0:
        raise FamilyConditionError("need m odd and 3 not dividing m")
    allowed = {(m - 2) % n}
    if gcd(m - 2, n) == 1:
        allowed.add(pow(m - 2, -1, n))
    if i is None:
        i = min(allowed)
    if i % n not in allowed:
        raise FamilyConditionError(f"need i in {sorted(allowed)}")
    om = find_roots([1, 1, 1], ctx)[0]
    o = _Ops(ctx)
    vals = o.add(
        _mon(o, 3),
        o.scal(om, o.frob(_mon(o, 2**i + 1), k)),
        o.scal(om**2, _mon(o, 3 * 2**m)),
        o.frob(_mon(o, 2 ** ((i + m) % n) + 2**m), k),
    )
    fx = lambda e: o.frob(o.x, e)  # noqa: E731
    ell = o.add(
        fx(2 * m - 1),
        o.scal(om ** (2**k), fx(2 * m - k)),
        o.scal(om ** (2 ** (k + 1)), fx(2 * m - k - i)),
        o.scal(om, fx(m)),
        o.scal(om**2, fx(m - 1)),
        fx(m - k),
        fx(m - k - i),
        o.x,
    )
    return vals, ell, {"i": i, "k": k, "omega": om.hex()}


APN_ROWS: dict[int, tuple[str, Callable, str]] = {
    1: ("apn-binomial", _apn_bcl_binomial, "Budaghyan-Carlet-Leander 2008"),
    2: ("apn-hexanomial", _apn_bc_hexanomial, "Budaghyan-Carlet 2008"),
    3: ("apn-trace", _apn_bcl_trace, "Budaghyan-Carlet-Leander 2009"),
    4: ("apn-trace3a", lambda ctx, **kw: _apn_bcl_trace3(ctx, variant="a", **kw), "Budaghyan-Carlet-Leander 2009"),
    5: ("apn-trace3b", lambda ctx, **kw: _apn_bcl_trace3(ctx, variant="b", **kw), "Budaghyan-Carlet-Leander 2009"),
    6: ("apn-bracken", _apn_bbmm, "Bracken-Byrne-Markin-McGuire 2008"),
    7: ("apn-zhou-pott", _apn_zp, "Zhou-Pott 2013"),
    8: ("apn-subgroup", _apn_bcccv, "Budaghyan-Calderini-Carlet-Coulter-Villa"),
    9: ("apn-taniguchi", _apn_taniguchi, "Taniguchi 2019"),
    10: ("apn-bhk", _apn_bhk, "Budaghyan-Helleseth-Kaleyski 2019"),
}


def make_apn_family(row: int, n: int, modulus=None, **params) -> tuple[VectorialFunction, VectorialFunction]:
    """(F_0, expected ell) for one of the binary quadratic APN families (rows 1-10).

    The expected annihilator polynomial is returned as its value table.
    """
    if row not in APN_ROWS:
        raise KeyError(f"unknown APN family row {row}")
    name, builder, source = APN_ROWS[row]
    ctx = get_field(2, n, modulus)
    vals, ell, used = builder(ctx, **params)
    meta = {"family": name, "row": row, "source": source, "params": used}
    return _fn(ctx, vals, meta), _ell(ctx, ell)


def apn_params(F0: VectorialFunction, beta: FieldElement | None = None) -> ConstructionParams:
    """alpha = 0, gamma = 1, c = F_0(1) and beta the nonzero root of ell (found if not given)."""
    ctx = F0.dom
    return complete_params(F0, ctx.one, beta, "recipe", alpha=ctx.zero, c=F0(ctx.one) - F0(ctx.zero))


# ---------------------------------------------------------------------------
# Two sporadic APN functions on F_{2^9}.

SPORADIC9 = {
    0: "x^3 + u^2*x^(2^3+2) + u*x^(2^4+2^3) + u^4*x^(2^6+2^4) + u^6*x^(2^7+2^3)",
    1: "x^3 + u*x^(2^3+2) + u^2*x^(2^4+1) + u^4*x^(2^6+2^4) + u^5*x^(2^7+2^6)",
}
SPORADIC9_ELL = "u^3*x^(2^8) + u^3*x^(2^6) + u*x^(2^5) + u^4*x^(2^3) + u^3*x^(2^2) + x"


def make_sporadic9(which: int, root_index: int = 0, modulus=None) -> VectorialFunction:
    """One of two sporadic quadratic APN functions on F_{2^9}.

    u is a primitive element of the subfield F_8; ``root_index`` picks which
    root of x^3 + x + 1 (sorted by rank) plays that role.
    """
    if which not in SPORADIC9:
        raise KeyError("which must be 0 or 1")
    ctx = get_field(2, 9, modulus)
    u = embedding(get_field(2, 3), ctx, root_index).root
    f = evaluate(parse_poly(SPORADIC9[which], ctx, {"u": u}))
    return _fn(ctx, f.table, {"family": f"sporadic9-{which}", "u": u.hex(), "root_index": root_index})


def sporadic9_ell(F0: VectorialFunction) -> VectorialFunction:
    ctx = F0.dom
    u = ctx.element(int(F0.meta["u"], 16))
    return evaluate(parse_poly(SPORADIC9_ELL, ctx, {"u": u}))


# ---------------------------------------------------------------------------
# A worked example with a relative trace to F_8.


def make_trace_example(n: int, a: FieldElement | int | None = None) -> tuple[VectorialFunction, ConstructionParams]:
    """x^3 + a^-1 Tr^n_3(a^3 x^9 + a^6 x^18) with its explicit parameters.

    With w = Tr^n_3(a): w = 0 gives (alpha, beta, gamma, c) = (0, a^3, a^-1, a^-2);
    otherwise (0, w^5 a^3, w^3 a^-1, w^6 a^-2).
    """
    ctx = get_field(2, n)
    a = ctx.gen if a is None else ctx.element(a)
    F0, _ = make_apn_family(4, n, a=a)
    w = a.rel_trace(3)
    if w.rank == 0:
        beta, gamma, c = a**3, a.inverse(), a ** (-2 % (ctx.q - 1))
    else:
        beta, gamma, c = w**5 * a**3, w**3 * a.inverse(), w**6 * a.inverse() ** 2
    F0.meta["trace_a"] = w.hex()
    params = complete_params(F0, gamma, beta, "recipe", alpha=ctx.zero, c=c)
    return F0, params


# ---------------------------------------------------------------------------
# (n,m)-functions from relative traces.


def make_nm_family(kind: str, n: int, m: int, i: int = 1, p: int | None = None, beta=None) -> VectorialFunction:
    """Relative-trace families F' : F_{p^n} -> F_{p^m}.

    ``gold2``: Tr^n_m(x^(2^i+1)).  ``goldp``: Tr^n_m(beta x^(p^i+1)) with
    beta in F_{p^2}, beta^p + beta = 0 (default p = 3).
    """
    if n % m:
        raise FamilyConditionError("need m | n")
    if kind == "gold2":
        ctx = get_field(2, n)
        f = trace_function(evaluate(parse_poly(f"x^{2**i + 1}", ctx)), m)
        meta = {"family": "nm-gold2", "i": i, "delta": 2 ** (n - m + 1)}
        return VectorialFunction(f.dom, f.cod, f.table, meta=meta)
    if kind == "goldp":
        p = p or 3
        ctx = get_field(p, n)
        if n % 2:
            raise FamilyConditionError("need F_(p^2) inside F_(p^n)")
        b = recipe_beta(ctx, 1) if beta is None else ctx.element(beta)
        if (b ** p + b).rank:
            raise FamilyConditionError("need beta^p + beta = 0")
        base = evaluate(parse_poly(f"x^{p**i + 1}", ctx))
        scaled = VectorialFunction(ctx, ctx, ctx.mul(base.table, b.rank))
        f = trace_function(scaled, m)
        deg_pred = 3 if (m % 2 or (n // m) % p == 0) else 4
        meta = {"family": "nm-goldp", "i": i, "beta": b.hex(), "delta": p ** (n - m + 1), "twist_degree": deg_pred}
        return VectorialFunction(f.dom, f.cod, f.table, meta=meta)
    raise KeyError(f"unknown (n,m) family {kind!r}")


def nm_gold2_reference(n: int, m: int, i: int = 1) -> VectorialFunction:
    """Tr^n_m(x^(2^i+1)) + Tr^n_m(x^(2^i) + x) Tr(x^(2^i+1) + x)."""
    ctx = get_field(2, n)
    o = _Ops(ctx)
    g = _mon(o, 2**i + 1)
    vals = o.add(o.rtr(g, m), ctx.scale_by(o.rtr(o.add(_mon(o, 2**i), o.x), m), o.tr(o.add(g, o.x))))
    small = get_field(2, m)
    return VectorialFunction(ctx, small, embedding(small, ctx).restrict(vals))


def nm_goldp_reference(F: VectorialFunction, alpha: FieldElement) -> VectorialFunction:
    """Tr^n_m(beta x^(p^i+1)) + eps Tr^n_m(beta (x^(p^i) + x + 1)) + Tr^n_m(beta)(eps^2 - eps).

    Here eps = Tr(alpha x + beta x^(p^i+1)).
    """
    ctx, m, p, i = F.dom, F.m, F.p, F.meta["i"]
    b = ctx.element(int(F.meta["beta"], 16))
    o = _Ops(ctx)
    g = _mon(o, p**i + 1)
    eps = (o.tr(o.scal(alpha, o.x)) + o.tr(o.scal(b, g))) % p
    lin = o.rtr(o.scal(b, o.add(_mon(o, p**i), o.x, o.const(1))), m)
    vals = o.add(
        o.rtr(o.scal(b, g), m),
        ctx.scale_by(lin, eps),
        ctx.scale_by(o.const(b.rel_trace(m)), (eps * eps - eps) % p),
    )
    return VectorialFunction(ctx, F.cod, embedding(F.cod, ctx).restrict(vals))


# ---------------------------------------------------------------------------
# Registry.


def _registry() -> dict[str, FamilySpec]:
    out = {
        "gold": FamilySpec(
            "gold", "x^(p^i+1)", "1 <= i < n", "Gold 1968", (4, 5, 6, 7, 8, 9),
            lambda n, p=2, i=1, **kw: make_gold(p, n, i, **kw),
        ),
    }
    cond = {
        1: "n = rk, r in {3,4}, gcd(k,r) = gcd(s,rk) = 1, n >= 12",
        2: "n = 2m, gcd(i,m) = 1, a outside F_(2^m), root condition on v",
        3: "a != 0",
        4: "3 | n, a != 0",
        5: "3 | n, a != 0",
        6: "n = 3k, gcd(k,3) = gcd(s,3k) = 1, 3 | k+s, v,w in F_(2^k), vw != 1",
        7: "n = 2m, m even, gcd(k,m) = 1, i >= 2 even, v in F_(2^m) not a cube",
        8: "n = 3m, m odd, subgroup condition on (a, v, w)",
        9: "n = 2m, gcd(i,m) = 1, X^(2^i+1) + aX + w zero-free on F_(2^m)",
        10: "n = 2m, m odd, 3 not dividing m, i = m-2 or (m-2)^-1 mod n",
    }
    sizes = {1: (12,), 2: (6, 8), 3: (5, 6, 7, 8, 9), 4: (6, 9), 5: (6, 9), 6: (6,), 7: (4, 8), 8: (9,), 9: (6, 8), 10: (10,)}
    for row, (name, _, source) in APN_ROWS.items():
        out[name] = FamilySpec(
            name, f"binary quadratic APN family {row}", cond[row], source, sizes[row],
            (lambda r: lambda n, **kw: make_apn_family(r, n, **kw)[0])(row),
        )
    for which in (0, 1):
        out[f"sporadic9-{which}"] = FamilySpec(
            f"sporadic9-{which}", "sporadic quadratic APN function on F_(2^9)", "n = 9", "Edel-Pott", (9,),
            (lambda w: lambda n=9, root_index=0, **kw: make_sporadic9(w, root_index))(which),
        )
    out["trace-example"] = FamilySpec(
        "trace-example", "x^3 + a^-1 Tr^n_3(a^3 x^9 + a^6 x^18)", "3 | n, a != 0", "Budaghyan-Carlet-Leander 2009",
        (6, 9), lambda n, a=None, **kw: make_trace_example(n, a)[0],
    )
    out["nm-gold2"] = FamilySpec(
        "nm-gold2", "Tr^n_m(x^(2^i+1))", "m | n", "", (8,),
        lambda n, m=4, i=1, **kw: make_nm_family("gold2", n, m, i),
    )
    out["nm-goldp"] = FamilySpec(
        "nm-goldp", "Tr^n_m(beta x^(p^i+1)), beta^p = -beta", "m | n, 2 | n", "", (8,),
        lambda n, m=4, i=1, p=3, **kw: make_nm_family("goldp", n, m, i, p=p),
    )
    return out


FAMILIES: dict[str, FamilySpec] = _registry()


def build(family_id: str, n: int, **params) -> VectorialFunction:
    if family_id not in FAMILIES:
        raise KeyError(f"unknown family {family_id!r}; known: {', '.join(sorted(FAMILIES))}")
    return FAMILIES[family_id].build(n, **params)
