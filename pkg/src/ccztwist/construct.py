"""The twist F o H of a quadratic F by a trace involution H.

Given a quadratic F_0, nonzero gamma and beta with Tr(beta L_gamma(x)) = 0,
alpha with Tr(alpha gamma) = -2 and c with
Tr(c beta gamma) = -Tr(beta D_gamma F_0(0)), put F = F_0 + c x and

    eps(x) = Tr(alpha x) + Tr(beta F(x)),   H(x) = x + gamma eps(x).

H is an involution, F o H is CCZ-equivalent to F through the graph map
(x, y) -> (x + gamma (Tr(alpha x) + Tr(beta y)), y) and

    F o H = F + eps D_gamma F + F_DO(gamma) (eps^2 - eps)

where the last term vanishes for p = 2.  For (n,m)-functions beta lives in
F_{p^m}, the trace of beta y is taken over F_{p^m} and c x becomes
Tr^n_m(c x).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import invariants
from .equiv import GraphMap, ea_distinguish, graph_map_is_permutation, verify_ccz_witness
from .gfield import FieldCtx, FieldElement, embedding, get_field, solve_trace_affine
from .linstruct import find_structure_pair, lmap_table, structure_pairs, _betas_for
from .vfunc import (
    DegreeError,
    VectorialFunction,
    compose,
    degree_of,
    derivative,
    do_decompose,
    interpolate,
    is_quadratic,
)

STRATEGIES = ("canonical", "recipe")


class InvalidParamsError(ValueError):
    """A construction tuple violates one of the defining invariants.

    ``invariant`` names it: ``trace_alpha_gamma``, ``linear_structure``,
    ``trace_c`` or ``nonzero``.
    """

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class InvolutionError(RuntimeError):
    """H o H differs from the identity."""


class ConstructionError(RuntimeError):
    """Two independent computations of F o H disagree."""


@dataclass(frozen=True)
class ConstructionParams:
    """alpha, gamma, c in the domain field; beta in the codomain field."""

    alpha: FieldElement
    beta: FieldElement
    gamma: FieldElement
    c: FieldElement
    strategy: str = "canonical"

    @property
    def mode(self) -> str:
        return "nn" if self.beta.ctx == self.gamma.ctx else "nm"

    def graph_map(self) -> GraphMap:
        return GraphMap(self.alpha, self.beta, self.gamma)

    def to_json(self) -> dict:
        return {
            "field": self.gamma.ctx.spec(),
            "codomain": self.beta.ctx.spec(),
            "alpha": self.alpha.hex(),
            "beta": self.beta.hex(),
            "gamma": self.gamma.hex(),
            "c": self.c.hex(),
            "strategy": self.strategy,
        }

    @classmethod
    def from_json(cls, data: dict, dom: FieldCtx, cod: FieldCtx | None = None) -> "ConstructionParams":
        cod = cod or dom
        rk = lambda s: int(str(s), 16)  # noqa: E731
        return cls(
            dom.element(rk(data["alpha"])),
            cod.element(rk(data["beta"])),
            dom.element(rk(data["gamma"])),
            dom.element(rk(data["c"])),
            data.get("strategy", "canonical"),
        )


# ---------------------------------------------------------------------------
# Small helpers.


def _beta_in_dom(F: VectorialFunction, beta: FieldElement) -> FieldElement:
    if F.is_square:
        return beta
    return F.embedding()(beta)


def adjust(F0: VectorialFunction, c: FieldElement) -> VectorialFunction:
    """F_0 + c x, or F_0 + Tr^n_m(c x) for (n,m)-functions."""
    dom = F0.dom
    c = dom.element(c)
    lin = dom.mul(dom.all_ranks(), c.rank)
    if not F0.is_square:
        lin = F0.embedding().restrict(dom.rel_trace(lin, F0.m))
    return VectorialFunction(dom, F0.cod, F0.cod.add(F0.table, lin), meta=F0.meta)


def epsilon_table(F: VectorialFunction, alpha: FieldElement, beta: FieldElement) -> np.ndarray:
    """Tr(alpha x) + Tr(beta F(x)) for every x, in [0, p)."""
    dom = F.dom
    ta = dom.trace(dom.mul(dom.all_ranks(), dom.element(alpha).rank))
    return (ta + F.component(beta)) % F.p


def _d_gamma_at_zero(F0: VectorialFunction, gamma: FieldElement) -> int:
    return int(F0.cod.sub(F0.table[gamma.rank], F0.table[0]))


def check_params(F0: VectorialFunction, params: ConstructionParams) -> None:
    """Raise InvalidParamsError naming the first violated invariant."""
    dom, cod, p = F0.dom, F0.cod, F0.p
    a, b, g, c = params.alpha, params.beta, params.gamma, params.c
    if a.ctx != dom or g.ctx != dom or c.ctx != dom or b.ctx != cod:
        raise InvalidParamsError("nonzero", "parameters live in the wrong fields")
    if g.rank == 0 or b.rank == 0:
        raise InvalidParamsError("nonzero", "gamma and beta must be nonzero")
    if (a * g).trace() != (-2) % p:
        raise InvalidParamsError("trace_alpha_gamma", f"Tr(alpha*gamma) = {(a * g).trace()}, need {(-2) % p}")
    lvals = lmap_table(F0, g)
    if np.any(cod.trace(cod.mul(lvals, b.rank)) != 0):
        raise InvalidParamsError("linear_structure", "Tr(beta L_gamma(x)) is not identically zero")
    target = (-(b * cod.element(_d_gamma_at_zero(F0, g))).trace()) % p
    bd = _beta_in_dom(F0, b)
    if (c * bd * g).trace() != target:
        raise InvalidParamsError("trace_c", f"Tr(c*beta*gamma) = {(c * bd * g).trace()}, need {target}")


def _min_poly_over_fp(tau: FieldElement) -> list[FieldElement]:
    """Coefficients (low to high) of prod (x - conjugate) for the distinct conjugates of tau."""
    ctx = tau.ctx
    conj = []
    t = tau
    while t not in conj:
        conj.append(t)
        t = t.frobenius(1)
    coeffs = [ctx.one]
    for r in conj:
        nxt = [ctx.zero] * (len(coeffs) + 1)
        for i, a in enumerate(coeffs):
            nxt[i + 1] = nxt[i + 1] + a
            nxt[i] = nxt[i] - a * r
        coeffs = nxt
    return coeffs


def recipe_alpha(ctx: FieldCtx) -> FieldElement:
    """An element of trace -2 from an explicit recipe.

    p = 2: 0.  p not dividing n: the constant -2/n.  Otherwise, with tau the
    generator, h its minimal polynomial and h(x)/(x - tau) = sum a_i x^i,
    Tr(a_0 / h'(tau)) = 1, so -2 a_0 / h'(tau) works.
    """
    p, n = ctx.p, ctx.n
    if p == 2:
        return ctx.zero
    if n % p:
        return ctx.constant((-2 * pow(n, -1, p)) % p)
    tau = ctx.gen
    h = _min_poly_over_fp(tau)
    # Synthetic division of h by (x - tau).
    deg = len(h) - 1
    q = [ctx.zero] * deg
    acc = ctx.zero
    for i in range(deg, 0, -1):
        acc = h[i] + acc * tau
        q[i - 1] = acc
    a0 = q[0]
    dh = ctx.zero
    for a in reversed(q):
        dh = dh * tau + a
    unit = a0 / dh
    assert unit.trace() == 1, "trace identity for the dual-basis recipe failed"
    return unit * ctx.constant(p - 2)


def recipe_beta(ctx: FieldCtx, d: int) -> FieldElement:
    """zeta - zeta^(p^d) for the smallest-rank zeta in F_{p^2d} outside F_{p^d}.

    The result satisfies beta^(p^d) + beta = 0.
    """
    if ctx.n % (2 * d):
        raise ValueError(f"F_(p^{2 * d}) is not a subfield of {ctx.spec()}")
    big = ctx.subfield_ranks(2 * d)
    small = set(int(r) for r in ctx.subfield_ranks(d))
    zeta = ctx.element(int(next(r for r in big if int(r) not in small)))
    return zeta - zeta.frobenius(d)


def complete_params(
    F0: VectorialFunction,
    gamma: FieldElement | None = None,
    beta: FieldElement | None = None,
    strategy: str = "canonical",
    alpha: FieldElement | None = None,
    c: FieldElement | None = None,
) -> ConstructionParams:
    """Fill in whatever is missing of (alpha, beta, gamma, c) and validate the result.

    ``canonical`` takes the smallest-rank solution of each affine trace
    equation (and the first structure pair in rank order).  ``recipe`` uses
    the explicit alpha recipe scaled by 1/gamma and c = -D_gamma F_0(0)/gamma.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if not is_quadratic(F0):
        raise DegreeError("the construction needs a quadratic function")
    dom, cod, p = F0.dom, F0.cod, F0.p
    if gamma is None and beta is None:
        pair = find_structure_pair(F0)
        if pair is None:
            raise InvalidParamsError("linear_structure", "no component of F_0 has a nonzero linear structure")
        gamma, beta = pair
    elif beta is None:
        gamma = dom.element(gamma)
        betas = _betas_for(F0, gamma.rank)
        if not betas.size:
            raise InvalidParamsError("linear_structure", f"no beta works for gamma={gamma.hex()}")
        beta = cod.element(int(betas[0]))
    elif gamma is None:
        beta = cod.element(beta)
        for g in range(1, dom.q):
            if int(beta.rank) in set(_betas_for(F0, g).tolist()):
                gamma = dom.element(g)
                break
        else:
            raise InvalidParamsError("linear_structure", f"beta={beta.hex()} annihilates no L_gamma")
    gamma, beta = dom.element(gamma), cod.element(beta)
    if gamma.rank == 0 or beta.rank == 0:
        raise InvalidParamsError("nonzero", "gamma and beta must be nonzero")

    if alpha is None:
        if strategy == "recipe":
            alpha = recipe_alpha(dom) / gamma
        else:
            alpha = solve_trace_affine((-2) % p, gamma).solution
    alpha = dom.element(alpha)

    if c is None:
        dval = cod.element(_d_gamma_at_zero(F0, gamma))
        target = (-(beta * dval).trace()) % p
        bd = _beta_in_dom(F0, beta)
        if strategy == "recipe" and F0.is_square:
            c = -dval / gamma
        elif strategy == "recipe" and target == 0:
            c = dom.zero
        elif strategy == "recipe" and (F0.n // F0.m) % p:
            c = -F0.embedding()(dval) / (gamma * dom.constant(F0.n // F0.m))
        else:
            c = solve_trace_affine(target, bd * gamma).solution
    params = ConstructionParams(alpha, beta, gamma, dom.element(c), strategy)
    check_params(F0, params)
    return params


def build_involution(F: VectorialFunction, params: ConstructionParams) -> tuple[VectorialFunction, np.ndarray]:
    """H(x) = x + gamma eps(x) for the adjusted F, with the eps table; checks H o H = id."""
    dom = F.dom
    eps = epsilon_table(F, params.alpha, params.beta)
    xs = dom.all_ranks()
    shift = dom.scale_by(np.full(dom.q, params.gamma.rank, dtype=np.int64), eps)
    H = VectorialFunction(dom, dom, dom.add(xs, shift))
    if not np.array_equal(H.table[H.table], xs):
        raise InvolutionError("H o H is not the identity")
    return H, eps


# ---------------------------------------------------------------------------
# Hypotheses guaranteeing EA-inequivalence.


@dataclass(frozen=True)
class HypothesisReport:
    holds: bool
    linearity_sq: int
    delta: int
    checks: dict


def ea_hypotheses(F0: VectorialFunction, jobs: int | None = None) -> HypothesisReport:
    """Conditions on F_0 under which F o H is EA-inequivalent to F_0 by degree.

    p = 2: nonlinearity > 0 and Delta <= 2^(n-3).  p odd:
    |W|^2 <= p^(2n-2) and 1 < Delta <= p^(n-3).  For (n,m)-functions
    additionally p^(n-m) < Delta.
    """
    p, n, m = F0.p, F0.n, F0.m
    lin = invariants.linearity(F0)
    delta = invariants.differential_uniformity(F0)
    checks: dict[str, bool] = {}
    if p == 2:
        checks["nonlinearity_positive"] = lin.linearity_sq < 4**n
        checks["delta_bound"] = delta <= 2 ** (n - 3)
    else:
        checks["walsh_bound"] = lin.linearity_sq <= p ** (2 * n - 2)
        checks["delta_bound"] = 1 < delta <= p ** (n - 3)
    if not F0.is_square:
        checks["delta_lower"] = p ** (n - m) < delta
    return HypothesisReport(all(checks.values()), lin.linearity_sq, delta, checks)


# ---------------------------------------------------------------------------
# The construction.


@dataclass(eq=False)
class ConstructionResult:
    F0: VectorialFunction
    F: VectorialFunction
    params: ConstructionParams
    H: VectorialFunction
    epsilon: np.ndarray
    FH: VectorialFunction
    closed_form: VectorialFunction
    fdo_gamma: FieldElement
    degree_F0: int
    degree: int
    hypotheses: HypothesisReport | None
    witness_ok: bool
    graph_map: GraphMap
    extras: dict = field(default_factory=dict)

    @property
    def expected_degree(self) -> int:
        """3 for p = 2; for odd p, 3 when F_DO(gamma) = 0 and 4 otherwise."""
        if self.F.p == 2:
            return 3
        return 3 if self.fdo_gamma.rank == 0 else 4

    @property
    def ea_by_degree(self) -> str:
        if self.degree_F0 < 2 or self.degree < 2:
            return "undetermined"
        return "inequivalent-by-degree" if self.degree != self.degree_F0 else "undetermined"

    @property
    def label(self) -> str:
        if self.hypotheses is None or not self.hypotheses.holds:
            return "CCZ-equivalent; EA-status undetermined"
        if self.ea_by_degree == "inequivalent-by-degree":
            return "CCZ-equivalent; EA-inequivalent"
        return "CCZ-equivalent; EA-status undetermined"

    def to_json(self) -> dict:
        out = {
            "params": self.params.to_json(),
            "degree_F0": self.degree_F0,
            "degree": self.degree,
            "expected_degree": self.expected_degree,
            "fdo_gamma": self.fdo_gamma.hex(),
            "involution": True,
            "closed_form_agrees": True,
            "ccz_witness": self.witness_ok,
            "ea_by_degree": self.ea_by_degree,
            "label": self.label,
        }
        if self.hypotheses is not None:
            out["hypotheses"] = {
                "holds": self.hypotheses.holds,
                "linearity_sq": self.hypotheses.linearity_sq,
                "delta": self.hypotheses.delta,
                **{k: bool(v) for k, v in self.hypotheses.checks.items()},
            }
        out.update(self.extras)
        return out


def fdo_at(F: VectorialFunction, gamma: FieldElement) -> FieldElement:
    """The Dembowski-Ostrom part of F evaluated at gamma, as a codomain element."""
    do, _, _ = do_decompose(interpolate(F))
    val = do(F.dom.element(gamma))
    if F.is_square:
        return val
    return F.embedding().pull(val)


def closed_form(F: VectorialFunction, gamma: FieldElement, eps: np.ndarray, fdo: FieldElement) -> VectorialFunction:
    """F + eps D_gamma F + F_DO(gamma) (eps^2 - eps) from tables."""
    cod = F.cod
    dg = derivative(F, gamma).table
    vals = cod.add(F.table, cod.scale_by(dg, eps))
    if F.p != 2:
        e2 = (eps * eps - eps) % F.p
        vals = cod.add(vals, cod.scale_by(np.full(F.dom.q, fdo.rank, dtype=np.int64), e2))
    return VectorialFunction(F.dom, cod, vals)


def twist(
    F0: VectorialFunction,
    params: ConstructionParams,
    hypotheses: bool = True,
    jobs: int | None = None,
) -> ConstructionResult:
    """Build F o H from the unadjusted F_0 and validated parameters.

    F o H is computed by composing tables and again from the closed form;
    a disagreement raises ConstructionError.
    """
    if not is_quadratic(F0):
        raise DegreeError("the construction needs a quadratic function")
    check_params(F0, params)
    F = adjust(F0, params.c)
    H, eps = build_involution(F, params)
    FH = compose(F, H)
    fdo = fdo_at(F, params.gamma)
    closed = closed_form(F, params.gamma, eps, fdo)
    if FH != closed:
        raise ConstructionError(f"closed form disagrees with composition at {FH.mismatches(closed)} points")
    gm = params.graph_map()
    if not graph_map_is_permutation(gm):
        raise InvalidParamsError("trace_alpha_gamma", "graph map is not a permutation")
    witness = verify_ccz_witness(F, FH, gm)
    hyp = ea_hypotheses(F0, jobs) if hypotheses else None
    return ConstructionResult(
        F0=F0,
        F=F,
        params=params,
        H=H,
        epsilon=eps,
        FH=FH,
        closed_form=closed,
        fdo_gamma=fdo,
        degree_F0=degree_of(F0),
        degree=degree_of(FH),
        hypotheses=hyp,
        witness_ok=witness,
        graph_map=gm,
    )


def twist_nm(F0: VectorialFunction, params: ConstructionParams, hypotheses: bool = True) -> ConstructionResult:
    """The (n,m) variant: beta in F_{p^m}, c x replaced by Tr^n_m(c x)."""
    if F0.is_square:
        raise ValueError("twist_nm expects a proper (n,m)-function")
    return twist(F0, params, hypotheses)


def twist_via_trace(
    F0: VectorialFunction, params: ConstructionParams, m: int, hypotheses: bool = True
) -> ConstructionResult:
    """Project an (n,n) construction to (n,m): F' = Tr^n_m(beta F) with beta' = 1 and c' = 0.

    The involution is unchanged, so F' o H = Tr^n_m(beta (F o H)) pointwise.
    """
    if not F0.is_square:
        raise ValueError("twist_via_trace expects an (n,n)-function")
    check_params(F0, params)
    dom = F0.dom
    small = get_field(dom.p, m)
    F = adjust(F0, params.c)
    scaled = dom.mul(F.table, params.beta.rank)
    Fp = VectorialFunction(dom, small, embedding(small, dom).restrict(dom.rel_trace(scaled, m)))
    p2 = ConstructionParams(params.alpha, small.one, params.gamma, dom.zero, params.strategy)
    return twist(Fp, p2, hypotheses)


# ---------------------------------------------------------------------------
# Derivative identities behind the degree count.


def _d(vals: np.ndarray, ctx: FieldCtx, a: FieldElement, fp: bool = False, p: int = 2) -> np.ndarray:
    shifted = vals[ctx.add(ctx.all_ranks(), ctx.element(a).rank)]
    if fp:
        return (shifted - vals) % p
    return ctx.sub(shifted, vals)


def derive_lemma_identities(
    F: VectorialFunction,
    beta: FieldElement,
    gamma: FieldElement,
    g1: FieldElement,
    g2: FieldElement,
    g3: FieldElement,
) -> dict[str, int | None]:
    """Count the points where the two derivative identities fail (both should be 0).

    cubic: F_3 = Tr(beta F) D_gamma F satisfies
      D_g3 D_g2 D_g1 F_3 = Tr(beta L_g2(g3)) L_gamma(g1) + Tr(beta L_g1(g3)) L_gamma(g2)
                           + Tr(beta L_g1(g2)) L_gamma(g3).
    quartic (odd p): F_4 = Tr(beta F)^2 satisfies
      D_g3 D_g2 D_g1 D_gamma F_4 / 2 = Tr(beta L_g2(g3)) Tr(beta L_gamma(g1))
                                       + Tr(beta L_g1(g3)) Tr(beta L_gamma(g2))
                                       + Tr(beta L_g1(g2)) Tr(beta L_gamma(g3)).
    """
    dom, cod, p = F.dom, F.cod, F.p
    beta = cod.element(beta)
    gs = [dom.element(g) for g in (gamma, g1, g2, g3)]
    comp = F.component(beta)

    def L(a: FieldElement, b: FieldElement) -> FieldElement:
        return cod.element(int(lmap_table(F, a)[b.rank])) if a.rank else cod.zero

    def tb(v: FieldElement) -> int:
        return (beta * v).trace()

    gamma, g1, g2, g3 = gs
    dF = derivative(F, gamma).table
    f3 = cod.scale_by(dF, comp)
    lhs3 = f3
    for a in (g1, g2, g3):
        lhs3 = _d(lhs3, dom, a)
    rhs3 = cod.zero
    for (u, v), w in (((g2, g3), g1), ((g1, g3), g2), ((g1, g2), g3)):
        rhs3 = rhs3 + cod.constant(tb(L(u, v))) * L(gamma, w)
    out: dict[str, int | None] = {"cubic": int(np.count_nonzero(lhs3 != rhs3.rank))}
    if p == 2:
        out["quartic"] = None
        return out
    f4 = (comp * comp) % p
    lhs4 = f4
    for a in (gamma, g1, g2, g3):
        lhs4 = _d(lhs4, dom, a, fp=True, p=p)
    lhs4 = (lhs4 * pow(2, -1, p)) % p
    rhs4 = 0
    for (u, v), w in (((g2, g3), g1), ((g1, g3), g2), ((g1, g2), g3)):
        rhs4 += tb(L(u, v)) * tb(L(gamma, w))
    out["quartic"] = int(np.count_nonzero(lhs4 != rhs4 % p))
    return out


# ---------------------------------------------------------------------------
# Counting valid tuples.


@dataclass
class TupleEnumeration:
    """All valid (alpha, beta, gamma, c) for a fixed F_0.

    For each structure pair the alpha and c solutions are affine hyperplanes,
    so ``count`` is p^(2n-2) times the number of pairs.
    """

    F0: VectorialFunction
    pairs: list[tuple[FieldElement, FieldElement]]

    @property
    def count(self) -> int:
        return len(self.pairs) * self.F0.p ** (2 * self.F0.n - 2)

    def __iter__(self) -> Iterator[ConstructionParams]:
        F0, _dom, cod, p = self.F0, self.F0.dom, self.F0.cod, self.F0.p
        for gamma, beta in self.pairs:
            alphas = solve_trace_affine((-2) % p, gamma)
            dval = cod.element(_d_gamma_at_zero(F0, gamma))
            cs = solve_trace_affine((-(beta * dval).trace()) % p, _beta_in_dom(F0, beta) * gamma)
            for a in alphas:
                for c in cs:
                    yield ConstructionParams(a, beta, gamma, c)


def enumerate_valid_tuples(F0: VectorialFunction, jobs: int | None = None) -> TupleEnumeration:
    """Every structure pair of F_0, plus a lazy iterator over the full tuples."""
    if not is_quadratic(F0):
        raise DegreeError("the construction needs a quadratic function")
    return TupleEnumeration(F0, list(structure_pairs(F0, jobs)))


__all__ = [
    "ConstructionError",
    "ConstructionParams",
    "ConstructionResult",
    "HypothesisReport",
    "InvalidParamsError",
    "InvolutionError",
    "STRATEGIES",
    "TupleEnumeration",
    "adjust",
    "build_involution",
    "check_params",
    "closed_form",
    "complete_params",
    "derive_lemma_identities",
    "ea_distinguish",
    "ea_hypotheses",
    "enumerate_valid_tuples",
    "epsilon_table",
    "fdo_at",
    "recipe_alpha",
    "recipe_beta",
    "twist",
    "twist_nm",
    "twist_via_trace",
]
