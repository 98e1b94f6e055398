"""Graph maps, CCZ witnesses and cheap EA-inequivalence certificates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gfield import FieldCtx, FieldElement
from .vfunc import VectorialFunction, algebraic_degree, component_degree, degree_of, interpolate

# Brute-force injectivity checks are run when the graph has at most this many points.
BRUTE_GRAPH_LIMIT = 1 << 16


@dataclass(frozen=True)
class GraphMap:
    """(x, y) -> (x + gamma (Tr(alpha x) + Tr(beta y)), y) on F_{p^n} x F_{p^m}.

    ``alpha`` and ``gamma`` live in the domain field, ``beta`` in the codomain
    field (which equals the domain for (n,n)-functions).
    """

    alpha: FieldElement
    beta: FieldElement
    gamma: FieldElement

    @property
    def dom(self) -> FieldCtx:
        return self.gamma.ctx

    @property
    def cod(self) -> FieldCtx:
        return self.beta.ctx

    def epsilon(self, xs, ys) -> np.ndarray:
        dom, cod = self.dom, self.cod
        ta = dom.trace(dom.mul(xs, self.alpha.rank))
        tb = cod.trace(cod.mul(ys, self.beta.rank))
        return (ta + tb) % dom.p

    def apply(self, xs, ys) -> tuple[np.ndarray, np.ndarray]:
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        eps = self.epsilon(xs, ys)
        shift = self.dom.scale_by(np.full(eps.shape, self.gamma.rank, dtype=np.int64), eps)
        return self.dom.add(xs, shift), ys

    def __call__(self, x: FieldElement, y: FieldElement) -> tuple[FieldElement, FieldElement]:
        a, b = self.apply(self.dom.element(x).rank, self.cod.element(y).rank)
        return self.dom.element(int(a)), self.cod.element(int(b))

    def trace_criterion(self) -> bool:
        """Permutation test: Tr(alpha * gamma) != -1."""
        p = self.dom.p
        return (self.alpha * self.gamma).trace() != p - 1


def graph_map_is_permutation(gm: GraphMap, brute: bool | None = None) -> bool:
    """Whether ``gm`` is a bijection of F_{p^n} x F_{p^m}.

    The answer comes from the trace criterion.  On small fields (or with
    ``brute=True``) every point is also mapped and the image is counted; a
    disagreement raises ``AssertionError``.
    """
    ok = gm.trace_criterion()
    size = gm.dom.q * gm.cod.q
    if brute is None:
        brute = size <= BRUTE_GRAPH_LIMIT
    if brute:
        xs, ys = np.divmod(np.arange(size, dtype=np.int64), gm.cod.q)
        a, b = gm.apply(xs, ys)
        bij = np.unique(a * gm.cod.q + b).size == size
        assert bij == ok, "trace criterion disagrees with exhaustive check"
    return ok


def _graph_keys(F: VectorialFunction) -> np.ndarray:
    return F.dom.all_ranks() * F.cod.q + F.table


def verify_ccz_witness(F: VectorialFunction, G: VectorialFunction, gm: GraphMap) -> bool:
    """True iff gm maps the graph of F onto the graph of G (compared as sorted pair lists)."""
    if F.dom != G.dom or F.cod != G.cod:
        return False
    if gm.dom != F.dom or gm.cod != F.cod:
        raise ValueError("graph map lives on different fields than the functions")
    if not gm.trace_criterion():
        raise ValueError("graph map is not a permutation")
    a, b = gm.apply(F.dom.all_ranks(), F.table)
    mapped = np.sort(a * F.cod.q + b)
    return bool(np.array_equal(mapped, np.sort(_graph_keys(G))))


def ea_distinguish(F: VectorialFunction, G: VectorialFunction) -> str:
    """'inequivalent-by-degree' when the algebraic degrees differ, else 'undetermined'.

    Degree is an EA invariant only for degree >= 2, so lower degrees raise.
    """
    dF, dG = degree_of(F), degree_of(G)
    if dF < 2 or dG < 2:
        raise ValueError(f"EA comparison by degree needs degree >= 2 (got {dF} and {dG})")
    return "inequivalent-by-degree" if dF != dG else "undetermined"


@dataclass(frozen=True)
class ExclusionResult:
    """Outcome of the power-function test: a component whose degree proves exclusion."""

    excluded: bool
    c: FieldElement | None
    component_degree: int | None
    degree: int


def power_function_exclusion(F: VectorialFunction, hint: FieldElement | None = None) -> ExclusionResult:
    """Search c != 0 with deg Tr(cF) not in {0, 1, deg F}.

    A function EA-equivalent to a power map has every nonzero component of
    degree 0, 1 or deg F (degree is preserved by x -> ax scaling), so such a
    c excludes the whole EA class.  ``hint`` is tried first, then c in rank
    order.  Component degrees use the reduced multivariate form; the reported
    witness is re-checked by interpolating its lifted component.
    """
    deg = degree_of(F)
    cod = F.cod
    order = list(range(1, cod.q))
    if hint is not None:
        h = cod.element(hint).rank
        if h:
            order.remove(h)
            order.insert(0, h)
    for c in order:
        vals = F.component(cod.element(c))
        d = component_degree(vals, F.dom)
        if d not in (0, 1, deg):
            lifted = VectorialFunction(F.dom, F.dom, vals)
            d2 = algebraic_degree(interpolate(lifted))
            assert d2 == d, "component degree mismatch between methods"
            return ExclusionResult(True, cod.element(c), d, deg)
    return ExclusionResult(False, None, None, deg)
