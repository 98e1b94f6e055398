"""Linear structures of component functions of quadratic maps.

For a quadratic F the map L_gamma(x) = F(x+gamma) - F(x) - F(gamma) + F(0) is
F_p-linear in x and symmetric in (gamma, x).  A pair (gamma, beta) with
Tr(beta L_gamma(x)) = 0 for all x makes gamma a linear structure of the
component Tr(beta F).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

import numpy as np

from . import fplinalg
from ._parallel import pmap
from .gfield import FieldCtx, FieldElement
from .vfunc import DegreeError, UnivariatePoly, VectorialFunction, interpolate, is_quadratic


@dataclass(frozen=True, eq=False)
class LinearMapMatrix:
    """An F_p-linear map between fields in power-basis coordinates.

    Column j holds the coordinates of the image of the j-th basis vector.
    """

    dom: FieldCtx
    cod: FieldCtx
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.int64) % self.dom.p
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @cached_property
    def rank(self) -> int:
        return fplinalg.rank(self.matrix, self.dom.p)

    @property
    def nullity(self) -> int:
        return self.dom.n - self.rank

    @cached_property
    def kernel_basis(self) -> list[FieldElement]:
        ns = fplinalg.nullspace(self.matrix, self.dom.p)
        return [self.dom.element(int(r)) for r in self.dom.from_digits(ns)] if len(ns) else []

    @cached_property
    def image_basis(self) -> list[FieldElement]:
        rs = fplinalg.row_space(self.matrix.T, self.dom.p)
        return [self.cod.element(int(r)) for r in self.cod.from_digits(rs)] if len(rs) else []

    def apply(self, ranks) -> np.ndarray:
        return self.cod.from_digits(self.dom.to_digits(ranks) @ self.matrix.T)

    def __call__(self, x: FieldElement) -> FieldElement:
        return self.cod.element(int(self.apply(self.dom.element(x).rank)))


def lmap_table(F: VectorialFunction, gamma: FieldElement) -> np.ndarray:
    """Values of L_gamma(x) for every x."""
    gamma = F.dom.element(gamma)
    cod = F.cod
    shifted = F.table[F.dom.add(F.dom.all_ranks(), gamma.rank)]
    const = int(cod.sub(F.table[gamma.rank], F.table[0]))
    return cod.sub(cod.sub(shifted, F.table), const)


def lmap_of(F: VectorialFunction, gamma: FieldElement) -> LinearMapMatrix:
    """L_gamma as a matrix, after checking on every x that it really is linear."""
    gamma = F.dom.element(gamma)
    if gamma.rank == 0:
        raise ValueError("gamma must be nonzero")
    vals = lmap_table(F, gamma)
    cols = [F.cod.digits(int(vals[F.p**j])) for j in range(F.n)]
    lm = LinearMapMatrix(F.dom, F.cod, np.array(cols, dtype=np.int64).T)
    if not np.array_equal(lm.apply(F.dom.all_ranks()), vals):
        raise DegreeError("L_gamma is not linear; the function is not quadratic")
    return lm


def annihilators_of_image(M: LinearMapMatrix) -> list[FieldElement]:
    """Basis of {beta : Tr(beta * L(x)) = 0 for every x}.

    With T the trace Gram matrix of the codomain this is the null space of
    M^T T.
    """
    cod = M.cod
    pairing = (M.matrix.T @ cod.trace_gram()) % cod.p
    ns = fplinalg.nullspace(pairing, cod.p)
    return [cod.element(int(r)) for r in cod.from_digits(ns)] if len(ns) else []


def span_ranks(basis: list[FieldElement], ctx: FieldCtx) -> np.ndarray:
    """Ranks of every F_p-combination of ``basis``, ascending."""
    if not basis:
        return np.zeros(1, dtype=np.int64)
    digs = np.array([b.coeffs for b in basis], dtype=np.int64)
    return np.sort(ctx.from_digits(fplinalg.span(digs, ctx.p)))


@dataclass(frozen=True)
class LinearKernel:
    """The linear kernel of Tr(beta F): all its linear structures."""

    beta: FieldElement
    basis: tuple[FieldElement, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def ranks(self) -> np.ndarray:
        return span_ranks(list(self.basis), self.basis[0].ctx) if self.basis else np.zeros(1, dtype=np.int64)


def _bilinear_columns(F: VectorialFunction) -> np.ndarray:
    """L_{e_k}(e_j) for all basis pairs, shape (n, n) of codomain ranks."""
    dom, cod = F.dom, F.cod
    basis = [dom.p**i for i in range(dom.n)]
    out = np.zeros((dom.n, dom.n), dtype=np.int64)
    f0 = int(F.table[0])
    for k, ek in enumerate(basis):
        for j, ej in enumerate(basis):
            s = int(F.table[int(dom.add(ek, ej))])
            v = cod.sub(cod.sub(s, int(F.table[ej])), cod.sub(int(F.table[ek]), f0))
            out[k, j] = int(v)
    return out


def linear_kernel(F: VectorialFunction, beta: FieldElement) -> LinearKernel:
    """Solve Tr(beta L_gamma(e_j)) = 0 for all j simultaneously in gamma."""
    beta = F.cod.element(beta)
    if beta.rank == 0:
        raise ValueError("beta must be nonzero")
    if not is_quadratic(F):
        raise DegreeError("linear kernels are computed for quadratic functions only")
    cols = _bilinear_columns(F)
    # B[j, k] = Tr(beta L_{e_k}(e_j)) is linear in the coordinates of gamma.
    B = F.cod.trace(F.cod.mul(cols.T, beta.rank))
    ns = fplinalg.nullspace(B, F.p)
    basis = tuple(F.dom.element(int(r)) for r in F.dom.from_digits(ns)) if len(ns) else ()
    return LinearKernel(beta, basis)


def is_linear_structure(beta: FieldElement, F: VectorialFunction, gamma: FieldElement) -> int | None:
    """The constant b with Tr(beta F(x+gamma)) - Tr(beta F(x)) = b for all x, or None."""
    comp = F.component(beta)
    gamma = F.dom.element(gamma)
    diff = (comp[F.dom.add(F.dom.all_ranks(), gamma.rank)] - comp) % F.p
    return int(diff[0]) if np.all(diff == diff[0]) else None


def is_partially_bent(f_vals: np.ndarray, ctx: FieldCtx) -> bool:
    """Every derivative of the F_p-valued f is constant or balanced."""
    xs = ctx.all_ranks()
    f = np.asarray(f_vals, dtype=np.int64)
    target = ctx.q // ctx.p
    for a in range(1, ctx.q):
        d = (f[ctx.add(xs, a)] - f) % ctx.p
        if np.all(d == d[0]):
            continue
        if np.any(np.bincount(d, minlength=ctx.p) != target):
            return False
    return True


def _betas_for(F: VectorialFunction, gamma: int) -> np.ndarray:
    ann = annihilators_of_image(lmap_of(F, F.dom.element(gamma)))
    if not ann:
        return np.zeros(0, dtype=np.int64)
    r = span_ranks(ann, F.cod)
    return r[r != 0]


def find_structure_pair(F0: VectorialFunction) -> tuple[FieldElement, FieldElement] | None:
    """First (gamma, beta) in rank order with Tr(beta L_gamma) = 0, or None."""
    if not is_quadratic(F0):
        raise DegreeError("structure pairs are searched for quadratic functions only")
    for g in range(1, F0.dom.q):
        betas = _betas_for(F0, g)
        if betas.size:
            return F0.dom.element(g), F0.cod.element(int(betas[0]))
    return None


def structure_pairs(F0: VectorialFunction, jobs: int | None = None) -> Iterator[tuple[FieldElement, FieldElement]]:
    """Every valid (gamma, beta) with both nonzero, ordered by gamma then beta."""
    if not is_quadratic(F0):
        raise DegreeError("structure pairs are searched for quadratic functions only")
    gammas = list(range(1, F0.dom.q))
    for g, betas in zip(gammas, pmap(lambda g: _betas_for(F0, g), gammas, jobs)):
        for b in betas:
            yield F0.dom.element(g), F0.cod.element(int(b))


def ell_polynomial(F0: VectorialFunction, gamma: FieldElement) -> UnivariatePoly:
    """The linearised polynomial whose roots are the valid beta for ``gamma`` (p = 2).

    Writing L_gamma(x) = sum a_i x^(2^i), the result is
    sum_i a_(n-i)^(2^i) x^(2^i) with indices mod n.
    """
    if F0.p != 2:
        raise ValueError("the annihilator polynomial is defined for binary fields")
    if not F0.is_square:
        raise ValueError("the annihilator polynomial is defined for (n,n)-functions")
    lm = lmap_of(F0, gamma)
    ctx = F0.dom
    poly = interpolate(VectorialFunction(ctx, ctx, lm.apply(ctx.all_ranks())))
    n = ctx.n
    coeffs = {}
    for e, c in poly.terms.items():
        if e & (e - 1):
            raise DegreeError(f"L_gamma has a non-linearised exponent {e}")
        coeffs[e.bit_length() - 1] = c
    out = {}
    for i in range(n):
        a = coeffs.get((n - i) % n)
        if a is not None:
            out[1 << i] = a ** (1 << i)
    return UnivariatePoly(ctx, out)
