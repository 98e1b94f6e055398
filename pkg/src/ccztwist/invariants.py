"""Walsh spectra, difference tables and linearity, all computed exactly.

For odd p a Walsh coefficient is an element of Z[xi_p]; it is carried as the
vector of residue counts (c_0, ..., c_{p-1}) meaning sum c_j xi^j, modulo the
all-ones vector.  No floating point enters any decision.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from ._parallel import chunked, pmap
from .gfield import FieldCtx, FieldElement
from .vfunc import VectorialFunction


# ---------------------------------------------------------------------------
# Cyclotomic integers.


class CyclotomicInt:
    """Exact element of Z[xi_p] in canonical form (minimum coordinate 0)."""

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable[int]):
        c = [int(v) for v in coords]
        if len(c) < 2:
            raise ValueError("need at least two coordinates")
        lo = min(c)
        self.coords = tuple(v - lo for v in c)

    @classmethod
    def from_int(cls, k: int, p: int) -> "CyclotomicInt":
        return cls([k] + [0] * (p - 1))

    @property
    def p(self) -> int:
        return len(self.coords)

    def is_rational(self) -> bool:
        return len(set(self.coords[1:])) == 1

    def to_int(self) -> int:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not a rational integer")
        return self.coords[0] - self.coords[1]

    def conj(self) -> "CyclotomicInt":
        p = self.p
        return CyclotomicInt(self.coords[(-j) % p] for j in range(p))

    def _check(self, other: "CyclotomicInt") -> None:
        if other.p != self.p:
            raise ValueError("cyclotomic integers of different orders")

    def __add__(self, other: "CyclotomicInt") -> "CyclotomicInt":
        self._check(other)
        return CyclotomicInt(a + b for a, b in zip(self.coords, other.coords))

    def __neg__(self) -> "CyclotomicInt":
        return CyclotomicInt(-a for a in self.coords)

    def __sub__(self, other: "CyclotomicInt") -> "CyclotomicInt":
        return self + (-other)

    def __mul__(self, other: "CyclotomicInt") -> "CyclotomicInt":
        self._check(other)
        p = self.p
        out = [0] * p
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    out[(i + j) % p] += a * b
        return CyclotomicInt(out)

    def norm_sq(self) -> "CyclotomicInt":
        """|z|^2 = z * conj(z)."""
        return self * self.conj()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CyclotomicInt) and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __repr__(self) -> str:
        if self.is_rational():
            return f"CyclotomicInt({self.to_int()})"
        return f"CyclotomicInt({list(self.coords)})"

    def to_complex(self) -> complex:
        """Floating-point value; for display and sanity checks only."""
        p = self.p
        return complex(sum(c * np.exp(2j * np.pi * k / p) for k, c in enumerate(self.coords)))

    def sort_key(self) -> tuple:
        if self.is_rational():
            return (0, self.to_int(), ())
        return (1, 0, self.coords)

    def to_json(self):
        return self.to_int() if self.is_rational() else list(self.coords)


def _square_counts(counts: np.ndarray) -> np.ndarray:
    """Row-wise |sum_j c_j xi^j|^2 as canonical coordinate vectors."""
    p = counts.shape[-1]
    d = np.empty_like(counts)
    for t in range(p):
        # coefficient of xi^t is sum_j c_j c_{j-t}
        d[..., t] = (counts * np.roll(counts, t, axis=-1)).sum(axis=-1)
    return d - d.min(axis=-1, keepdims=True)


# ---------------------------------------------------------------------------
# Walsh transform.


def dual_map(ctx: FieldCtx) -> np.ndarray:
    """w[a] = rank of the vector (Tr(a e_i))_i, so that Tr(a x) = <w[a], x>."""
    return ctx.from_digits(ctx.to_digits(ctx.all_ranks()) @ ctx.trace_gram() % ctx.p)


def component_counts(f_vals: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """Residue counts C[a, j] = #{x : f(x) - Tr(a x) = j} for F_p-valued f (rows indexed by a).

    Accepts a single function (shape (q,)) or a batch (shape (B, q)).
    """
    f = np.asarray(f_vals, dtype=np.int64)
    w = dual_map(ctx)
    if ctx.p == 2:
        signs = 1 - 2 * f
        hat = _kernels.fwht(signs)
        w0 = (ctx.q + hat) // 2
        counts = np.stack([w0, ctx.q - w0], axis=-1)
    else:
        counts = _kernels.group_ring_walsh(f, ctx.p, ctx.n)
    return counts[..., w, :]


def walsh_coefficient(F: VectorialFunction, a: FieldElement, b: FieldElement) -> CyclotomicInt:
    """W_F(a, b) = sum over x of xi^{Tr(b F(x) - a x)}, exactly."""
    a = F.dom.element(a)
    vals = (F.component(b) - F.dom.trace(F.dom.mul(F.dom.all_ranks(), a.rank))) % F.p
    c = np.bincount(vals, minlength=F.p)
    return CyclotomicInt(c)


def component_walsh_sq(F: VectorialFunction, b: FieldElement) -> list[CyclotomicInt]:
    """|W_F(a, b)|^2 for every a, indexed by rank."""
    sq = _square_counts(component_counts(F.component(b), F.dom))
    return [CyclotomicInt(row) for row in sq]


def component_walsh_sq_ints(f_vals: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """Squared magnitudes of an F_p-valued function's Walsh coefficients, as integers.

    Raises when a value is not a rational integer.
    """
    sq = _square_counts(component_counts(f_vals, ctx))
    if ctx.p > 2 and np.any(sq[..., 1:] != sq[..., 1:2]):
        raise ValueError("a squared Walsh magnitude is not a rational integer")
    return sq[..., 0] - sq[..., 1]


@dataclass(frozen=True)
class WalshSpectrum:
    """Multiset of |W_F(a, b)|^2 over a in the domain and b != 0, as sorted (value, count) pairs."""

    p: int
    n: int
    m: int
    entries: tuple[tuple[CyclotomicInt, int], ...]

    @property
    def total(self) -> int:
        return sum(k for _, k in self.entries)

    def is_rational(self) -> bool:
        return all(v.is_rational() for v, _ in self.entries)

    def values(self) -> list:
        return [v.to_json() for v, _ in self.entries]

    def as_dict(self) -> dict:
        return {v.to_json() if v.is_rational() else tuple(v.coords): k for v, k in self.entries}

    @property
    def linearity_sq(self) -> int:
        """Largest rational squared magnitude."""
        return max((v.to_int() for v, _ in self.entries if v.is_rational()), default=0)

    def to_json(self) -> list:
        return [[v.to_json(), k] for v, k in self.entries]


def _unique_rows(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """np.unique(a, axis=0, return_counts=True), via one packed int64 key when the ranges allow."""
    lo = a.min(axis=0)
    span = a.max(axis=0) - lo + 1
    if float(np.prod(span.astype(np.float64))) >= 2.0**62:
        return np.unique(a, axis=0, return_counts=True)
    radix = np.cumprod(np.concatenate(([1], span[:0:-1])))[::-1]
    keys, mult = np.unique((a - lo) @ radix, return_counts=True)
    rows = np.empty((keys.size, a.shape[1]), dtype=a.dtype)
    for j in range(a.shape[1]):
        rows[:, j], keys = np.divmod(keys, radix[j])
    return rows + lo, mult


def full_spectrum(F: VectorialFunction, jobs: int | None = None) -> WalshSpectrum:
    """Complete Walsh spectrum; parallel over component batches."""
    cod = F.cod
    bs = np.arange(1, cod.q, dtype=np.int64)
    batch = max(1, (1 << 22) // (F.dom.q * F.p))

    def work(chunk) -> Counter:
        comps = cod.trace(cod.mul(F.table[None, :], np.asarray(chunk)[:, None]))
        sq = _square_counts(component_counts(comps, F.dom)).reshape(-1, F.p)
        keys, mult = _unique_rows(sq)
        return Counter({tuple(int(v) for v in k): int(c) for k, c in zip(keys, mult)})

    total: Counter = Counter()
    for part in pmap(work, chunked(bs, batch), jobs):
        total.update(part)
    entries = sorted(((CyclotomicInt(k), c) for k, c in total.items()), key=lambda e: e[0].sort_key())
    return WalshSpectrum(F.p, F.n, F.m, tuple(entries))


# ---------------------------------------------------------------------------
# Differences.


@dataclass(frozen=True)
class DDT:
    """Difference distribution table of an (n, m)-function.

    ``counts`` holds Delta_F(a, b) with rows indexed by a (row 0 included) when
    it was materialised; ``spectrum`` is the multiset of Delta_F(a, b) over
    a != 0 and all b.
    """

    p: int
    n: int
    m: int
    delta: int
    spectrum: tuple[tuple[int, int], ...]
    counts: np.ndarray | None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DDT):
            return NotImplemented
        return (self.p, self.n, self.m, self.spectrum) == (other.p, other.n, other.m, other.spectrum)

    __hash__ = None  # type: ignore[assignment]

    def count(self, a: int, b: int) -> int:
        if self.counts is None:
            raise ValueError("table was not materialised")
        return int(self.counts[int(a), int(b)])

    def to_json(self) -> list:
        return [[v, k] for v, k in self.spectrum]


def ddt(F: VectorialFunction, quadratic: bool = False, keep: bool | None = None, jobs: int | None = None) -> DDT:
    """All counts Delta_F(a, b), one pass over x per a.

    With ``quadratic=True`` and p = 2 every count is additionally checked to
    be even.  ``keep`` controls whether the full table is retained (default:
    when it has at most 2^24 cells).
    """
    q, qc = F.dom.q, F.cod.q
    if keep is None:
        keep = q * qc <= (1 << 24)
    rows = np.arange(1, q, dtype=np.int64)
    batch = max(1, (1 << 22) // max(q, qc))

    def work(chunk):
        block = _kernels.ddt_rows(F.table, F.p, F.n, F.m, np.asarray(chunk, dtype=np.int64))
        return block

    blocks = pmap(work, chunked(rows, batch), jobs)
    spec: Counter = Counter()
    for blk in blocks:
        if np.any(blk.sum(axis=1) != q):
            raise AssertionError("a DDT row does not sum to p^n")
        if quadratic and F.p == 2 and np.any(blk % 2):
            raise AssertionError("odd DDT entry for a quadratic binary function")
        vals, mult = np.unique(blk, return_counts=True)
        spec.update({int(v): int(k) for v, k in zip(vals, mult)})
    counts = None
    if keep:
        counts = np.zeros((q, qc), dtype=np.int32)
        counts[0, 0] = q
        if blocks:
            counts[1:] = np.concatenate(blocks, axis=0)
        counts.setflags(write=False)
    delta = max((v for v in spec), default=0)
    return DDT(F.p, F.n, F.m, delta, tuple(sorted(spec.items())), counts)


def differential_uniformity(F: VectorialFunction) -> int:
    return ddt(F, keep=False).delta


# ---------------------------------------------------------------------------
# Linearity.


@dataclass(frozen=True)
class Linearity:
    linearity_sq: int
    nonlinearity: int | None
    non_rational: tuple[CyclotomicInt, ...]

    @property
    def rational(self) -> bool:
        return not self.non_rational


def linearity(F: VectorialFunction, spectrum: WalshSpectrum | None = None) -> Linearity:
    """|W_F|^2 and, for p = 2 when |W_F| is an integer, NL(F) = 2^(n-1) - |W_F|/2."""
    spec = spectrum or full_spectrum(F)
    lin = spec.linearity_sq
    irr = tuple(v for v, _ in spec.entries if not v.is_rational())
    nl = None
    if F.p == 2:
        root = int(np.sqrt(lin))
        while root * root > lin:
            root -= 1
        while (root + 1) ** 2 <= lin:
            root += 1
        if root * root == lin:
            nl = 2 ** (F.n - 1) - root // 2
    return Linearity(lin, nl, irr)


def report(F: VectorialFunction, jobs: int | None = None) -> dict:
    """Invariant report with a stable key order."""
    spec = full_spectrum(F, jobs=jobs)
    d = ddt(F, keep=False, jobs=jobs)
    return {
        "linearity_sq": spec.linearity_sq,
        "delta": d.delta,
        "walsh_spectrum": spec.to_json(),
        "diff_spectrum": d.to_json(),
    }


def report_json(F: VectorialFunction, jobs: int | None = None) -> str:
    return json.dumps(report(F, jobs=jobs))


def parseval_ok(f_vals: np.ndarray, ctx: FieldCtx) -> bool:
    """Sum over a of |W_f(a)|^2 equals p^(2n)."""
    sq = _square_counts(component_counts(f_vals, ctx))
    tot = sq.sum(axis=0)
    return bool(tot[0] - tot[1] == ctx.q**2 and np.all(tot[1:] == tot[1]))


def same_invariants(F: VectorialFunction, G: VectorialFunction, jobs: int | None = None) -> tuple[bool, bool]:
    """(Walsh spectra equal, differential spectra equal)."""
    return (
        full_spectrum(F, jobs) == full_spectrum(G, jobs),
        ddt(F, keep=False, jobs=jobs) == ddt(G, keep=False, jobs=jobs),
    )


def spectrum_from_pairs(p: int, n: int, m: int, pairs: Sequence[tuple]) -> WalshSpectrum:
    ents = []
    for v, k in pairs:
        c = CyclotomicInt.from_int(v, p) if isinstance(v, int) else CyclotomicInt(v)
        ents.append((c, int(k)))
    ents.sort(key=lambda e: e[0].sort_key())
    return WalshSpectrum(p, n, m, tuple(ents))
