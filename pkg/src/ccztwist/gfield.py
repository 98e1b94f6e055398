"""Arithmetic in finite fields F_{p^n} given by a power basis.

An element is identified by its *rank* ``sum(c_i * p**i)``, where ``c_i`` are
its coordinates with respect to ``1, x, ..., x^(n-1)`` modulo the field's
irreducible modulus.  Ranks double as the canonical total order used for
every "first valid" choice in the package.

Scalar work goes through :class:`FieldElement`; bulk work goes through the
vectorised methods of :class:`FieldCtx`, which accept and return int64 rank
arrays.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import _kernels
from ._moduli import DEFAULT_MODULI

TABLE_LIMIT = 1 << 20
SIZE_LIMIT = 1 << 24


class FieldMismatchError(ValueError):
    """Raised when elements of different fields are combined."""


class ParseError(ValueError):
    """A malformed field-spec or polynomial string; ``column`` is 1-based."""

    def __init__(self, message: str, column: int, text: str = ""):
        self.column = column
        self.text = text
        super().__init__(f"{message} (column {column})")


# ---------------------------------------------------------------------------
# Polynomials over F_p as coefficient lists, lowest degree first.


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: Sequence[int], f: Sequence[int], p: int) -> list[int]:
    a = [x % p for x in a]
    _trim(a)
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    while len(a) - 1 >= df:
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fi in enumerate(f):
            a[shift + i] = (a[shift + i] - coef * fi) % p
        _trim(a)
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def _psub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    size = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(size)]
    return _trim(out)


def _pgcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def _ppowmod(base: Sequence[int], e: int, f: Sequence[int], p: int) -> list[int]:
    result = [1]
    b = _pmod(base, f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, b, p), f, p)
        e >>= 1
        if e:
            b = _pmod(_pmul(b, b, p), f, p)
    return result


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(p: int) -> bool:
    return p >= 2 and _prime_factors(p) == [p]


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Irreducibility of a monic polynomial over F_p (coefficients low to high).

    Checks ``x^(p^n) = x`` modulo f and ``gcd(x^(p^k) - x, f) = 1`` for each
    proper divisor k of n.
    """
    f = _trim([c % p for c in modulus])
    n = len(f) - 1
    if n < 1 or f[-1] != 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    frob = {}
    cur = x
    for k in range(1, n + 1):
        cur = _ppowmod(cur, p, f, p)
        frob[k] = cur
    if _psub(frob[n], x, p) != []:
        return False
    for k in _divisors(n):
        if k < n and len(_pgcd(f, _psub(frob[k], x, p), p)) > 1:
            return False
    return True


def search_default_modulus(p: int, n: int) -> tuple[int, ...]:
    """Smallest-rank monic irreducible of degree n over F_p."""
    for low in range(p**n):
        coeffs = [(low // p**i) % p for i in range(n)] + [1]
        if n > 1 and coeffs[0] == 0:
            continue
        if is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise ValueError(f"no irreducible polynomial of degree {n} over F_{p}")


# ---------------------------------------------------------------------------
# Field contexts.


def _digits_of(ranks: np.ndarray, p: int, n: int) -> np.ndarray:
    r = np.asarray(ranks, dtype=np.int64)
    out = np.empty(r.shape + (n,), dtype=np.int64)
    for i in range(n):
        out[..., i] = r % p
        r = r // p
    return out


class FieldCtx:
    """The field F_{p^n} = F_p[x]/(modulus).  Immutable; obtain via :func:`get_field`."""

    def __init__(self, p: int, n: int, modulus: Sequence[int] | None = None):
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if n < 1:
            raise ValueError("extension degree must be positive")
        q = p**n
        if q > SIZE_LIMIT:
            raise ValueError(f"field of size {p}^{n} exceeds the supported limit 2^24")
        if modulus is None:
            modulus = DEFAULT_MODULI.get((p, n)) or search_default_modulus(p, n)
        mod = tuple(int(c) % p for c in modulus)
        if len(mod) != n + 1 or mod[-1] != 1:
            raise ValueError(f"modulus must be monic of degree {n}")
        if not is_irreducible(mod, p):
            raise ValueError(f"{format_poly_fp(mod)} is reducible over F_{p}")
        self.p = p
        self.n = n
        self.q = q
        self.modulus = mod
        self.pw = p ** np.arange(n, dtype=np.int64)
        self._mod_arr = np.array(mod, dtype=np.int64)
        self._frob_cache: dict[int, np.ndarray] = {}
        self._sub_cache: dict[int, np.ndarray] = {}
        self.exp: np.ndarray | None = None
        self.log: np.ndarray | None = None
        self.generator_rank = self._find_generator()
        if q <= TABLE_LIMIT:
            gdig = np.array(self.digits(self.generator_rank), dtype=np.int64)
            exp = np.asarray(_kernels.exp_table(p, n, self._mod_arr, gdig), dtype=np.int64)
            log = np.zeros(q, dtype=np.int64)
            log[exp] = np.arange(q - 1, dtype=np.int64)
            self.exp, self.log = exp, log
        for arr in (self.exp, self.log):
            if arr is not None:
                arr.setflags(write=False)
        self._trace_vec = self._compute_trace_vector()

    # -- identity -------------------------------------------------------
    def __repr__(self) -> str:
        return f"FieldCtx({self.spec()})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldCtx) and (self.p, self.n, self.modulus) == (
            other.p,
            other.n,
            other.modulus,
        )

    def __hash__(self) -> int:
        return hash((self.p, self.n, self.modulus))

    def spec(self) -> str:
        return f"p={self.p},n={self.n},mod={format_poly_fp(self.modulus)}"

    # -- scalar helpers -------------------------------------------------
    def digits(self, rank: int) -> list[int]:
        return [(rank // self.p**i) % self.p for i in range(self.n)]

    def rank_of(self, digits: Iterable[int]) -> int:
        return sum((int(c) % self.p) * self.p**i for i, c in enumerate(digits))

    def _smul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.log is not None:
            return int(self.exp[(self.log[a] + self.log[b]) % (self.q - 1)])
        prod = _pmod(_pmul(self.digits(a), self.digits(b), self.p), self.modulus, self.p)
        return self.rank_of(prod)

    def _spow(self, a: int, e: int) -> int:
        if e < 0:
            if a == 0:
                raise ZeroDivisionError("0 raised to a negative power")
            e %= self.q - 1
        if a == 0:
            return 1 if e == 0 else 0
        if self.log is not None:
            return int(self.exp[(int(self.log[a]) * e) % (self.q - 1)])
        result, base = 1, a
        while e:
            if e & 1:
                result = self._smul(result, base)
            e >>= 1
            if e:
                base = self._smul(base, base)
        return result

    def _find_generator(self) -> int:
        if self.q == 2:
            return 1
        order = self.q - 1
        factors = _prime_factors(order)
        for cand in range(2, self.q):
            if all(self._spow(cand, order // ell) != 1 for ell in factors):
                return cand
        raise AssertionError("multiplicative group has no generator")

    # -- element construction ------------------------------------------
    def __call__(self, value: int | Sequence[int] | "FieldElement") -> "FieldElement":
        return self.element(value)

    def element(self, value) -> "FieldElement":
        """Build an element from a rank, a coordinate list or another element."""
        if isinstance(value, FieldElement):
            if value.ctx != self:
                raise FieldMismatchError(f"{value!r} does not belong to {self!r}")
            return value
        if isinstance(value, (int, np.integer)):
            r = int(value)
            if not 0 <= r < self.q:
                raise ValueError(f"rank {r} out of range for a field of size {self.q}")
            return FieldElement(self, r)
        return FieldElement(self, self.rank_of(value))

    def constant(self, k: int) -> "FieldElement":
        """The prime-field element k mod p."""
        return FieldElement(self, int(k) % self.p)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    @property
    def gen(self) -> "FieldElement":
        """The smallest-rank primitive element."""
        return FieldElement(self, self.generator_rank)

    @property
    def x(self) -> "FieldElement":
        """The class of x, i.e. the root of the modulus."""
        if self.n == 1:
            return FieldElement(self, int(-self.modulus[0]) % self.p)
        return FieldElement(self, self.p)

    def elements(self) -> Iterator["FieldElement"]:
        for r in range(self.q):
            yield FieldElement(self, r)

    def all_ranks(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def log_of(self, a: "FieldElement | int") -> int:
        """Discrete logarithm to the base :attr:`gen`."""
        r = a.rank if isinstance(a, FieldElement) else int(a)
        if r == 0:
            raise ValueError("log of zero")
        if self.log is not None:
            return int(self.log[r])
        cur = 1
        for k in range(self.q - 1):
            if cur == r:
                return k
            cur = self._smul(cur, self.generator_rank)
        raise AssertionError("element not in the cyclic group")

    # -- vectorised arithmetic -------------------------------------------
    def to_digits(self, ranks) -> np.ndarray:
        return _digits_of(ranks, self.p, self.n)

    def from_digits(self, digits: np.ndarray) -> np.ndarray:
        return (np.asarray(digits, dtype=np.int64) % self.p) @ self.pw

    def add(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return np.bitwise_xor(a, b)
        return self.from_digits(self.to_digits(a) + self.to_digits(b))

    def sub(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return np.bitwise_xor(a, b)
        return self.from_digits(self.to_digits(a) - self.to_digits(b))

    def neg(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a.copy()
        return self.from_digits(-self.to_digits(a))

    def scale(self, a, k: int) -> np.ndarray:
        """Multiply by the prime-field constant k."""
        k %= self.p
        a = np.asarray(a, dtype=np.int64)
        if k == 1:
            return a.copy()
        if k == 0:
            return np.zeros_like(a)
        return self.from_digits(self.to_digits(a) * k)

    def scale_by(self, a, ks) -> np.ndarray:
        """Multiply each a[i] by the prime-field integer ks[i] (broadcasting)."""
        a = np.asarray(a, dtype=np.int64)
        ks = np.asarray(ks, dtype=np.int64) % self.p
        if self.p == 2:
            return np.where(ks == 1, a, 0)
        return self.from_digits(self.to_digits(a) * ks[..., None])

    def mul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        if self.log is not None:
            idx = (self.log[a] + self.log[b]) % (self.q - 1)
            return np.where((a == 0) | (b == 0), 0, self.exp[idx])
        return self._mul_digits(a, b)

    def _mul_digits(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        n, p = self.n, self.p
        da = self.to_digits(a)
        db = self.to_digits(b)
        prod = np.zeros(a.shape + (2 * n - 1,), dtype=np.int64)
        for i in range(n):
            prod[..., i : i + n] += da[..., i : i + 1] * db
        prod %= p
        for k in range(2 * n - 2, n - 1, -1):
            top = prod[..., k : k + 1]
            prod[..., k - n : k] = (prod[..., k - n : k] - top * self._mod_arr[:n]) % p
        return self.from_digits(prod[..., :n])

    def power(self, a, e: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.log is not None:
            if e < 0:
                if np.any(a == 0):
                    raise ZeroDivisionError("0 raised to a negative power")
                e %= self.q - 1
            if e == 0:
                return np.ones_like(a)
            idx = (self.log[a] * (e % (self.q - 1))) % (self.q - 1)
            return np.where(a == 0, 0, self.exp[idx])
        if e < 0:
            return self.power(self.inv(a), -e)
        result = np.ones_like(a)
        base = a.copy()
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def inv(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        if self.log is not None:
            return self.exp[(-self.log[a]) % (self.q - 1)]
        return self.power(a, self.q - 2)

    def frobenius_matrix(self, k: int = 1) -> np.ndarray:
        """Matrix M with digits(x^(p^k)) = M @ digits(x)."""
        k %= self.n
        if k not in self._frob_cache:
            if k == 0:
                m = np.eye(self.n, dtype=np.int64)
            else:
                cols = [self.digits(self._spow(self.p**i, self.p**k)) for i in range(self.n)]
                m = np.array(cols, dtype=np.int64).T
            m.setflags(write=False)
            self._frob_cache[k] = m
        return self._frob_cache[k]

    def frob(self, a, k: int = 1) -> np.ndarray:
        """a^(p^k), applied elementwise."""
        return self.from_digits(self.to_digits(a) @ self.frobenius_matrix(k).T)

    def rel_trace_matrix(self, m: int) -> np.ndarray:
        if m < 1 or self.n % m:
            raise ValueError(f"{m} does not divide {self.n}")
        if m not in self._sub_cache:
            acc = np.zeros((self.n, self.n), dtype=np.int64)
            for j in range(self.n // m):
                acc += self.frobenius_matrix(j * m)
            acc %= self.p
            acc.setflags(write=False)
            self._sub_cache[m] = acc
        return self._sub_cache[m]

    def rel_trace(self, a, m: int) -> np.ndarray:
        """Tr^n_m(a) as ranks in this field (the values lie in the subfield of size p^m)."""
        return self.from_digits(self.to_digits(a) @ self.rel_trace_matrix(m).T)

    def _compute_trace_vector(self) -> np.ndarray:
        t = np.array(self.rel_trace_matrix(1)[0], dtype=np.int64)
        t.setflags(write=False)
        return t

    @property
    def trace_vector(self) -> np.ndarray:
        """Tr(x^i) for the basis elements, so Tr(a) = trace_vector . digits(a)."""
        return self._trace_vec

    def trace(self, a) -> np.ndarray:
        """Absolute trace into F_p, returned as integers in [0, p)."""
        return (self.to_digits(a) @ self._trace_vec) % self.p

    def in_subfield(self, a, m: int) -> np.ndarray:
        if self.n % m:
            raise ValueError(f"{m} does not divide {self.n}")
        a = np.asarray(a, dtype=np.int64)
        return self.frob(a, m) == a

    def subfield_ranks(self, m: int) -> np.ndarray:
        """Sorted ranks of the subfield with p^m elements."""
        if self.n % m:
            raise ValueError(f"{m} does not divide {self.n}")
        if self.q <= TABLE_LIMIT:
            allr = self.all_ranks()
            return allr[self.in_subfield(allr, m)]
        h = self._spow(self.generator_rank, (self.q - 1) // (self.p**m - 1))
        out = [0]
        cur = 1
        for _ in range(self.p**m - 1):
            out.append(cur)
            cur = self._smul(cur, h)
        return np.array(sorted(out), dtype=np.int64)

    # -- linear algebra helpers -----------------------------------------
    def basis(self) -> list["FieldElement"]:
        return [FieldElement(self, self.p**i) for i in range(self.n)]

    def trace_gram(self) -> np.ndarray:
        """T[i, j] = Tr(e_i e_j) over the power basis."""
        b = np.array([self.p**i for i in range(self.n)], dtype=np.int64)
        prod = self.mul(b[:, None], b[None, :])
        return self.trace(prod)


@lru_cache(maxsize=None)
def _cached_field(p: int, n: int, modulus: tuple[int, ...] | None) -> FieldCtx:
    return FieldCtx(p, n, modulus)


def get_field(p: int, n: int, modulus: Sequence[int] | None = None) -> FieldCtx:
    """Shared, cached field context; ``modulus`` defaults to the built-in table."""
    if modulus is None:
        modulus = DEFAULT_MODULI.get((p, n)) or search_default_modulus(p, n)
    return _cached_field(p, n, tuple(int(c) % p for c in modulus))


# ---------------------------------------------------------------------------
# Elements.


@dataclass(frozen=True)
class FieldElement:
    ctx: FieldCtx = field(compare=False, hash=False, repr=False)
    rank: int

    def __post_init__(self):
        if not 0 <= self.rank < self.ctx.q:
            raise ValueError(f"rank {self.rank} out of range")

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FieldElement):
            return self.ctx == other.ctx and self.rank == other.rank
        if isinstance(other, (int, np.integer)):
            return self.rank == int(other) % self.ctx.p and self.rank < self.ctx.p
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx, self.rank))

    def __repr__(self) -> str:
        return f"<F_{self.ctx.p}^{self.ctx.n} 0x{self.rank:x}>"

    def __index__(self) -> int:
        return self.rank

    def __bool__(self) -> bool:
        return self.rank != 0

    def __lt__(self, other: "FieldElement") -> bool:
        return self.rank < self._coerce(other).rank

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(self.ctx.digits(self.rank))

    def hex(self) -> str:
        return f"{self.rank:x}"

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise FieldMismatchError(f"cannot combine elements of {self.ctx!r} and {other.ctx!r}")
            return other
        if isinstance(other, (int, np.integer)):
            return self.ctx.constant(int(other))
        raise TypeError(f"cannot combine a field element with {type(other).__name__}")

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(self.ctx, int(self.ctx.add(self.rank, o.rank)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return FieldElement(self.ctx, int(self.ctx.sub(self.rank, o.rank)))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return FieldElement(self.ctx, int(self.ctx.neg(self.rank)))

    def __mul__(self, other):
        o = self._coerce(other)
        return FieldElement(self.ctx, self.ctx._smul(self.rank, o.rank))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.rank == 0:
            raise ZeroDivisionError("inverse of zero")
        return FieldElement(self.ctx, self.ctx._spow(self.rank, -1))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        return FieldElement(self.ctx, self.ctx._spow(self.rank, int(e)))

    def frobenius(self, k: int = 1) -> "FieldElement":
        return FieldElement(self.ctx, int(self.ctx.frob(self.rank, k)))

    def trace(self) -> int:
        """Absolute trace, as an integer in [0, p)."""
        return int(self.ctx.trace(self.rank))

    def rel_trace(self, m: int) -> "FieldElement":
        return FieldElement(self.ctx, int(self.ctx.rel_trace(self.rank, m)))

    def log(self) -> int:
        return self.ctx.log_of(self)

    def in_subfield(self, m: int) -> bool:
        return bool(self.ctx.in_subfield(self.rank, m))


def _check_same(x: FieldElement, y: FieldElement) -> None:
    if x.ctx != y.ctx:
        raise FieldMismatchError(f"cannot combine elements of {x.ctx!r} and {y.ctx!r}")


def add(x: FieldElement, y: FieldElement) -> FieldElement:
    _check_same(x, y)
    return x + y


def sub(x: FieldElement, y: FieldElement) -> FieldElement:
    _check_same(x, y)
    return x - y


def mul(x: FieldElement, y: FieldElement) -> FieldElement:
    _check_same(x, y)
    return x * y


def power(x: FieldElement, e: int) -> FieldElement:
    return x**e


def trace(x: FieldElement) -> int:
    return x.trace()


def rel_trace(x: FieldElement, m: int) -> FieldElement:
    """Tr^n_m(x) = sum of x^(p^(jm)) for j < n/m."""
    return x.rel_trace(m)


# ---------------------------------------------------------------------------
# Affine trace equations.


@dataclass(frozen=True)
class TraceAffineSet:
    """The affine hyperplane {z : Tr(weight * z) = target}."""

    weight: FieldElement
    target: int
    solution: FieldElement
    hyperplane_basis: tuple[FieldElement, ...]

    @property
    def size(self) -> int:
        ctx = self.weight.ctx
        return ctx.p ** (ctx.n - 1)

    def __contains__(self, z: FieldElement) -> bool:
        return (self.weight * z).trace() == self.target

    def ranks(self) -> np.ndarray:
        """Ranks of every member, ascending."""
        ctx = self.weight.ctx
        allr = ctx.all_ranks()
        return allr[ctx.trace(ctx.mul(allr, self.weight.rank)) == self.target]

    def __iter__(self) -> Iterator[FieldElement]:
        ctx = self.weight.ctx
        for r in self.ranks():
            yield FieldElement(ctx, int(r))

    def __len__(self) -> int:
        return self.size


def solve_trace_affine(target: int, weight: FieldElement) -> TraceAffineSet:
    """Smallest-rank z with Tr(weight * z) = target, plus the solution hyperplane.

    z -> Tr(weight * z) is the F_p-linear functional with coefficients
    v_i = Tr(weight * x^i); the smallest-rank solution puts target / v_i at
    the lowest index i with v_i != 0.
    """
    ctx = weight.ctx
    if weight.rank == 0:
        raise ValueError("weight must be nonzero")
    p = ctx.p
    t = int(target) % p
    basis_ranks = np.array([p**i for i in range(ctx.n)], dtype=np.int64)
    v = ctx.trace(ctx.mul(basis_ranks, weight.rank))
    i0 = int(np.nonzero(v)[0][0])
    sol = 0 if t == 0 else (t * pow(int(v[i0]), -1, p)) % p * p**i0
    # Kernel of the functional: e_j - (v_j / v_i0) e_i0 for j != i0.
    hyper = []
    inv0 = pow(int(v[i0]), -1, p)
    for j in range(ctx.n):
        if j == i0:
            continue
        d = [0] * ctx.n
        d[j] = 1
        d[i0] = (-int(v[j]) * inv0) % p
        hyper.append(FieldElement(ctx, ctx.rank_of(d)))
    return TraceAffineSet(weight, t, FieldElement(ctx, int(sol)), tuple(hyper))


# ---------------------------------------------------------------------------
# Roots and subfield embeddings.


def eval_fp_poly(coeffs: Sequence[int], ctx: FieldCtx, xs: np.ndarray) -> np.ndarray:
    """Evaluate a polynomial with F_p coefficients (low to high) at the ranks ``xs``."""
    acc = np.zeros_like(np.asarray(xs, dtype=np.int64))
    for c in reversed(coeffs):
        acc = ctx.add(ctx.mul(acc, xs), np.full_like(acc, int(c) % ctx.p))
    return acc


def find_roots(coeffs: Sequence[int], ctx: FieldCtx, within: int | None = None) -> list[FieldElement]:
    """All roots in ``ctx`` of an F_p-polynomial, ascending by rank.

    ``within`` restricts the search to the subfield of that degree.
    """
    xs = ctx.subfield_ranks(within) if within is not None else ctx.all_ranks()
    vals = eval_fp_poly(coeffs, ctx, xs)
    return [FieldElement(ctx, int(r)) for r in xs[vals == 0]]


class SubfieldEmbedding:
    """The F_p-algebra embedding of ``small`` into ``big`` sending x to a chosen root.

    ``root_index`` selects among the roots of small's modulus in ascending
    rank order; 0 is the canonical choice.
    """

    def __init__(self, small: FieldCtx, big: FieldCtx, root_index: int = 0):
        if small.p != big.p or big.n % small.n:
            raise ValueError(f"{small!r} does not embed into {big!r}")
        self.small = small
        self.big = big
        roots = find_roots(small.modulus, big, within=small.n)
        if not 0 <= root_index < len(roots):
            raise ValueError(f"root index {root_index} out of range ({len(roots)} roots)")
        self.roots = roots
        self.root = roots[root_index]
        powers = [1]
        for _ in range(1, small.n):
            powers.append(big._smul(powers[-1], self.root.rank))
        # columns are digits of root^i in the big field
        self.matrix = np.array([big.digits(r) for r in powers], dtype=np.int64).T
        self.table = big.from_digits(small.to_digits(small.all_ranks()) @ self.matrix.T)
        self.table.setflags(write=False)
        order = np.argsort(self.table)
        self._sorted_big = self.table[order]
        self._sorted_small = order.astype(np.int64)

    def __call__(self, a: FieldElement) -> FieldElement:
        if a.ctx != self.small:
            raise FieldMismatchError(f"{a!r} is not in {self.small!r}")
        return FieldElement(self.big, int(self.table[a.rank]))

    def embed(self, ranks) -> np.ndarray:
        return self.table[np.asarray(ranks, dtype=np.int64)]

    def restrict(self, ranks) -> np.ndarray:
        """Inverse of :meth:`embed`; raises if a value lies outside the subfield."""
        ranks = np.asarray(ranks, dtype=np.int64)
        pos = np.searchsorted(self._sorted_big, ranks)
        pos = np.clip(pos, 0, len(self._sorted_big) - 1)
        if not np.all(self._sorted_big[pos] == ranks):
            raise ValueError("value outside the embedded subfield")
        return self._sorted_small[pos]

    def pull(self, a: FieldElement) -> FieldElement:
        if a.ctx != self.big:
            raise FieldMismatchError(f"{a!r} is not in {self.big!r}")
        return FieldElement(self.small, int(self.restrict(a.rank)))


@lru_cache(maxsize=None)
def embedding(small: FieldCtx, big: FieldCtx, root_index: int = 0) -> SubfieldEmbedding:
    return SubfieldEmbedding(small, big, root_index)


# ---------------------------------------------------------------------------
# Text formats.


def format_poly_fp(coeffs: Sequence[int]) -> str:
    """Render an F_p polynomial (low to high) as e.g. ``x^9+x^4+1``."""
    terms = []
    for e in range(len(coeffs) - 1, -1, -1):
        c = int(coeffs[e])
        if c == 0:
            continue
        mon = "1" if e == 0 else ("x" if e == 1 else f"x^{e}")
        if e == 0:
            terms.append(str(c))
        elif c == 1:
            terms.append(mon)
        else:
            terms.append(f"{c}*{mon}")
    return "+".join(terms) if terms else "0"


_TERM_RE = re.compile(r"\s*(?:(\d+)\s*\*\s*)?(?:(x)(?:\s*\^\s*(\d+))?|(\d+))\s*")


def parse_poly_fp(text: str, p: int, offset: int = 0) -> list[int]:
    """Parse ``x^9+x^4+1`` style F_p polynomials; returns coefficients low to high."""
    coeffs: dict[int, int] = {}
    pos = 0
    sign = 1
    if not text.strip():
        raise ParseError("empty polynomial", offset + 1, text)
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", offset + pos + 1, text)
        mult, xs, exp, const = m.groups()
        if xs is None and const is None:
            raise ParseError("expected a term", offset + pos + 1, text)
        if xs:
            e = int(exp) if exp else 1
            c = int(mult) if mult else 1
        else:
            if mult:
                raise ParseError("malformed constant", offset + pos + 1, text)
            e, c = 0, int(const)
        coeffs[e] = (coeffs.get(e, 0) + sign * c) % p
        pos = m.end()
        if pos < len(text):
            if text[pos] == "+":
                sign = 1
            elif text[pos] == "-":
                sign = -1
            else:
                raise ParseError(f"expected '+' or '-', found {text[pos]!r}", offset + pos + 1, text)
            pos += 1
            if pos == len(text):
                raise ParseError("dangling operator", offset + pos, text)
    deg = max(coeffs) if coeffs else 0
    return [coeffs.get(e, 0) for e in range(deg + 1)]


def parse_field_spec(spec: str) -> FieldCtx:
    """Parse ``p=2,n=9,mod=x^9+x^4+1``; the ``mod`` entry is optional."""
    parts: dict[str, tuple[str, int]] = {}
    col = 0
    for chunk in spec.split(","):
        if "=" not in chunk:
            raise ParseError(f"expected key=value, got {chunk!r}", col + 1, spec)
        key, _, val = chunk.partition("=")
        key = key.strip()
        if key not in ("p", "n", "mod"):
            raise ParseError(f"unknown key {key!r}", col + 1, spec)
        if key in parts:
            raise ParseError(f"duplicate key {key!r}", col + 1, spec)
        parts[key] = (val, col + len(chunk) - len(val))
        col += len(chunk) + 1
    for key in ("p", "n"):
        if key not in parts:
            raise ParseError(f"missing key {key!r}", len(spec) + 1, spec)
    vals = {}
    for key in ("p", "n"):
        raw, c0 = parts[key]
        if not raw.strip().isdigit():
            raise ParseError(f"{key} must be a positive integer", c0 + 1, spec)
        vals[key] = int(raw)
    p, n = vals["p"], vals["n"]
    if not is_prime(p):
        raise ParseError(f"p={p} is not prime", parts["p"][1] + 1, spec)
    modulus = None
    if "mod" in parts:
        raw, c0 = parts["mod"]
        modulus = parse_poly_fp(raw, p, offset=c0)
        if len(modulus) != n + 1 or modulus[-1] != 1:
            raise ParseError(f"modulus must be monic of degree {n}", c0 + 1, spec)
        if not is_irreducible(modulus, p):
            raise ParseError("modulus is reducible", c0 + 1, spec)
    return get_field(p, n, modulus)


def format_element(a: FieldElement, symbol: str = "g") -> str:
    """``0``, ``1`` or a power of the generator such as ``g^5``."""
    if a.rank == 0:
        return "0"
    k = a.log()
    if k == 0:
        return "1"
    return symbol if k == 1 else f"{symbol}^{k}"


def parse_element(text: str, ctx: FieldCtx, symbols: Mapping[str, FieldElement] | None = None) -> FieldElement:
    """Parse a rank in hex (``0x1f`` or bare hex) or a generator power like ``g^5``."""
    from .vfunc import parse_poly

    t = text.strip()
    if re.fullmatch(r"(0x)?[0-9a-fA-F]+", t):
        return ctx.element(int(t, 16))
    poly = parse_poly(t, ctx, symbols=symbols)
    if any(e != 0 for e in poly.terms):
        raise ParseError("element expression must not contain x", 1, text)
    return poly.coeff(0)
