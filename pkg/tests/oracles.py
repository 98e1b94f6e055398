"""Slow, obviously-correct reference implementations used as test oracles.

Nothing here touches the library's log tables, kernels or numpy fast paths:
elements are digit lists, multiplication is schoolbook modulo the modulus and
every sum is an explicit Python loop.
"""

from __future__ import annotations

import cmath
from collections import Counter
from itertools import product


def digits(r: int, p: int, n: int) -> list[int]:
    return [(r // p**i) % p for i in range(n)]


def rank(d, p: int) -> int:
    return sum((c % p) * p**i for i, c in enumerate(d))


def add(a: int, b: int, p: int, n: int) -> int:
    return rank([x + y for x, y in zip(digits(a, p, n), digits(b, p, n))], p)


def sub(a: int, b: int, p: int, n: int) -> int:
    return rank([x - y for x, y in zip(digits(a, p, n), digits(b, p, n))], p)


def mul(a: int, b: int, p: int, modulus: tuple[int, ...]) -> int:
    n = len(modulus) - 1
    da, db = digits(a, p, n), digits(b, p, n)
    prod = [0] * (2 * n - 1)
    for i, x in enumerate(da):
        for j, y in enumerate(db):
            prod[i + j] += x * y
    for k in range(2 * n - 2, n - 1, -1):
        t = prod[k] % p
        if t:
            for j in range(n + 1):
                prod[k - n + j] -= t * modulus[j]
    return rank(prod[:n], p)


def power(a: int, e: int, p: int, modulus) -> int:
    out, base = 1, a
    while e:
        if e & 1:
            out = mul(out, base, p, modulus)
        base = mul(base, base, p, modulus)
        e >>= 1
    return out


def trace(a: int, p: int, modulus, m: int = 1) -> int:
    """Tr^n_m(a) = sum_j a^(p^(jm)) as a rank in F_{p^n}."""
    n = len(modulus) - 1
    acc, t = 0, a
    for _ in range(n // m):
        acc = add(acc, t, p, n)
        t = power(t, p**m, p, modulus)
    return acc


def abs_trace(a: int, p: int, modulus) -> int:
    t = trace(a, p, modulus)
    assert t < p
    return t


def is_irreducible(coeffs, p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    n = len(coeffs) - 1

    def polymod(a, b):
        a = list(a)
        inv = pow(b[-1], -1, p)
        while len(a) >= len(b):
            t = (a[-1] * inv) % p
            s = len(a) - len(b)
            for i, c in enumerate(b):
                a[s + i] = (a[s + i] - t * c) % p
            while a and a[-1] == 0:
                a.pop()
        return a

    for d in range(1, n // 2 + 1):
        for low in product(range(p), repeat=d):
            if not polymod(coeffs, list(low) + [1]):
                return False
    return True


def smallest_irreducible(p: int, n: int) -> tuple[int, ...]:
    for r in range(p**n):
        c = digits(r, p, n) + [1]
        if (n == 1 or c[0]) and is_irreducible(c, p):
            return tuple(c)
    raise AssertionError


def walsh_sq(table, p: int, modulus, a: int, b: int) -> float:
    """|sum_x xi^(Tr(b F(x)) - Tr(a x))|^2 by direct complex summation."""
    n = len(modulus) - 1
    xi = cmath.exp(2j * cmath.pi / p)
    s = 0
    for x in range(p**n):
        e = abs_trace(mul(b, table[x], p, modulus), p, modulus) - abs_trace(mul(a, x, p, modulus), p, modulus)
        s += xi ** (e % p)
    return abs(s) ** 2


def walsh_spectrum(table, p: int, modulus) -> Counter:
    """All |W_F(a, b)|^2 for b != 0, as rounded floats; same sums as walsh_sq with the traces hoisted."""
    n = len(modulus) - 1
    q = p**n
    xi = [cmath.exp(2j * cmath.pi * k / p) for k in range(p)]
    tr = [abs_trace(x, p, modulus) for x in range(q)]
    lin = [[tr[mul(a, x, p, modulus)] for x in range(q)] for a in range(q)]
    out = Counter()
    for b in range(1, q):
        comp = [tr[mul(b, table[x], p, modulus)] for x in range(q)]
        for a in range(q):
            s = sum(xi[(comp[x] - lin[a][x]) % p] for x in range(q))
            out[round(abs(s) ** 2)] += 1
    return out


def ddt_spectrum(table, p: int, n: int) -> Counter:
    q = p**n
    out = Counter()
    for a in range(1, q):
        row = Counter(sub(table[add(x, a, p, n)], table[x], p, n) for x in range(q))
        out.update(row.values())
        out[0] += q - len(row)
    return out


def interpolate(table, p: int, modulus) -> dict[int, int]:
    """Coefficients of the interpolating polynomial, straight from the DFT formulas.

    c_0 = f(0), c_j = -sum_{a != 0} f(a) a^(q-1-j) for 0 < j < q-1, and
    c_{q-1} = -sum_a f(a).
    """
    n = len(modulus) - 1
    q = p**n
    coeffs = {}
    c0 = table[0]
    if c0:
        coeffs[0] = c0
    for j in range(1, q):
        acc = 0
        for a in range(q):
            if table[a] == 0:
                continue
            aj = power(a, q - 1 - j, p, modulus) if a else (1 if j == q - 1 else 0)
            acc = add(acc, mul(table[a], aj, p, modulus), p, n)
        acc = sub(0, acc, p, n)
        if acc:
            coeffs[j] = acc
    return coeffs


def p_weight(e: int, p: int) -> int:
    w = 0
    while e:
        w += e % p
        e //= p
    return w


def anf_degree_binary(table, n: int) -> int:
    """Maximum ANF degree over the n coordinate functions (p = 2), by the subset-sum formula."""
    q = 2**n
    best = 0
    for bit in range(n):
        f = [(table[x] >> bit) & 1 for x in range(q)]
        for u in range(q):
            coef = 0
            sub_ = u
            while True:
                coef ^= f[sub_]
                if sub_ == 0:
                    break
                sub_ = (sub_ - 1) & u
            if coef:
                best = max(best, bin(u).count("1"))
    return best


def is_bijective_on_pairs(fn, q_dom: int, q_cod: int) -> bool:
    seen = set()
    for x in range(q_dom):
        for y in range(q_cod):
            seen.add(fn(x, y))
    return len(seen) == q_dom * q_cod
