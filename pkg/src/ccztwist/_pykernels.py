"""Pure-Python (numpy) implementations of the hot kernels.

Every function here has an identically named counterpart in ``_ckernels.pyx``;
both operate on int64 rank arrays, where the rank of a field element is
``sum(coeff[i] * p**i)`` over its power-basis coordinates.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _digits(ranks: np.ndarray, p: int, n: int) -> np.ndarray:
    out = np.empty(ranks.shape + (n,), dtype=np.int64)
    r = np.asarray(ranks, dtype=np.int64)
    for i in range(n):
        out[..., i] = r % p
        r = r // p
    return out


def _ranks(digits: np.ndarray, p: int) -> np.ndarray:
    n = digits.shape[-1]
    pw = p ** np.arange(n, dtype=np.int64)
    return (digits % p) @ pw


def _add(a: np.ndarray, b: np.ndarray, p: int, n: int) -> np.ndarray:
    if p == 2:
        return np.bitwise_xor(a, b)
    return _ranks(_digits(a, p, n) + _digits(b, p, n), p)


def _sub(a: np.ndarray, b: np.ndarray, p: int, n: int) -> np.ndarray:
    if p == 2:
        return np.bitwise_xor(a, b)
    return _ranks(_digits(a, p, n) - _digits(b, p, n), p)


def _polymul_const(digs: np.ndarray, const: np.ndarray, modulus: np.ndarray, p: int) -> np.ndarray:
    """Multiply every row of ``digs`` (N, n) by the fixed residue ``const`` modulo ``modulus``."""
    n = digs.shape[1]
    prod = np.zeros((digs.shape[0], 2 * n - 1), dtype=np.int64)
    for j in range(n):
        if const[j]:
            prod[:, j : j + n] += digs * const[j]
    prod %= p
    for k in range(2 * n - 2, n - 1, -1):
        top = prod[:, k]
        if not top.any():
            continue
        prod[:, k - n : k] -= top[:, None] * modulus[None, :n]
        prod[:, k - n : k] %= p
        prod[:, k] = 0
    return prod[:, :n] % p


def exp_table(p: int, n: int, modulus: np.ndarray, gen: np.ndarray) -> np.ndarray:
    """Powers g^0 .. g^(q-2) of the element with digit vector ``gen``, as ranks."""
    q = p**n
    modulus = np.asarray(modulus, dtype=np.int64)
    gen = np.asarray(gen, dtype=np.int64)
    block = np.zeros((1, n), dtype=np.int64)
    block[0, 0] = 1
    step = gen.copy()
    # Doubling: the next block is the current one times g^len(block).
    while block.shape[0] < q - 1:
        nxt = _polymul_const(block, step, modulus, p)
        block = np.concatenate([block, nxt], axis=0)
        step = _polymul_const(step[None, :], step, modulus, p)[0]
    return _ranks(block[: q - 1], p)


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard butterfly along the last axis."""
    a = np.array(values, dtype=np.int64)
    shape = a.shape
    q = shape[-1]
    a = a.reshape(-1, q)
    rows = a.shape[0]
    h = 1
    while h < q:
        a = a.reshape(rows, -1, 2, h)
        x = a[:, :, 0, :].copy()
        y = a[:, :, 1, :]
        a[:, :, 0, :] = x + y
        a[:, :, 1, :] = x - y
        h *= 2
    return a.reshape(shape)


def group_ring_walsh(f: np.ndarray, p: int, n: int) -> np.ndarray:
    """Residue counts C[..., w, j] = #{x : f(x) - <w, x> = j (mod p)}.

    ``f`` holds F_p values indexed by rank along the last axis; ``<w, x>`` is
    the coordinate dot product.  The transform is the p-ary butterfly over
    Z[C_p], so every count is exact.
    """
    q = p**n
    f = np.asarray(f, dtype=np.int64)
    lead = f.shape[:-1]
    flat = f.reshape(-1, q) % p
    rows = flat.shape[0]
    t = np.zeros((rows, q, p), dtype=np.int64)
    np.put_along_axis(t, flat[:, :, None], 1, axis=2)
    # digit i of the rank has stride p**i: axis 1 + (n - 1 - i) after reshaping
    t = t.reshape((rows,) + (p,) * n + (p,))
    for axis in range(1, n + 1):
        moved = np.moveaxis(t, axis, 0)
        out = np.zeros_like(moved)
        for w in range(p):
            for x in range(p):
                out[w] += np.roll(moved[x], -(w * x) % p, axis=-1)
        t = np.moveaxis(out, 0, axis)
    return np.ascontiguousarray(t).reshape(lead + (q, p))


def ddt_rows(table: np.ndarray, p: int, n: int, m: int, rows: np.ndarray) -> np.ndarray:
    """Rows of the difference table: out[k, b] = #{x : F(x + rows[k]) - F(x) = b}."""
    q = p**n
    qc = p**m
    table = np.asarray(table, dtype=np.int64)
    rows = np.asarray(rows, dtype=np.int64)
    xs = np.arange(q, dtype=np.int64)
    out = np.zeros((rows.size, qc), dtype=np.int32)
    if p == 2:
        for k, a in enumerate(rows):
            d = table[xs ^ a] ^ table
            out[k] = np.bincount(d, minlength=qc)
        return out
    xdig = _digits(xs, p, n)
    tdig = _digits(table, p, m)
    pw = p ** np.arange(n, dtype=np.int64)
    pwc = p ** np.arange(m, dtype=np.int64)
    for k, a in enumerate(rows):
        adig = _digits(np.array(a), p, n)
        shifted = ((xdig + adig) % p) @ pw
        d = ((tdig[shifted] - tdig) % p) @ pwc
        out[k] = np.bincount(d, minlength=qc)
    return out


def interpolate(values: np.ndarray, exp: np.ndarray, log: np.ndarray, p: int, n: int) -> np.ndarray:
    """Coefficient ranks c[e] of the unique polynomial of degree < q through ``values``."""
    q = p**n
    values = np.asarray(values, dtype=np.int64)
    coeffs = np.zeros(q, dtype=np.int64)
    coeffs[0] = values[0]
    nz = np.nonzero(values[1:])[0] + 1
    if nz.size == 0:
        coeffs[q - 1] = _neg(np.array(values[0]), p, n)
        return coeffs
    la = log[nz]
    lf = log[values[nz]]
    order = q - 1
    chunk = max(1, (1 << 21) // max(1, nz.size))
    if p != 2:
        dig_tab = _digits(np.arange(q, dtype=np.int64), p, n)
        pw = p ** np.arange(n, dtype=np.int64)
    for start in range(1, q - 1, chunk):
        js = np.arange(start, min(q - 1, start + chunk), dtype=np.int64)
        idx = (lf[None, :] - js[:, None] * la[None, :]) % order
        terms = exp[idx]
        if p == 2:
            coeffs[js] = np.bitwise_xor.reduce(terms, axis=1)
        else:
            s = dig_tab[terms].sum(axis=1)
            coeffs[js] = ((-s) % p) @ pw
    # Coefficient of x^(q-1): -(sum of all nonzero-point values) - c_0.
    total = _sum_ranks(values[nz], p, n)
    coeffs[q - 1] = _sub(_neg(np.array(total), p, n), np.array(values[0]), p, n)
    return coeffs


def _neg(a: np.ndarray, p: int, n: int) -> np.ndarray:
    if p == 2:
        return a
    return _ranks(-_digits(a, p, n), p)


def _sum_ranks(arr: np.ndarray, p: int, n: int) -> int:
    if arr.size == 0:
        return 0
    if p == 2:
        return int(np.bitwise_xor.reduce(arr))
    return int(_ranks(_digits(arr, p, n).sum(axis=0), p))
