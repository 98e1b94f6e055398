# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; same signatures as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, int32_t, uint8_t

cnp.import_array()

BACKEND = "compiled"


cdef inline int64_t _pmod(int64_t a, int64_t p) nogil:
    a %= p
    return a + p if a < 0 else a


def _digit_table(int64_t q, int p, int n):
    cdef cnp.ndarray[uint8_t, ndim=2] out = np.zeros((q, n), dtype=np.uint8)
    cdef uint8_t[:, :] o = out
    cdef int64_t r, v
    cdef int i
    with nogil:
        for r in range(q):
            v = r
            for i in range(n):
                o[r, i] = <uint8_t>(v % p)
                v //= p
    return out


def exp_table(int p, int n, modulus, gen):
    """Powers g^0 .. g^(q-2) of the element with digit vector ``gen``, as ranks."""
    cdef int64_t q = <int64_t>p ** n
    cdef const int64_t[:] mod = np.ascontiguousarray(modulus, dtype=np.int64)
    cdef const int64_t[:] g = np.ascontiguousarray(gen, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] out = np.empty(q - 1, dtype=np.int64)
    cdef int64_t[:] o = out
    cdef int64_t[:] cur = np.zeros(n, dtype=np.int64)
    cdef int64_t[:] prod = np.zeros(2 * n, dtype=np.int64)
    cdef int64_t k, rank, pw, top
    cdef int i, j
    cur[0] = 1
    with nogil:
        for k in range(q - 1):
            rank = 0
            pw = 1
            for i in range(n):
                rank += cur[i] * pw
                pw *= p
            o[k] = rank
            for i in range(2 * n):
                prod[i] = 0
            for i in range(n):
                if cur[i]:
                    for j in range(n):
                        prod[i + j] += cur[i] * g[j]
            for i in range(2 * n - 2, n - 1, -1):
                top = prod[i] % p
                if top:
                    for j in range(n):
                        prod[i - n + j] -= top * mod[j]
                prod[i] = 0
            for i in range(n):
                cur[i] = _pmod(prod[i], p)
    return out


def fwht(values):
    """Unnormalised Walsh-Hadamard butterfly along the last axis."""
    a = np.array(values, dtype=np.int64)
    shape = a.shape
    cdef int64_t q = shape[len(shape) - 1]
    flat = np.ascontiguousarray(a.reshape(-1, q))
    cdef int64_t[:, :] v = flat
    cdef int64_t rows = flat.shape[0]
    cdef int64_t r, h, i, j, x, y
    with nogil:
        for r in range(rows):
            h = 1
            while h < q:
                i = 0
                while i < q:
                    for j in range(i, i + h):
                        x = v[r, j]
                        y = v[r, j + h]
                        v[r, j] = x + y
                        v[r, j + h] = x - y
                    i += 2 * h
                h *= 2
    return flat.reshape(shape)


def group_ring_walsh(f, int p, int n):
    """Residue counts C[..., w, j] = #{x : f(x) - <w, x> = j (mod p)}."""
    cdef int64_t q = <int64_t>p ** n
    f = np.asarray(f, dtype=np.int64)
    lead = f.shape[: f.ndim - 1]
    flat = np.ascontiguousarray(f.reshape(-1, q) % p)
    cdef int64_t[:, :] fv = flat
    cdef int64_t rows = flat.shape[0]
    t_arr = np.zeros((rows, q, p), dtype=np.int64)
    tmp_arr = np.zeros((p, p), dtype=np.int64)
    cdef int64_t[:, :, :] t = t_arr
    cdef int64_t[:, :] tmp = tmp_arr
    cdef int64_t r, x, s, base, hi, lo
    cdef int d, w, xi, k
    with nogil:
        for r in range(rows):
            for x in range(q):
                t[r, x, fv[r, x]] = 1
            s = 1
            for d in range(n):
                # Butterfly over digit d (stride s): out[w] = sum_x roll(v[x], -(w x)).
                hi = 0
                while hi < q:
                    for lo in range(s):
                        base = hi + lo
                        for w in range(p):
                            for k in range(p):
                                tmp[w, k] = 0
                            for xi in range(p):
                                for k in range(p):
                                    tmp[w, k] += t[r, base + xi * s, (k + w * xi) % p]
                        for w in range(p):
                            for k in range(p):
                                t[r, base + w * s, k] = tmp[w, k]
                    hi += s * p
                s *= p
    return t_arr.reshape(tuple(lead) + (q, p))


def ddt_rows(table, int p, int n, int m, rows):
    """Rows of the difference table: out[k, b] = #{x : F(x + rows[k]) - F(x) = b}."""
    cdef int64_t q = <int64_t>p ** n
    cdef int64_t qc = <int64_t>p ** m
    cdef const int64_t[:] tb = np.ascontiguousarray(table, dtype=np.int64)
    cdef const int64_t[:] rw = np.ascontiguousarray(rows, dtype=np.int64).reshape(-1)
    out_arr = np.zeros((rw.shape[0], qc), dtype=np.int32)
    cdef int32_t[:, :] out = out_arr
    cdef int64_t k, a, x, y, d, pw, v
    cdef int i
    cdef uint8_t[:, :] xd
    cdef uint8_t[:, :] td
    if p == 2:
        with nogil:
            for k in range(rw.shape[0]):
                a = rw[k]
                for x in range(q):
                    out[k, tb[x ^ a] ^ tb[x]] += 1
        return out_arr
    xd = _digit_table(q, p, n)
    td = _digit_table(qc, p, m)
    with nogil:
        for k in range(rw.shape[0]):
            a = rw[k]
            for x in range(q):
                # y = x + a digit-wise
                y = 0
                pw = 1
                v = a
                for i in range(n):
                    y += ((xd[x, i] + v % p) % p) * pw
                    v //= p
                    pw *= p
                d = 0
                pw = 1
                for i in range(m):
                    d += ((td[tb[y], i] - td[tb[x], i] + p) % p) * pw
                    pw *= p
                out[k, d] += 1
    return out_arr


def interpolate(values, exp, log, int p, int n):
    """Coefficient ranks c[e] of the unique polynomial of degree < q through ``values``."""
    cdef int64_t q = <int64_t>p ** n
    cdef int64_t order = q - 1
    cdef const int64_t[:] vals = np.ascontiguousarray(values, dtype=np.int64)
    cdef const int64_t[:] ex = np.ascontiguousarray(exp, dtype=np.int64)
    cdef const int64_t[:] lg = np.ascontiguousarray(log, dtype=np.int64)
    nz_arr = np.nonzero(np.asarray(vals)[1:])[0].astype(np.int64) + 1
    cdef int64_t nnz = nz_arr.shape[0]
    la_arr = np.asarray(lg)[nz_arr]
    lf_arr = np.asarray(lg)[np.asarray(vals)[nz_arr]]
    cdef int64_t[:] la = la_arr
    cdef int64_t[:] lf = lf_arr
    out_arr = np.zeros(q, dtype=np.int64)
    cdef int64_t[:] out = out_arr
    cdef int64_t j, t, idx, acc, pw, rank
    cdef int i
    cdef uint8_t[:, :] dg
    cdef int64_t[:] dsum = np.zeros(n, dtype=np.int64)
    out[0] = vals[0]
    if nnz == 0:
        d0 = np.array([(int(vals[0]) // p**i) % p for i in range(n)], dtype=np.int64)
        out_arr[q - 1] = int(((-d0) % p) @ (p ** np.arange(n, dtype=np.int64)))
        return out_arr
    if p == 2:
        with nogil:
            for j in range(1, q - 1):
                acc = 0
                for t in range(nnz):
                    idx = (lf[t] - j * la[t]) % order
                    if idx < 0:
                        idx += order
                    acc ^= ex[idx]
                out[j] = acc
        total = int(np.bitwise_xor.reduce(np.asarray(vals)[nz_arr]))
        out_arr[q - 1] = total ^ int(vals[0])
        return out_arr
    dg = _digit_table(q, p, n)
    with nogil:
        for j in range(1, q - 1):
            for i in range(n):
                dsum[i] = 0
            for t in range(nnz):
                idx = (lf[t] - (j * la[t]) % order) % order
                if idx < 0:
                    idx += order
                rank = ex[idx]
                for i in range(n):
                    dsum[i] += dg[rank, i]
            rank = 0
            pw = 1
            for i in range(n):
                rank += _pmod(-dsum[i], p) * pw
                pw *= p
            out[j] = rank
    # Coefficient of x^(q-1): -(sum of all nonzero-point values) - c_0.
    d = np.asarray(dg, dtype=np.int64)
    s = d[np.asarray(vals)[nz_arr]].sum(axis=0) + d[int(vals[0])]
    out_arr[q - 1] = int(((-s) % p) @ (p ** np.arange(n, dtype=np.int64)))
    return out_arr
