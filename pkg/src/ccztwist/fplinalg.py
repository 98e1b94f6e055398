"""Dense linear algebra over the prime field F_p on small integer matrices."""

from __future__ import annotations

import numpy as np


def rref(mat: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``mat`` mod p and the list of pivot columns."""
    a = np.array(mat, dtype=np.int64) % p
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        for rr in range(rows):
            if rr != r and a[rr, c]:
                a[rr] = (a[rr] - a[rr, c] * a[r]) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(mat: np.ndarray, p: int) -> int:
    return len(rref(mat, p)[1])


def nullspace(mat: np.ndarray, p: int) -> np.ndarray:
    """Basis (as rows) of {v : mat @ v = 0 mod p}."""
    mat = np.atleast_2d(np.asarray(mat, dtype=np.int64))
    cols = mat.shape[1]
    red, pivots = rref(mat, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-red[i, fc]) % p
    return basis


def row_space(mat: np.ndarray, p: int) -> np.ndarray:
    """Basis (as rows) of the row space."""
    red, pivots = rref(mat, p)
    return red[: len(pivots)]


def inverse(mat: np.ndarray, p: int) -> np.ndarray:
    n = mat.shape[0]
    aug = np.concatenate([np.asarray(mat, dtype=np.int64) % p, np.eye(n, dtype=np.int64)], axis=1)
    red, pivots = rref(aug, p)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular over F_%d" % p)
    return red[:, n:]


def random_invertible(n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        m = rng.integers(0, p, size=(n, n))
        if rank(m, p) == n:
            return m


def span(basis: np.ndarray, p: int) -> np.ndarray:
    """All F_p-combinations of the rows of ``basis`` (p^k rows, lexicographic in the scalars)."""
    basis = np.atleast_2d(np.asarray(basis, dtype=np.int64))
    k, width = basis.shape
    if k == 0:
        return np.zeros((1, width), dtype=np.int64)
    scal = np.indices((p,) * k).reshape(k, -1).T
    return (scal @ basis) % p
