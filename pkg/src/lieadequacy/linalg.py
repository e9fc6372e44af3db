"""Dense linear algebra over GF(q) on integer-key arrays.

Rows are vectors throughout.  ``EchelonBasis`` is the incremental rank
engine shared by the span and cohomology computations: it keeps a reduced
row echelon basis so that reducing a batch of vectors is a single matrix
product against the pivot columns.
"""

from __future__ import annotations

import numpy as np

from .gf import FieldCtx


def rref(F: FieldCtx, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    a = np.array(a, dtype=F.dtype, copy=True)
    if a.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        lead = a[r, c]
        if lead != 1:
            a[r] = F.mul_table[F.inv_table[lead], a[r]]
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = F.sub_table[a[hit], F.mul_table[col[hit][:, None], a[r][None, :]]]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(F: FieldCtx, a: np.ndarray) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref(F, a)[1])


def nullspace(F: FieldCtx, a: np.ndarray) -> np.ndarray:
    """Basis of {x : a @ x = 0}, returned as rows of shape (d, ncols)."""
    a = np.asarray(a)
    cols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(cols, dtype=F.dtype)
    r, piv = rref(F, a)
    free = [c for c in range(cols) if c not in set(piv)]
    out = np.zeros((len(free), cols), dtype=F.dtype)
    for k, c in enumerate(free):
        out[k, c] = 1
        # x_piv = -r[i, c] for each pivot row i
        out[k, piv] = F.neg_table[r[:, c]]
    return out


def inverse(F: FieldCtx, m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("inverse expects a square matrix")
    aug = np.concatenate([m.astype(F.dtype), np.eye(n, dtype=F.dtype)], axis=1)
    r, piv = rref(F, aug)
    if piv[:n] != list(range(n)):
        raise np.linalg.LinAlgError("matrix is singular over GF(%d)" % F.q)
    return r[:, n:]


def det(F: FieldCtx, m: np.ndarray) -> int:
    """Determinant key, by Gaussian elimination."""
    a = np.array(m, dtype=F.dtype, copy=True)
    n = a.shape[0]
    result = 1
    for c in range(n):
        nz = np.flatnonzero(a[c:, c])
        if nz.size == 0:
            return 0
        piv = c + int(nz[0])
        if piv != c:
            a[[c, piv]] = a[[piv, c]]
            result = int(F.neg_table[result])
        lead = a[c, c]
        result = int(F.mul_table[result, lead])
        inv = F.inv_table[lead]
        below = a[c + 1:, c]
        hit = np.flatnonzero(below)
        if hit.size:
            f = F.mul_table[below[hit], inv]
            rows = c + 1 + hit
            a[rows] = F.sub_table[a[rows], F.mul_table[f[:, None], a[c][None, :]]]
    return result


class EchelonBasis:
    """Incrementally maintained RREF basis of a row space in GF(q)^ncols."""

    def __init__(self, F: FieldCtx, ncols: int):
        self.F = F
        self.ncols = ncols
        self.rows = np.zeros((0, ncols), dtype=F.dtype)
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def full(self) -> bool:
        return self.rank == self.ncols

    def reduce(self, vecs: np.ndarray) -> np.ndarray:
        """Residuals of ``vecs`` modulo the current span (zero iff contained)."""
        vecs = np.asarray(vecs, dtype=self.F.dtype)
        if not self.pivots:
            return vecs.copy()
        coeff = vecs[..., self.pivots]
        return self.F.sub_table[vecs, self.F.matmul(coeff, self.rows)]

    def contains(self, vecs: np.ndarray) -> np.ndarray:
        res = self.reduce(np.atleast_2d(vecs))
        return ~np.any(res != 0, axis=-1)

    def add(self, vecs: np.ndarray) -> int:
        """Add the span of ``vecs``; returns the number of new basis rows."""
        vecs = np.atleast_2d(np.asarray(vecs, dtype=self.F.dtype))
        if vecs.shape[0] == 0 or self.full:
            return 0
        res = self.reduce(vecs)
        res = res[np.any(res != 0, axis=1)]
        if res.shape[0] == 0:
            return 0
        new, newpiv = rref(self.F, res)
        if self.pivots:
            # clear the new pivot columns out of the old rows
            old = self.F.sub_table[self.rows, self.F.matmul(self.rows[:, newpiv], new)]
        else:
            old = self.rows
        rows = np.concatenate([old, new])
        piv = self.pivots + newpiv
        order = np.argsort(piv, kind="stable")
        self.rows = rows[order]
        self.pivots = [piv[i] for i in order]
        return len(newpiv)
