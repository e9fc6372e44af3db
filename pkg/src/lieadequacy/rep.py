"""Symmetric powers of the natural module, their endomorphism modules, and
the linear span of representation images.

Convention: ``g = [[r, s], [u, v]]`` acts on the polynomial variables by
``X -> rX + uY`` and ``Y -> sX + vY``; the basis of Sym^a is
``X^a, X^(a-1) Y, ..., Y^a`` and column ``j`` of the image matrix holds the
image of basis vector ``j``.  With this convention ``g -> Sym^a(g)`` is a
homomorphism and Sym^1 is the identity map on matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .gf import FieldCtx
from . import linalg
from .linalg import EchelonBasis
from .matgrp import GroupCtx, Mat, batch_power, gl2_generators, p_prime_part, sl2_generators, word_for

DEFAULT_MEMORY_BUDGET = 512 * 2**20


@dataclass(frozen=True)
class Representation:
    dim: int
    gen_images: tuple[Mat, ...]
    label: str
    field: FieldCtx
    gen_inverses: tuple[Mat, ...] = dc_field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("representation dimension must be >= 1")
        for m in self.gen_images:
            if m.n != self.dim or m.field is not self.field:
                raise ValueError("generator image has wrong size or field")
        if not self.gen_inverses:
            object.__setattr__(self, "gen_inverses", tuple(m.inverse() for m in self.gen_images))

    @property
    def images(self) -> np.ndarray:
        return np.stack([m.data for m in self.gen_images])

    @property
    def inverse_images(self) -> np.ndarray:
        return np.stack([m.data for m in self.gen_inverses])

    @property
    def steps(self) -> np.ndarray:
        """Images of the Cayley labels: generators, then inverses."""
        return np.concatenate([self.images, self.inverse_images])


def sym_power_matrices(field: FieldCtx, mats: np.ndarray, a: int) -> np.ndarray:
    """Sym^a of a stack of 2x2 key matrices, shape (N, 2, 2) -> (N, a+1, a+1)."""
    mats = np.asarray(mats, dtype=field.dtype)
    if mats.ndim == 2:
        return sym_power_matrices(field, mats[None], a)[0]
    N = len(mats)
    r, s = mats[:, 0, 0], mats[:, 0, 1]
    u, v = mats[:, 1, 0], mats[:, 1, 1]
    mul, add = field.mul_table, field.add_table
    out = np.zeros((N, a + 1, a + 1), dtype=field.dtype)
    for j in range(a + 1):
        # coefficients in Y of (r + uY)^(a-j) (s + vY)^j
        poly = np.zeros((N, a + 1), dtype=field.dtype)
        poly[:, 0] = 1
        deg = 0
        for c0, c1 in [(r, u)] * (a - j) + [(s, v)] * j:
            nxt = mul[c0[:, None], poly]
            nxt[:, 1:deg + 2] = add[nxt[:, 1:deg + 2], mul[c1[:, None], poly[:, :deg + 1]]]
            poly = nxt
            deg += 1
        out[:, :, j] = poly
    return out


def sym_power_of(gens: Sequence[Mat], a: int, label: str | None = None) -> Representation:
    F = gens[0].field
    if a < 0:
        raise ValueError("symmetric power exponent must be >= 0")
    if a >= F.p:
        raise ValueError(f"a={a} is not restricted (need a < p={F.p})")
    imgs = sym_power_matrices(F, np.stack([g.data for g in gens]), a)
    return Representation(a + 1, tuple(Mat(F, m) for m in imgs), label or f"Sym^{a}", F)


def sym_power(field: FieldCtx, a: int, group: str = "SL2") -> Representation:
    """V(a) on the standard generators of SL2(q) or GL2(q)."""
    if group == "SL2":
        gens = sl2_generators(field)
    elif group == "GL2":
        gens = gl2_generators(field)
    else:
        raise ValueError(f"unknown group family {group!r}")
    return sym_power_of(gens, a, label=f"Sym^{a}")


def _kron(F: FieldCtx, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n1, n2 = a.shape[0], b.shape[0]
    k = F.mul_table[a[:, None, :, None], b[None, :, None, :]]
    return k.reshape(n1 * n2, n1 * n2)


def end_module(rep: Representation) -> Representation:
    """End(V) with g acting by X -> rho(g) X rho(g)^-1 on row-major vec(X)."""
    F = rep.field
    imgs = []
    invs = []
    for m, mi in zip(rep.gen_images, rep.gen_inverses):
        imgs.append(Mat(F, _kron(F, m.data, mi.data.T)))
        invs.append(Mat(F, _kron(F, mi.data, m.data.T)))
    return Representation(rep.dim**2, tuple(imgs), f"End({rep.label})", F, tuple(invs))


def dual(rep: Representation) -> Representation:
    F = rep.field
    imgs = tuple(Mat(F, mi.data.T.copy()) for mi in rep.gen_inverses)
    invs = tuple(Mat(F, m.data.T.copy()) for m in rep.gen_images)
    return Representation(rep.dim, imgs, f"({rep.label})*", F, invs)


def tensor(rep1: Representation, rep2: Representation) -> Representation:
    F = rep1.field
    imgs = tuple(Mat(F, _kron(F, a.data, b.data)) for a, b in zip(rep1.gen_images, rep2.gen_images))
    invs = tuple(Mat(F, _kron(F, a.data, b.data)) for a, b in zip(rep1.gen_inverses, rep2.gen_inverses))
    return Representation(rep1.dim * rep2.dim, imgs, f"{rep1.label} (x) {rep2.label}", F, invs)


def trivial(field: FieldCtx, k: int, dim: int = 1) -> Representation:
    one = Mat.identity(field, dim)
    return Representation(dim, tuple([one] * k), "trivial" if dim == 1 else f"trivial^{dim}", field)


def _check_aligned(rep: Representation, ctx: GroupCtx) -> None:
    if len(rep.gen_images) != ctx.k:
        raise ValueError(
            f"representation has {len(rep.gen_images)} generator images, group has {ctx.k} generators"
        )
    if rep.field is not ctx.field:
        raise ValueError("representation and group are over different fields")


class ImageTable:
    """Images of group elements, built layer by layer along the BFS tree.

    If the full table does not fit ``budget`` bytes, images are recomputed
    from tree words on demand instead.
    """

    def __init__(self, rep: Representation, ctx: GroupCtx, budget: int = DEFAULT_MEMORY_BUDGET):
        _check_aligned(rep, ctx)
        self.rep = rep
        self.ctx = ctx
        n = rep.dim
        nbytes = ctx.order * n * n * np.dtype(rep.field.dtype).itemsize
        self.cached = nbytes <= budget
        self._steps = rep.steps
        self._table = None
        self._layers_built = 0
        if self.cached:
            self._table = np.empty((ctx.order, n, n), dtype=rep.field.dtype)
            self._table[0] = np.eye(n, dtype=rep.field.dtype)
            self._layers_built = 1

    def _build_through(self, index: int) -> None:
        ctx = self.ctx
        starts = ctx.layer_starts
        F = self.rep.field
        while self._layers_built < len(starts) - 1 and starts[self._layers_built] <= index:
            lo, hi = int(starts[self._layers_built]), int(starts[self._layers_built + 1])
            par = ctx.parent[lo:hi]
            lab = ctx.label[lo:hi]
            self._table[lo:hi] = F.matmul(self._table[par], self._steps[lab])
            self._layers_built += 1

    def get(self, indices) -> np.ndarray:
        idx = np.atleast_1d(np.asarray(indices, dtype=np.int64))
        if idx.size == 0:
            return np.zeros((0, self.rep.dim, self.rep.dim), dtype=self.rep.field.dtype)
        if self.cached:
            self._build_through(int(idx.max()))
            return self._table[idx]
        return np.stack([self._by_word(int(i)) for i in idx])

    def _by_word(self, g: int) -> np.ndarray:
        F = self.rep.field
        out = np.eye(self.rep.dim, dtype=F.dtype)
        k = self.ctx.k
        for s, e in word_for(self.ctx, g):
            out = F.matmul(out, self._steps[s if e > 0 else s + k])
        return out

    def all(self) -> np.ndarray:
        return self.get(np.arange(self.ctx.order))


def evaluate(rep: Representation, ctx: GroupCtx, g: int, table: ImageTable | None = None) -> Mat:
    """Image of element ``g``: the product of generator images along its word."""
    if table is None:
        _check_aligned(rep, ctx)
        t = ImageTable(rep, ctx, budget=0)
        return Mat(rep.field, t.get([g])[0])
    return Mat(rep.field, table.get([g])[0])


def _filtered_chunks(ctx: GroupCtx, filter: str, chunk: int):
    """Element indices passing ``filter``, in BFS order, a chunk at a time."""
    if filter not in ("all", "p_regular"):
        raise ValueError(f"unknown filter {filter!r}")
    m = p_prime_part(ctx.order, ctx.field.p)
    eye = np.eye(ctx.n, dtype=ctx.field.dtype)
    for lo in range(0, ctx.order, chunk):
        idx = np.arange(lo, min(lo + chunk, ctx.order))
        if filter == "p_regular":
            powd = batch_power(ctx.field, ctx.elements[idx], m)
            idx = idx[np.all(powd == eye, axis=(1, 2))]
        if idx.size:
            yield idx


def envelope_dimension(rep: Representation, ctx: GroupCtx, filter: str = "all",
                       chunk: int = 512, table: ImageTable | None = None) -> int:
    """Dimension of the span of {rho(g)} inside the n^2-dimensional matrix space.

    Elements are fed in BFS discovery order; stops as soon as the span is
    everything.
    """
    _check_aligned(rep, ctx)
    table = table or ImageTable(rep, ctx)
    n2 = rep.dim**2
    basis = EchelonBasis(rep.field, n2)
    for idx in _filtered_chunks(ctx, filter, chunk):
        basis.add(table.get(idx).reshape(-1, n2))
        if basis.full:
            break
    return basis.rank


def spin_envelope_dimension(rep: Representation, ctx: GroupCtx, filter: str = "p_regular",
                            chunk: int = 512, table: ImageTable | None = None) -> int:
    """Same span, computed as the conjugation-submodule generated by the images.

    Each image not yet in the span is spun under X -> A X A^-1 for the
    generator images A; the span of a conjugation-stable set of images is
    the submodule it generates, so both methods must agree.
    """
    _check_aligned(rep, ctx)
    F = rep.field
    table = table or ImageTable(rep, ctx)
    n = rep.dim
    n2 = n * n
    basis = EchelonBasis(F, n2)
    imgs = rep.images
    invs = rep.inverse_images

    def spin(vec):
        queue = [vec]
        while queue and not basis.full:
            v = queue.pop()
            res = basis.reduce(v[None])[0]
            if not res.any():
                continue
            basis.add(res[None])
            x = res.reshape(n, n)
            conj = F.matmul(F.matmul(imgs, x[None]), invs).reshape(-1, n2)
            queue.extend(conj)

    for idx in _filtered_chunks(ctx, filter, chunk):
        block = table.get(idx).reshape(-1, n2)
        while len(block) and not basis.full:
            res = basis.reduce(block)
            hit = np.flatnonzero(np.any(res != 0, axis=1))
            if hit.size == 0:
                break
            spin(block[hit[0]])
            block = block[hit[0] + 1:]
        if basis.full:
            break
    return basis.rank


def fixed_space(rep: Representation) -> np.ndarray:
    """Basis (rows) of the common fixed space of the generator images."""
    F = rep.field
    n = rep.dim
    eye = np.eye(n, dtype=F.dtype)
    stacked = np.concatenate([F.sub_table[m.data, eye] for m in rep.gen_images])
    return linalg.nullspace(F, stacked)


def kernel_order(rep: Representation, ctx: GroupCtx, table: ImageTable | None = None) -> int:
    table = table or ImageTable(rep, ctx)
    n = rep.dim
    eye = np.eye(n, dtype=rep.field.dtype)
    count = 0
    for lo in range(0, ctx.order, 1 << 16):
        imgs = table.get(np.arange(lo, min(lo + (1 << 16), ctx.order)))
        count += int(np.all(imgs == eye, axis=(1, 2)).sum())
    return count
