"""Finite matrix groups over GF(q): enumeration, words, Schreier relators.

Groups are enumerated by breadth-first search of the right Cayley graph on
the generators and their inverses.  The search tree gives every element a
word; the non-tree edges give the Schreier relators, which generate the
kernel of the free-group surjection as a subgroup.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .gf import FieldCtx, FieldElem
from . import linalg

DEFAULT_ELEMENT_CAP = int(os.environ.get("LIEADEQUACY_ELEMENT_CAP", "2000000"))

Word = list[tuple[int, int]]


class GroupCapExceeded(RuntimeError):
    def __init__(self, cap: int, found: int):
        super().__init__(f"group enumeration exceeded cap {cap} ({found} elements found so far)")
        self.cap = cap
        self.found = found


class Mat:
    """Square matrix over a :class:`FieldCtx`, stored as an array of keys."""

    __slots__ = ("field", "data")

    def __init__(self, field: FieldCtx, data):
        arr = field.asarray(data)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {arr.shape}")
        if np.any((arr < 0) | (arr >= field.q)):
            raise ValueError("matrix entry out of range for the field")
        self.field = field
        self.data = arr

    @classmethod
    def identity(cls, field: FieldCtx, n: int) -> "Mat":
        return cls(field, np.eye(n, dtype=field.dtype))

    @classmethod
    def from_elems(cls, field: FieldCtx, rows: Sequence[Sequence]) -> "Mat":
        return cls(field, [[field(x).key for x in row] for row in rows])

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def key(self) -> int:
        """Entry keys concatenated row-major, most significant first."""
        k = 0
        for e in self.data.ravel().tolist():
            k = k * self.field.q + e
        return k

    def entry(self, i: int, j: int) -> FieldElem:
        return FieldElem(self.field, self.data[i, j])

    def __matmul__(self, other: "Mat") -> "Mat":
        if other.field is not self.field:
            raise ValueError("matrices over different fields")
        return Mat(self.field, self.field.matmul(self.data, other.data))

    def inverse(self) -> "Mat":
        return Mat(self.field, linalg.inverse(self.field, self.data))

    def det(self) -> FieldElem:
        return FieldElem(self.field, linalg.det(self.field, self.data))

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.data, np.eye(self.n, dtype=self.data.dtype)))

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return self.field is other.field and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.field.q, self.key))

    def tolist(self) -> list[list[int]]:
        return self.data.tolist()

    def __repr__(self):
        return f"Mat(GF({self.field.q}), {self.tolist()})"


def batch_keys(field: FieldCtx, mats: np.ndarray) -> np.ndarray:
    """Canonical keys for a stack of matrices, shape (N, n, n) -> (N,)."""
    flat = np.asarray(mats).reshape(len(mats), -1).astype(np.int64)
    width = flat.shape[1]
    if field.q**width < 2**63:
        keys = np.zeros(len(flat), dtype=np.int64)
        for c in range(width):
            keys = keys * field.q + flat[:, c]
        return keys
    # wide matrices: compare raw (big-endian) bytes, which preserves the order
    raw = np.ascontiguousarray(flat.astype(">i4"))
    return raw.view(np.dtype((np.void, 4 * width))).ravel()


@dataclass(frozen=True)
class SchreierRelator:
    word: tuple[tuple[int, int], ...]
    source: tuple[int, int]


class GroupCtx:
    """A fully enumerated matrix group.

    ``label[i]`` is the Cayley-graph label of the tree edge reaching ``i``:
    ``0..k-1`` mean right multiplication by a generator, ``k..2k-1`` by the
    inverse of generator ``label - k``.  ``nbr[i, l]`` is the index of
    ``elements[i] * step_l``.
    """

    def __init__(self, field, gens, gen_inverses, elements, keys, parent, label, depth, nbr, layer_starts):
        self.field = field
        self.gens = gens
        self.gen_inverses = gen_inverses
        self.elements = elements
        self._keys = keys
        self._key_order = np.argsort(keys, kind="stable")
        self._sorted_keys = keys[self._key_order]
        self.parent = parent
        self.label = label
        self.depth = depth
        self.nbr = nbr
        self.layer_starts = layer_starts
        for arr in (elements, parent, label, depth, nbr, layer_starts):
            arr.setflags(write=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def k(self) -> int:
        return len(self.gens)

    @property
    def n(self) -> int:
        return self.elements.shape[1]

    def element(self, i: int) -> Mat:
        return Mat(self.field, self.elements[i])

    def tree(self, i: int) -> tuple[int, int, int] | None:
        """(parent index, generator, sign) for a non-identity element."""
        if i == 0:
            return None
        lab = int(self.label[i])
        k = self.k
        return int(self.parent[i]), lab % k, 1 if lab < k else -1

    def indices_of(self, mats: np.ndarray) -> np.ndarray:
        """Element indices for a stack of matrices; -1 where not in the group."""
        keys = batch_keys(self.field, mats)
        pos = np.searchsorted(self._sorted_keys, keys)
        pos = np.minimum(pos, len(self._sorted_keys) - 1)
        hit = self._sorted_keys[pos] == keys
        return np.where(hit, self._key_order[pos], -1)

    def index_of(self, mat: Mat | np.ndarray) -> int:
        data = mat.data if isinstance(mat, Mat) else np.asarray(mat)
        idx = int(self.indices_of(data[None])[0])
        if idx < 0:
            raise KeyError("matrix is not an element of the group")
        return idx

    def multiply(self, i: int, j: int) -> int:
        return self.index_of(self.field.matmul(self.elements[i], self.elements[j]))

    def left_mult_row(self, i: int) -> np.ndarray:
        """Indices of elements[i] @ elements[j] for every j."""
        return self.indices_of(self.field.matmul(self.elements[i][None], self.elements))

    def is_tree_edge(self, g: int, s: int) -> bool:
        j = int(self.nbr[g, s])
        return (self.parent[j] == g and self.label[j] == s) or (
            int(self.parent[g]) == j and self.label[g] == s + self.k
        )

    def __repr__(self):
        return f"GroupCtx(order={self.order}, gens={self.k}, GF({self.field.q}))"


def enumerate_group(gens: Sequence[Mat], cap: int | None = None) -> GroupCtx:
    """Breadth-first closure of ``gens`` under right multiplication.

    At each frontier node the children are tried generator by generator,
    then inverse by inverse, so the element order is a pure function of the
    generator list.
    """
    cap = DEFAULT_ELEMENT_CAP if cap is None else cap
    if not gens:
        raise ValueError("need at least one generator")
    F = gens[0].field
    n = gens[0].n
    for g in gens:
        if g.field is not F or g.n != n:
            raise ValueError("generators must share field and dimension")
        if g.det().key == 0:
            raise np.linalg.LinAlgError(f"singular generator {g!r}")
    invs = [g.inverse() for g in gens]
    k = len(gens)
    steps = np.stack([g.data for g in gens] + [g.data for g in invs])
    two_k = 2 * k

    ident = np.eye(n, dtype=F.dtype)
    layers = [ident[None]]
    parent_parts = [np.array([-1], dtype=np.int64)]
    label_parts = [np.array([-1], dtype=np.int64)]
    depth_parts = [np.array([0], dtype=np.int64)]
    nbr_parts = []
    key_parts = [batch_keys(F, ident[None])]
    known_keys = key_parts[0]
    known_idx = np.array([0], dtype=np.int64)
    count = 1
    frontier = ident[None]
    frontier_idx = np.array([0], dtype=np.int64)
    layer_starts = [0]
    depth = 0
    while len(frontier):
        L = len(frontier)
        cand = F.matmul(frontier[:, None], steps[None]).reshape(L * two_k, n, n)
        ck = batch_keys(F, cand)
        pos = np.minimum(np.searchsorted(known_keys, ck), len(known_keys) - 1)
        found = known_keys[pos] == ck
        idx = np.full(L * two_k, -1, dtype=np.int64)
        idx[found] = known_idx[pos[found]]
        fresh = np.flatnonzero(~found)
        if fresh.size:
            uniq, first, inv = np.unique(ck[fresh], return_index=True, return_inverse=True)
            # number the new elements in order of first discovery
            order = np.argsort(first, kind="stable")
            rank_of = np.empty_like(order)
            rank_of[order] = np.arange(len(order))
            nnew = len(uniq)
            if count + nnew > cap:
                raise GroupCapExceeded(cap, count + nnew)
            idx[fresh] = count + rank_of[inv.ravel()]
            first_pos = fresh[first[order]]
            new_idx = np.arange(count, count + nnew, dtype=np.int64)
            parent_parts.append(frontier_idx[first_pos // two_k])
            label_parts.append(first_pos % two_k)
            depth_parts.append(np.full(nnew, depth + 1, dtype=np.int64))
            new_mats = cand[first_pos]
            new_keys = ck[first_pos]
            layers.append(new_mats)
            key_parts.append(new_keys)
            all_keys = np.concatenate([known_keys, new_keys])
            all_idx = np.concatenate([known_idx, new_idx])
            srt = np.argsort(all_keys, kind="stable")
            known_keys, known_idx = all_keys[srt], all_idx[srt]
            count += nnew
            layer_starts.append(int(new_idx[0]))
            frontier, frontier_idx = new_mats, new_idx
        else:
            frontier = frontier[:0]
            frontier_idx = frontier_idx[:0]
        nbr_parts.append(idx.reshape(L, two_k))
        depth += 1

    elements = np.concatenate(layers)
    layer_starts.append(count)
    return GroupCtx(
        field=F,
        gens=list(gens),
        gen_inverses=invs,
        elements=elements,
        keys=np.concatenate(key_parts),
        parent=np.concatenate(parent_parts),
        label=np.concatenate(label_parts),
        depth=np.concatenate(depth_parts),
        nbr=np.concatenate(nbr_parts),
        layer_starts=np.array(layer_starts, dtype=np.int64),
    )


def sl2_generators(field: FieldCtx) -> list[Mat]:
    """u = [[1,1],[0,1]], t = diag(zeta, zeta^-1), w = [[0,1],[-1,0]]."""
    z = field.zeta
    one, zero = field.one, field.zero
    u = Mat.from_elems(field, [[one, one], [zero, one]])
    t = Mat.from_elems(field, [[z, zero], [zero, z.inv()]])
    w = Mat.from_elems(field, [[zero, one], [-one, zero]])
    return [u, t, w]


def gl2_generators(field: FieldCtx) -> list[Mat]:
    one, zero = field.one, field.zero
    d = Mat.from_elems(field, [[field.zeta, zero], [zero, one]])
    return sl2_generators(field) + [d]


def p_prime_part(n: int, p: int) -> int:
    while n % p == 0:
        n //= p
    return n


def batch_power(field: FieldCtx, mats: np.ndarray, e: int) -> np.ndarray:
    n = mats.shape[-1]
    result = np.broadcast_to(np.eye(n, dtype=field.dtype), mats.shape).copy()
    base = np.array(mats, dtype=field.dtype)
    while e:
        if e & 1:
            result = field.matmul(result, base)
        e >>= 1
        if e:
            base = field.matmul(base, base)
    return result


def p_regular_mask(ctx: GroupCtx, chunk: int = 1 << 18) -> np.ndarray:
    """Boolean mask of elements whose order is prime to p."""
    m = p_prime_part(ctx.order, ctx.field.p)
    n = ctx.n
    eye = np.eye(n, dtype=ctx.field.dtype)
    out = np.empty(ctx.order, dtype=bool)
    for lo in range(0, ctx.order, chunk):
        powd = batch_power(ctx.field, ctx.elements[lo:lo + chunk], m)
        out[lo:lo + chunk] = np.all(powd == eye, axis=(1, 2))
    return out


def is_p_regular(ctx: GroupCtx, g: int) -> bool:
    m = p_prime_part(ctx.order, ctx.field.p)
    powd = batch_power(ctx.field, ctx.elements[g][None], m)[0]
    return bool(np.array_equal(powd, np.eye(ctx.n, dtype=powd.dtype)))


def element_order(ctx: GroupCtx, g: int) -> int:
    x = ctx.elements[g]
    cur = x
    o = 1
    eye = np.eye(ctx.n, dtype=x.dtype)
    while not np.array_equal(cur, eye):
        cur = ctx.field.matmul(cur, x)
        o += 1
    return o


def word_for(ctx: GroupCtx, g: int) -> Word:
    """Generator word (gen, sign) spelling element ``g`` along the BFS tree."""
    out = []
    k = ctx.k
    while g != 0:
        lab = int(ctx.label[g])
        out.append((lab % k, 1 if lab < k else -1))
        g = int(ctx.parent[g])
    out.reverse()
    return out


def invert_word(word: Sequence[tuple[int, int]]) -> Word:
    return [(s, -e) for s, e in reversed(word)]


def evaluate_word(field: FieldCtx, images: Sequence[np.ndarray], inverses: Sequence[np.ndarray],
                  word: Sequence[tuple[int, int]], n: int) -> np.ndarray:
    out = np.eye(n, dtype=field.dtype)
    for s, e in word:
        out = field.matmul(out, images[s] if e > 0 else inverses[s])
    return out


def schreier_relators(ctx: GroupCtx) -> Iterator[SchreierRelator]:
    """One relator word(g) * s * word(g s)^-1 per non-tree edge (g, s)."""
    k = ctx.k
    for g in range(ctx.order):
        wg = None
        for s in range(k):
            if ctx.is_tree_edge(g, s):
                continue
            if wg is None:
                wg = word_for(ctx, g)
            j = int(ctx.nbr[g, s])
            word = tuple(wg + [(s, 1)] + invert_word(word_for(ctx, j)))
            yield SchreierRelator(word=word, source=(g, s))


def relator_count(ctx: GroupCtx) -> int:
    return ctx.k * ctx.order - (ctx.order - 1)
