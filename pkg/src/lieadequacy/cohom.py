"""First cohomology H^1(G, M) of an enumerated matrix group.

A 1-cocycle is determined by its values f(s) on the k generators, so Z^1
is the subspace of M^k cut out by the requirement that every Schreier
relator evaluates to zero under the expansion

    f(xy) = f(x) + x.f(y),        f(s^-1) = -s^-1.f(s).

Why these constraints suffice: the Schreier relators generate the kernel K
of the free-group surjection F_k -> G *as a subgroup*.  Any assignment on
the generators extends uniquely to a derivation of F_k (acting on M through
G), and its restriction to K is a homomorphism K -> M because K acts
trivially.  Vanishing on a generating set of K therefore means vanishing on
all of K, which is exactly the condition for the derivation to descend to
G.  No verified presentation of G is needed.

The solver walks the BFS tree layer by layer carrying, for every element g,
its matrix on M and the value f(word(g)) as a linear function of the
current solution coordinates.  Each non-tree edge (g, s) contributes the
block  f(word g) + g.f(s) - f(word gs) = 0.  Whenever the constraints cut
the solution space, all carried values are re-expressed in the smaller
coordinates, so memory and work shrink as the computation proceeds.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field as dc_field
from typing import Callable

import numpy as np

from .gf import FieldCtx
from . import linalg
from .matgrp import GroupCtx, Mat, batch_keys
from .rep import ImageTable, Representation, fixed_space

DEFAULT_FULL_CAP = int(os.environ.get("LIEADEQUACY_FULL_H1_CAP", "100000"))
BRUTEFORCE_CAP = 2000


class H1CapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class ModuleAction:
    dim: int
    gen_actions: tuple[Mat, ...]
    field: FieldCtx
    label: str = "M"
    gen_inverses: tuple[Mat, ...] = dc_field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if not self.gen_inverses:
            object.__setattr__(self, "gen_inverses", tuple(m.inverse() for m in self.gen_actions))

    @classmethod
    def from_representation(cls, rep: Representation) -> "ModuleAction":
        return cls(rep.dim, rep.gen_images, rep.field, rep.label, rep.gen_inverses)

    def as_representation(self) -> Representation:
        return Representation(self.dim, self.gen_actions, self.label, self.field, self.gen_inverses)


def trivial_module(field: FieldCtx, k: int) -> ModuleAction:
    one = Mat.identity(field, 1)
    return ModuleAction(1, tuple([one] * k), field, "trivial")


@dataclass(frozen=True)
class H1Result:
    dim_z1: int
    dim_b1: int
    dim_h1: int
    relators_processed: int
    early_exit: bool
    mode: str = "full"

    def to_dict(self) -> dict:
        return asdict(self)


def _check(ctx: GroupCtx, action: ModuleAction) -> None:
    if len(action.gen_actions) != ctx.k:
        raise ValueError(f"module has {len(action.gen_actions)} generator actions, group has {ctx.k}")
    if action.field is not ctx.field:
        raise ValueError("module and group are over different fields")


def coboundary_dimension(action: ModuleAction) -> int:
    return action.dim - len(fixed_space(action.as_representation()))


def _coboundary_basis(action: ModuleAction) -> np.ndarray:
    """Columns (k*m, m): the coboundary of each basis vector of M."""
    F = action.field
    m = action.dim
    eye = np.eye(m, dtype=F.dtype)
    return np.concatenate([F.sub_table[a.data, eye] for a in action.gen_actions])


class _Window:
    """Carried state R(g), F(g) for a contiguous run of element indices."""

    def __init__(self, m: int, d: int, dtype):
        self.lo = 0
        self.R = np.zeros((0, m, m), dtype=dtype)
        self.Fv = np.zeros((0, m, d), dtype=dtype)

    @property
    def hi(self) -> int:
        return self.lo + len(self.R)

    def append(self, R, Fv):
        self.R = np.concatenate([self.R, R])
        self.Fv = np.concatenate([self.Fv, Fv])

    def drop_below(self, idx: int):
        cut = idx - self.lo
        if cut > 0:
            self.R = self.R[cut:]
            self.Fv = self.Fv[cut:]
            self.lo = idx


def h1_dimension(ctx: GroupCtx, action: ModuleAction, mode: str = "full", *,
                 full_cap: int | None = None, chunk_nodes: int = 256,
                 check_coboundaries: bool = True, shuffle_seed: int | None = None) -> H1Result:
    """dim H^1(G, M) from the Schreier relator constraints.

    ``mode="certify_zero"`` stops as soon as the cocycle space has shrunk to
    the coboundaries (H^1 = 0 certified).  If the relators run out first the
    answer is still exact.  Groups above ``full_cap`` are only accepted in
    certify_zero mode, and only the first ``full_cap`` nodes' relators are
    streamed before giving up with :class:`H1CapExceeded`.

    ``shuffle_seed`` processes all relators in a random order instead of
    layer order (small groups only; used to test order independence).
    """
    if mode not in ("full", "certify_zero"):
        raise ValueError(f"unknown mode {mode!r}")
    _check(ctx, action)
    full_cap = DEFAULT_FULL_CAP if full_cap is None else full_cap
    big = ctx.order > full_cap
    if big and mode == "full":
        raise H1CapExceeded(f"|G| = {ctx.order} exceeds the full-mode cap {full_cap}")

    F = action.field
    k, m = ctx.k, action.dim
    km = k * m
    steps = np.concatenate([np.stack([a.data for a in action.gen_actions]),
                            np.stack([a.data for a in action.gen_inverses])])
    dim_b1 = coboundary_dimension(action)
    cob = _coboundary_basis(action)

    N = np.eye(km, dtype=F.dtype)  # columns span the current solution space
    d = km
    processed = 0

    def fsteps(N):
        # f(step) as (2k, m, d): generators, then inverses
        pos = N.reshape(k, m, -1)
        neg = F.neg_table[F.matmul(steps[k:], pos)]
        return np.concatenate([pos, neg])

    fs = fsteps(N)
    win = _Window(m, d, F.dtype)
    win.append(np.eye(m, dtype=F.dtype)[None], np.zeros((1, m, d), dtype=F.dtype))

    def build_layer(lo: int, hi: int):
        par = ctx.parent[lo:hi]
        lab = ctx.label[lo:hi]
        Rp = win.R[par - win.lo]
        Fp = win.Fv[par - win.lo]
        R = np.empty((hi - lo, m, m), dtype=F.dtype)
        Fv = np.empty((hi - lo, m, win.Fv.shape[2]), dtype=F.dtype)
        for l in np.unique(lab):
            sel = np.flatnonzero(lab == l)
            R[sel] = F.matmul(Rp[sel], steps[l])
            Fv[sel] = F.add_table[Fp[sel], F.matmul(Rp[sel], fs[l])]
        win.append(R, Fv)

    def constraints(nodes: np.ndarray, gens: np.ndarray) -> np.ndarray:
        tgt = ctx.nbr[nodes, gens]
        Rg = win.R[nodes - win.lo]
        Fg = win.Fv[nodes - win.lo]
        Ft = win.Fv[tgt - win.lo]
        out = np.empty_like(Fg)
        for s in np.unique(gens):
            sel = np.flatnonzero(gens == s)
            out[sel] = F.matmul(Rg[sel], fs[s])
        out = F.sub_table[F.add_table[Fg, out], Ft]
        return out.reshape(-1, out.shape[2])

    def impose(rows: np.ndarray) -> None:
        nonlocal N, d, fs
        rows = rows[np.any(rows != 0, axis=1)]
        if rows.shape[0] == 0:
            return
        K = linalg.nullspace(F, rows).T  # (d, d')
        N = F.matmul(N, K)
        d = K.shape[1]
        fs = fsteps(N)
        win.Fv = F.matmul(win.Fv, K)
        if check_coboundaries and linalg.rank(F, np.concatenate([N, cob], axis=1)) != d:
            raise RuntimeError("coboundaries left the cocycle space: Schreier data inconsistent")

    def non_tree(nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        g = np.repeat(nodes, k)
        s = np.tile(np.arange(k), len(nodes))
        tgt = ctx.nbr[g, s]
        tree = ((ctx.parent[tgt] == g) & (ctx.label[tgt] == s)) | (
            (ctx.parent[g] == tgt) & (ctx.label[g] == s + k))
        return g[~tree], s[~tree]

    starts = ctx.layer_starts
    nlayers = len(starts) - 1
    early = False

    if shuffle_seed is not None:
        if big:
            raise H1CapExceeded("shuffled relator order needs the whole group in memory")
        for L in range(1, nlayers):
            build_layer(int(starts[L]), int(starts[L + 1]))
        g, s = non_tree(np.arange(ctx.order))
        perm = np.random.default_rng(shuffle_seed).permutation(len(g))
        g, s = g[perm], s[perm]
        step = max(1, chunk_nodes)
        for lo in range(0, len(g), step):
            impose(constraints(g[lo:lo + step], s[lo:lo + step]))
            processed += len(g[lo:lo + step])
            if d == 0 or (mode == "certify_zero" and d == dim_b1):
                early = lo + step < len(g)
                break
    else:
        done = False
        for L in range(nlayers):
            lo, hi = int(starts[L]), int(starts[L + 1])
            # relators out of layer L reach layers L-1, L and L+1
            if L + 1 < nlayers:
                build_layer(hi, int(starts[L + 2]))
            for c in range(lo, hi, chunk_nodes):
                nodes = np.arange(c, min(c + chunk_nodes, hi))
                if big and nodes[-1] >= full_cap:
                    raise H1CapExceeded(
                        f"H^1 = 0 not certified within the first {full_cap} elements of |G| = {ctx.order}")
                g, s = non_tree(nodes)
                if len(g):
                    impose(constraints(g, s))
                processed += len(g)
                # d == 0 leaves nothing to cut, in either mode
                if d == 0 or (mode == "certify_zero" and d == dim_b1):
                    done = True
                    early = processed < (k * ctx.order - ctx.order + 1)
                    break
            if done:
                break
            win.drop_below(lo)

    if check_coboundaries and linalg.rank(F, np.concatenate([N, cob], axis=1)) != d:
        raise RuntimeError("coboundaries are not cocycles")  # pragma: no cover
    return H1Result(d, dim_b1, d - dim_b1, processed, early, mode)


def _element_actions(ctx: GroupCtx, action: ModuleAction,
                     element_action: Callable[[np.ndarray], np.ndarray] | None) -> np.ndarray:
    if element_action is not None:
        return np.asarray(element_action(ctx.elements), dtype=action.field.dtype)
    return ImageTable(action.as_representation(), ctx).all()


def h1_bruteforce(ctx: GroupCtx, action: ModuleAction,
                  element_action: Callable[[np.ndarray], np.ndarray] | None = None,
                  cap: int = BRUTEFORCE_CAP) -> H1Result:
    """dim H^1 from the all-pairs system f(xy) = f(x) + x.f(y) over all of G.

    Independent of the Schreier machinery: values are first propagated from
    free elements chosen greedily in canonical-key order, then every pair
    (x, y) of the multiplication table is imposed.  ``element_action`` maps
    the stacked group matrices to module matrices directly; without it the
    module matrices come from tree words.  Coboundaries are counted from the
    fixed space of all element matrices.
    """
    _check(ctx, action)
    if ctx.order > cap:
        raise H1CapExceeded(f"|G| = {ctx.order} exceeds the brute-force cap {cap}")
    F = action.field
    G, m = ctx.order, action.dim
    rho = _element_actions(ctx, action, element_action)
    mult = np.stack([ctx.left_mult_row(x) for x in range(G)])  # mult[x, y] = index of x*y
    key_order = np.argsort(batch_keys(ctx.field, ctx.elements), kind="stable")

    # values stored as (m, G, D): column block g holds f(g) as an m x D matrix
    dim_params = 0
    vals = np.zeros((m, G, 0), dtype=F.dtype)
    known = np.zeros(G, dtype=bool)
    free: list[int] = []
    for g in key_order:
        if known[g]:
            continue
        free.append(int(g))
        vals = np.concatenate([vals, np.zeros((m, G, m), dtype=F.dtype)], axis=2)
        vals[:, g, dim_params:dim_params + m] = np.eye(m, dtype=F.dtype)
        dim_params += m
        known[g] = True
        frontier = np.flatnonzero(known)
        while frontier.size:
            grown = []
            for h in free:
                tgt = mult[frontier, h]
                new = ~known[tgt]
                if not new.any():
                    continue
                tgt_new, first = np.unique(tgt[new], return_index=True)
                src = frontier[new][first]
                # f(x h) = f(x) + x.f(h)
                xh = F.matmul(rho[src], np.broadcast_to(vals[:, h, :], (len(src), m, dim_params)))
                vals[:, tgt_new, :] = np.moveaxis(
                    F.add_table[np.moveaxis(vals[:, src, :], 0, 1), xh], 0, 1)
                known[tgt_new] = True
                grown.append(tgt_new)
            frontier = np.unique(np.concatenate(grown)) if grown else np.zeros(0, dtype=np.int64)

    D = dim_params
    for x in range(G):
        if D == 0:
            break
        flat = vals.reshape(m, G * D)
        rx = F.matmul(rho[x], flat).reshape(m, G, D)
        lhs = F.add_table[vals[:, x, :][:, None, :], rx]
        res = F.sub_table[lhs, vals[:, mult[x], :]].reshape(m * G, D)
        res = res[np.any(res != 0, axis=1)]
        if res.shape[0]:
            K = linalg.nullspace(F, res).T
            D = K.shape[1]
            vals = F.matmul(vals, K)

    eye = np.eye(m, dtype=F.dtype)
    fixed = linalg.nullspace(F, F.sub_table[rho, eye].reshape(G * m, m))
    dim_b1 = m - len(fixed)
    return H1Result(D, dim_b1, D - dim_b1, G * G, False, "bruteforce")


def hom_to_additive(ctx: GroupCtx, field: FieldCtx | None = None, **kw) -> int:
    """dim Hom(G, k^+) = dim H^1(G, k) for the trivial module."""
    field = field or ctx.field
    res = h1_dimension(ctx, trivial_module(field, ctx.k), mode="certify_zero", **kw)
    return res.dim_h1
