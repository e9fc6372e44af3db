"""Root systems, weight multiplicities, and torus-side hypothesis audits.

Conventions: Bourbaki numbering of simple roots; the Cartan matrix has
entries ``C[i][j] = <alpha_i, alpha_j^vee>``, so row ``i`` is the simple root
``alpha_i`` written in fundamental-weight coordinates.  Weights are integer
tuples in fundamental coordinates; roots are integer tuples in the simple
root basis.
"""

from __future__ import annotations

from collections import deque
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import cached_property
from math import prod
from typing import Iterable, Sequence

Weight = tuple[int, ...]

COXETER = {"E": {6: 12, 7: 18, 8: 30}, "F": {4: 12}, "G": {2: 6}}

LATTICE_READING = "full character lattice X(T): alpha - beta must not lie in m * X(T)"


class RootDataError(ValueError):
    pass


def cartan_matrix(kind: str, rank: int) -> list[list[int]]:
    kind = kind.upper()
    valid = {
        "A": rank >= 1,
        "B": rank >= 2,
        "C": rank >= 2,
        "D": rank >= 4,
        "E": rank in (6, 7, 8),
        "F": rank == 4,
        "G": rank == 2,
    }
    if not valid.get(kind, False):
        raise RootDataError(f"no simple root system of type {kind}{rank}")
    n = rank
    C = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, a=-1, b=-1):
        C[i][j], C[j][i] = a, b

    if kind in "ABCDF" and kind != "F":
        chain = n if kind in "ABC" else n - 1
        for i in range(chain - 1):
            link(i, i + 1)
    if kind == "B":
        link(n - 2, n - 1, -2, -1)
    elif kind == "C":
        link(n - 2, n - 1, -1, -2)
    elif kind == "D":
        link(n - 3, n - 1)
    elif kind == "E":
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
    elif kind == "F":
        link(0, 1)
        link(1, 2, -2, -1)
        link(2, 3)
    elif kind == "G":
        link(0, 1, -1, -3)
    return C


def coxeter_number(kind: str, rank: int) -> int:
    kind = kind.upper()
    cartan_matrix(kind, rank)
    if kind == "A":
        return rank + 1
    if kind in "BC":
        return 2 * rank
    if kind == "D":
        return 2 * rank - 2
    return COXETER[kind][rank]


def _symmetrizer(C: list[list[int]]) -> list[Fraction]:
    """d_i = (alpha_i, alpha_i)/2 with the shortest simple roots at d = 1."""
    n = len(C)
    d: list[Fraction | None] = [None] * n
    d[0] = Fraction(1)
    todo = [0]
    while todo:
        i = todo.pop()
        for j in range(n):
            if j != i and C[i][j] != 0 and d[j] is None:
                # C[i][j] d_j = C[j][i] d_i
                d[j] = Fraction(C[j][i]) * d[i] / C[i][j]
                todo.append(j)
    low = min(d)
    return [x / low for x in d]


def _inverse(M: list[list[int]]) -> list[list[Fraction]]:
    n = len(M)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        lead = a[c][c]
        a[c] = [x / lead for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


@dataclass(frozen=True)
class RootSystemCtx:
    type: str
    rank: int
    cartan: tuple[tuple[int, ...], ...]
    positive_roots: tuple[tuple[int, ...], ...]
    rho: Weight
    coxeter_h: int
    d: tuple[Fraction, ...]

    @property
    def name(self) -> str:
        return f"{self.type}{self.rank}"

    def root_to_weight(self, root: Sequence[int]) -> Weight:
        n = self.rank
        return tuple(sum(root[j] * self.cartan[j][i] for j in range(n)) for i in range(n))

    @cached_property
    def positive_roots_fund(self) -> tuple[Weight, ...]:
        return tuple(self.root_to_weight(r) for r in self.positive_roots)

    @cached_property
    def _root_norms(self) -> tuple[Fraction, ...]:
        # (alpha, alpha) / 2 for every positive root
        n = self.rank
        out = []
        for r in self.positive_roots:
            s = sum(r[i] * r[j] * self.cartan[i][j] * self.d[j] for i in range(n) for j in range(n))
            out.append(Fraction(s, 2))
        return tuple(out)

    @cached_property
    def _root_pair(self) -> tuple[tuple[Fraction, ...], ...]:
        # (mu, alpha) = sum_j c_j d_j mu_j
        return tuple(tuple(c * dj for c, dj in zip(r, self.d)) for r in self.positive_roots)

    @cached_property
    def gram(self) -> tuple[tuple[Fraction, ...], ...]:
        """(omega_i, omega_j)."""
        inv = _inverse([list(r) for r in self.cartan])
        n = self.rank
        return tuple(tuple(inv[j][i] * self.d[i] for j in range(n)) for i in range(n))

    def inner(self, mu: Sequence[int], nu: Sequence[int]) -> Fraction:
        g = self.gram
        n = self.rank
        return sum((mu[i] * nu[j] * g[i][j] for i in range(n) for j in range(n)), Fraction(0))

    def coroot_pairing(self, mu: Sequence[int], k: int) -> Fraction:
        """<mu, alpha^vee> for the k-th positive root."""
        return sum((c * m for c, m in zip(self._root_pair[k], mu)), Fraction(0)) / self._root_norms[k]

    def reflect(self, mu: Sequence[int], i: int) -> Weight:
        c = mu[i]
        if c == 0:
            return tuple(mu)
        row = self.cartan[i]
        return tuple(m - c * a for m, a in zip(mu, row))

    @cached_property
    def _dom_cache(self) -> dict[Weight, Weight]:
        return {}

    @cached_property
    def _parabolic_cache(self) -> dict[frozenset, int]:
        return {}

    def dominant_conjugate(self, mu: Sequence[int]) -> Weight:
        mu = tuple(mu)
        hit = self._dom_cache.get(mu)
        if hit is not None:
            return hit
        start = mu
        while True:
            for i, c in enumerate(mu):
                if c < 0:
                    mu = self.reflect(mu, i)
                    break
            else:
                self._dom_cache[start] = mu
                return mu

    def orbit(self, mu: Sequence[int]) -> list[Weight]:
        start = tuple(mu)
        seen = {start}
        out = [start]
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for i in range(self.rank):
                y = self.reflect(x, i)
                if y not in seen:
                    seen.add(y)
                    out.append(y)
                    queue.append(y)
        return out

    def weyl_order(self, support: Iterable[int] | None = None) -> int:
        """|W_J| for the parabolic subgroup on simple roots J (default: all)."""
        J = frozenset(range(self.rank)) if support is None else frozenset(support)
        hit = self._parabolic_cache.get(J)
        if hit is not None:
            return hit
        val = Fraction(1)
        for r in self.positive_roots:
            if all(c == 0 or i in J for i, c in enumerate(r)):
                h = sum(r)
                val *= Fraction(h + 1, h)
        self._parabolic_cache[J] = int(val)
        return int(val)

    def orbit_size(self, mu: Sequence[int]) -> int:
        dom = self.dominant_conjugate(mu)
        return self.weyl_order() // self.weyl_order(i for i, c in enumerate(dom) if c == 0)


def _positive_roots(C: list[list[int]]) -> list[tuple[int, ...]]:
    n = len(C)
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    roots = list(simple)
    known = set(roots)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for i in range(n):
                pairing = sum(beta[j] * C[j][i] for j in range(n))
                # alpha_i-string through beta: beta - r alpha_i ... beta + s alpha_i, r - s = <beta, alpha_i^vee>
                r = 0
                down = list(beta)
                while True:
                    down[i] -= 1
                    if tuple(down) in known:
                        r += 1
                    else:
                        break
                if r - pairing > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in known:
                        known.add(up)
                        roots.append(up)
                        nxt.append(up)
        layer = nxt
    roots.sort(key=lambda r: (sum(r), r))
    return roots


def root_system(kind: str, rank: int) -> RootSystemCtx:
    kind = kind.upper()
    C = cartan_matrix(kind, rank)
    return RootSystemCtx(
        type=kind,
        rank=rank,
        cartan=tuple(tuple(r) for r in C),
        positive_roots=tuple(_positive_roots(C)),
        rho=tuple([1] * rank),
        coxeter_h=coxeter_number(kind, rank),
        d=tuple(_symmetrizer(C)),
    )


def _as_weight(ctx: RootSystemCtx, lam) -> Weight:
    lam = (lam,) if isinstance(lam, int) else tuple(int(x) for x in lam)
    if len(lam) != ctx.rank:
        raise RootDataError(f"weight {lam} has {len(lam)} coordinates, rank is {ctx.rank}")
    return lam


def _require_dominant(lam: Weight) -> None:
    if any(c < 0 for c in lam):
        raise RootDataError(f"weight {lam} is not dominant")


def weyl_dim(ctx: RootSystemCtx, lam) -> int:
    """Weyl dimension formula, exact rational arithmetic."""
    lam = _as_weight(ctx, lam)
    _require_dominant(lam)
    shifted = tuple(a + 1 for a in lam)
    val = Fraction(1)
    for k in range(len(ctx.positive_roots)):
        val *= ctx.coroot_pairing(shifted, k) / ctx.coroot_pairing(ctx.rho, k)
    if val.denominator != 1:
        raise ArithmeticError(f"Weyl dimension {val} is not an integer")  # pragma: no cover
    return int(val)


def _dominant_below(ctx: RootSystemCtx, lam: Weight) -> dict[Weight, tuple[int, ...]]:
    """Dominant mu <= lam mapped to lam - mu in simple-root coordinates."""
    roots = list(zip(ctx.positive_roots_fund, ctx.positive_roots))
    below = {lam: (0,) * ctx.rank}
    queue = deque([lam])
    while queue:
        mu = queue.popleft()
        gap = below[mu]
        for rf, rc in roots:
            nu = tuple(m - a for m, a in zip(mu, rf))
            if min(nu) < 0 or nu in below:
                continue
            below[nu] = tuple(g + c for g, c in zip(gap, rc))
            queue.append(nu)
    return below


def dominant_weights_below(ctx: RootSystemCtx, lam) -> list[tuple[Weight, int]]:
    """Dominant mu <= lam with their depth (height of lam - mu), by depth."""
    lam = _as_weight(ctx, lam)
    _require_dominant(lam)
    items = [(mu, sum(g)) for mu, g in _dominant_below(ctx, lam).items()]
    return sorted(items, key=lambda kv: (kv[1], tuple(-c for c in kv[0])))


def dominant_multiplicities(ctx: RootSystemCtx, lam) -> dict[Weight, int]:
    """Freudenthal's recursion restricted to dominant weights.

    Non-dominant weights mu + k alpha are looked up through their dominant
    conjugate; each alpha-string through a weight is unbroken, so the inner
    sum stops at the first zero multiplicity.  Everything is integral once
    inner products are taken against roots: (mu, alpha) = sum c_j d_j mu_j,
    and |lam+rho|^2 - |mu+rho|^2 = (lam - mu, lam + mu + 2 rho).
    """
    lam = _as_weight(ctx, lam)
    _require_dominant(lam)
    below = _dominant_below(ctx, lam)
    order = sorted(below, key=lambda mu: (sum(below[mu]), tuple(-c for c in mu)))
    d = [int(x) for x in ctx.d]
    roots = [(rf, tuple(int(x) for x in pair), int(2 * norm))
             for rf, pair, norm in zip(ctx.positive_roots_fund, ctx._root_pair, ctx._root_norms)]
    mult: dict[Weight, int] = {}
    dom_cache = ctx._dom_cache
    n = ctx.rank

    for mu in order:
        gap = below[mu]
        if not any(gap):
            mult[mu] = 1
            continue
        total = 0
        for rf, pair, two_norm in roots:
            base = sum(c * m for c, m in zip(pair, mu))
            k = 1
            nu = mu
            while True:
                nu = tuple(a + b for a, b in zip(nu, rf))
                dom = dom_cache.get(nu)
                if dom is None:
                    dom = ctx.dominant_conjugate(nu)
                    dom_cache[nu] = dom
                mk = mult.get(dom, 0)
                if mk == 0:
                    break
                total += mk * (base + k * two_norm)
                k += 1
        den = sum(gap[i] * d[i] * (lam[i] + mu[i] + 2) for i in range(n))
        val, rem = divmod(2 * total, den)
        if rem:
            raise ArithmeticError(f"non-integral multiplicity at {mu}")  # pragma: no cover
        mult[mu] = val
    return {mu: m for mu, m in mult.items() if m > 0}


@dataclass(frozen=True)
class WeightMultiset:
    entries: tuple[tuple[Weight, int], ...]

    def weights(self) -> list[Weight]:
        return [w for w, _ in self.entries]

    def total(self) -> int:
        return sum(m for _, m in self.entries)

    def multiplicity(self, w: Sequence[int]) -> int:
        w = tuple(w)
        for x, m in self.entries:
            if x == w:
                return m
        return 0

    def to_json(self) -> list:
        return [[list(w), m] for w, m in self.entries]


def freudenthal(ctx: RootSystemCtx, lam) -> WeightMultiset:
    """All weights of the Weyl module of highest weight lam, with multiplicities."""
    dom = dominant_multiplicities(ctx, lam)
    entries = []
    for mu, m in dom.items():
        for w in ctx.orbit(mu):
            entries.append((w, m))
    entries.sort(key=lambda e: (tuple(-c for c in e[0])))
    return WeightMultiset(tuple(entries))


def character_total(ctx: RootSystemCtx, lam) -> int:
    """Sum of all multiplicities, via dominant weights and orbit sizes."""
    return sum(m * ctx.orbit_size(mu) for mu, m in dominant_multiplicities(ctx, lam).items())


# -- distinctness on finite tori ----------------------------------------------

def _normalize(weights) -> tuple[list[Weight], bool]:
    if isinstance(weights, WeightMultiset):
        weights = weights.weights()
    scalar = False
    out = []
    for w in weights:
        if isinstance(w, int):
            scalar = True
            out.append((w,))
        else:
            out.append(tuple(int(x) for x in w))
    return out, scalar


def _unwrap(w: Weight, scalar: bool):
    return w[0] if scalar else w


def distinct_mod(weights, modulus: int):
    """Do the distinct weights stay distinct coordinatewise mod ``modulus``?

    Duplicate entries of the same weight are not collisions.  Returns
    ``(True, None)`` or ``(False, (later, earlier))`` for the first weight
    in list order whose residue was already taken.
    """
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    ws, scalar = _normalize(weights)
    seen: dict[Weight, Weight] = {}
    for w in ws:
        red = tuple(c % modulus for c in w)
        prev = seen.get(red)
        if prev is None:
            seen[red] = w
        elif prev != w:
            return False, (_unwrap(w, scalar), _unwrap(prev, scalar))
    return True, None


def divisibility_condition(weights, m: int):
    """True iff no difference of distinct weights is m times a lattice vector."""
    if m < 2:
        raise ValueError("m must be >= 2")
    return distinct_mod(weights, m)


def is_pr_restricted(lam, p: int, r: int) -> bool:
    lam = (lam,) if isinstance(lam, int) else tuple(lam)
    if any(c < 0 for c in lam):
        raise RootDataError(f"weight {lam} is not dominant")
    return all(c < p**r for c in lam)


def sl2_weights(a: int) -> list[int]:
    """Torus weights of V(a) in basis order X^a, ..., Y^a."""
    return [a - 2 * j for j in range(a + 1)]


def end_weights(a: int) -> list[int]:
    """Weights of V* (x) V: dual index outer, V index inner."""
    w = sl2_weights(a)
    return [-wi + wj for wi in w for wj in w]


def tensor_weights(a: int) -> list[int]:
    """Weights of V (x) V."""
    w = sl2_weights(a)
    return [wi + wj for wi in w for wj in w]


def spread(weights) -> int:
    ws, _ = _normalize(weights)
    if not ws:
        return 0
    return max(max(w[i] for w in ws) - min(w[i] for w in ws) for i in range(len(ws[0])))


def distinctness_onset(weights, p: int, max_exponent: int = 64) -> dict:
    """First exponent s with distinct_mod(weights, p^s - 1), and the exponent
    from which distinctness is guaranteed because p^s - 1 exceeds the spread."""
    sp = spread(weights)
    guaranteed = 1
    while p**guaranteed - 1 <= sp:
        guaranteed += 1
    first = None
    for s in range(1, min(guaranteed, max_exponent) + 1):
        if distinct_mod(weights, p**s - 1)[0]:
            first = s
            break
    return {"spread": sp, "first_exponent": first, "guaranteed_from_exponent": guaranteed}


@dataclass
class PLargeAudit:
    type: str
    rank: int
    lam: list[int]
    p: int
    r: int
    s: int
    coxeter_h: int
    p_bound: int
    p_ok: bool
    restricted_ok: bool
    s_gt_r: bool
    weyl_dim: int
    weyl_dim_mod_p: int
    dim_caveat: str
    divisibility_modulus: int
    divisibility_ok: bool | None
    divisibility_witness: list | None
    lattice_reading: str
    torus_distinct_at_q: bool | None
    distinctness: dict | None
    form: str
    verdict: str
    cross_check: dict | None = None

    def to_dict(self) -> dict:
        return asdict(self)


MAX_AUDIT_WEIGHTS = 4000


def module_weights(ctx: RootSystemCtx, lam) -> list[Weight]:
    return [w for w, _ in freudenthal(ctx, lam).entries]


def audit_p_large(kind: str, rank: int, lam, p: int, r: int, s: int) -> PLargeAudit:
    """Check the hypotheses of the large-p adequacy criterion for G(p^s) on V(lam).

    The criterion needs p >= 4(h-1), lam p^r-restricted and s > r; then
    V(lam) is adequate iff p does not divide dim V(lam).  The difference
    condition on weights of V (x) V* with m = p^(r+1) - 1 is evaluated
    directly.
    """
    from .gf import is_prime

    if not is_prime(p):
        raise RootDataError(f"p={p} is not prime")
    if r < 1 or s < 1:
        raise RootDataError("r and s must be positive")
    ctx = root_system(kind, rank)
    lam = _as_weight(ctx, lam)
    _require_dominant(lam)
    h = ctx.coxeter_h
    bound = 4 * (h - 1)
    p_ok = p >= bound
    restricted = is_pr_restricted(lam, p, r)
    s_ok = s > r
    dim = weyl_dim(ctx, lam)
    exact = ctx.type == "A" and ctx.rank == 1 and lam[0] < p
    caveat = ("exact: Weyl module is irreducible" if exact else
              "Weyl-module dimension; equals dim of the irreducible only when the Weyl module is irreducible")
    m = p ** (r + 1) - 1
    div_ok = witness = distinct_q = onset = None
    if dim <= MAX_AUDIT_WEIGHTS:
        vw = module_weights(ctx, lam)
        diffs = [tuple(a - b for a, b in zip(x, y)) for x in vw for y in vw]
        div_ok, wit = divisibility_condition(diffs, m)
        witness = [list(w) for w in wit] if wit else None
        distinct_q = distinct_mod(diffs, p**s - 1)[0]
        onset = distinctness_onset(diffs, p)
    applies = p_ok and restricted and s_ok
    if not applies:
        verdict = "hypotheses fail: no conclusion"
    elif dim % p == 0:
        verdict = "theorem applies: not adequate (p | dim)"
    else:
        verdict = "theorem applies: adequate"
    return PLargeAudit(
        type=ctx.type, rank=rank, lam=list(lam), p=p, r=r, s=s, coxeter_h=h, p_bound=bound,
        p_ok=p_ok, restricted_ok=restricted, s_gt_r=s_ok, weyl_dim=dim, weyl_dim_mod_p=dim % p,
        dim_caveat=caveat, divisibility_modulus=m, divisibility_ok=div_ok,
        divisibility_witness=witness, lattice_reading=LATTICE_READING,
        torus_distinct_at_q=distinct_q, distinctness=onset,
        form="split form only; twisted forms not covered", verdict=verdict,
    )
