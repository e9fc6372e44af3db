import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lieadequacy import weights as W
from lieadequacy.gf import field_new
from lieadequacy.rep import end_module, sym_power
from conftest import sl2

ALL_TYPES = [("A", n) for n in range(1, 9)] + [("B", n) for n in range(2, 9)] + \
    [("C", n) for n in range(2, 9)] + [("D", n) for n in range(4, 9)] + \
    [("E", 6), ("E", 7), ("E", 8), ("F", 4), ("G", 2)]
SMALL_TYPES = [("A", 1), ("A", 2), ("A", 3), ("B", 2), ("B", 3), ("C", 3), ("G", 2), ("D", 4)]


@pytest.mark.parametrize("kind,rank", ALL_TYPES)
def test_root_counts_and_cartan(kind, rank):
    ctx = W.root_system(kind, rank)
    assert len(ctx.positive_roots) * 2 == rank * ctx.coxeter_h
    C = np.array(ctx.cartan)
    assert (np.diag(C) == 2).all()
    assert (C[~np.eye(rank, dtype=bool)] <= 0).all()
    # highest root has height h - 1
    assert max(sum(r) for r in ctx.positive_roots) == ctx.coxeter_h - 1


def test_examples():
    assert W.root_system("A", 1).coxeter_h == 2
    g2 = W.root_system("G", 2)
    assert g2.coxeter_h == 6 and len(g2.positive_roots) == 6
    assert len(W.root_system("A", 2).positive_roots) == 3


def test_invalid_root_data():
    for kind, rank in [("A", 0), ("D", 3), ("E", 5), ("F", 3), ("G", 3), ("X", 2)]:
        with pytest.raises(W.RootDataError):
            W.root_system(kind, rank)


@pytest.mark.parametrize("kind,rank,lam,dim", [
    ("A", 2, (1, 1), 8), ("G", 2, (1, 0), 7), ("G", 2, (0, 1), 14), ("F", 4, (0, 0, 0, 1), 26),
    ("F", 4, (1, 0, 0, 0), 52), ("E", 6, (1, 0, 0, 0, 0, 0), 27), ("E", 7, (0,) * 6 + (1,), 56),
    ("E", 8, (0,) * 7 + (1,), 248), ("D", 4, (0, 1, 0, 0), 28), ("B", 3, (0, 0, 1), 8),
    ("C", 3, (1, 0, 0), 6), ("B", 2, (0, 1), 4),
])
def test_weyl_dim_known(kind, rank, lam, dim):
    assert W.weyl_dim(W.root_system(kind, rank), lam) == dim


@pytest.mark.parametrize("a", range(8))
def test_weyl_dim_a1(a):
    assert W.weyl_dim(W.root_system("A", 1), (a,)) == a + 1


def test_weyl_dim_rejects_nondominant():
    with pytest.raises(W.RootDataError):
        W.weyl_dim(W.root_system("A", 2), (1, -1))


def test_freudenthal_examples():
    a1 = W.root_system("A", 1)
    ms = W.freudenthal(a1, (4,))
    assert sorted(w[0] for w in ms.weights()) == [-4, -2, 0, 2, 4]
    assert all(m == 1 for _, m in ms.entries)
    a2 = W.root_system("A", 2)
    adj = W.freudenthal(a2, (1, 1))
    assert adj.multiplicity((0, 0)) == 2 and adj.total() == 8
    zero = W.freudenthal(a2, (0, 0))
    assert zero.entries == (((0, 0), 1),)


@pytest.mark.parametrize("kind,rank", [("A", 2), ("A", 4), ("B", 3), ("C", 4), ("D", 5), ("G", 2), ("F", 4), ("E", 6)])
def test_adjoint_zero_weight_is_rank(kind, rank):
    ctx = W.root_system(kind, rank)
    theta = max(ctx.positive_roots, key=sum)
    lam = ctx.root_to_weight(theta)
    dom = W.dominant_multiplicities(ctx, lam)
    assert dom[(0,) * rank] == rank
    assert W.weyl_dim(ctx, lam) == rank + 2 * len(ctx.positive_roots)


def _ssyt_contents(shape, n):
    """Content vectors of all semistandard tableaux of a given shape with entries 1..n."""
    cells = [(r, c) for r, length in enumerate(shape) for c in range(length)]
    out = Counter()
    filling = {}

    def rec(i):
        if i == len(cells):
            cnt = [0] * n
            for v in filling.values():
                cnt[v - 1] += 1
            out[tuple(cnt)] += 1
            return
        r, c = cells[i]
        lo = 1
        if c > 0:
            lo = max(lo, filling[(r, c - 1)])
        if r > 0:
            lo = max(lo, filling[(r - 1, c)] + 1)
        for v in range(lo, n + 1):
            filling[(r, c)] = v
            rec(i + 1)
        filling.pop((r, c), None)

    rec(0)
    return out


@pytest.mark.parametrize("rank", [1, 2, 3])
def test_type_a_matches_kostka(rank):
    ctx = W.root_system("A", rank)
    n = rank + 1
    for lam in itertools.product(range(3), repeat=rank):
        shape = [sum(lam[i:]) for i in range(rank)]
        want = Counter()
        for content, k in _ssyt_contents([s for s in shape if s], n).items():
            mu = tuple(content[i] - content[i + 1] for i in range(rank))
            want[mu] += k
        got = dict(W.freudenthal(ctx, lam).entries)
        assert got == dict(want)


@pytest.mark.parametrize("kind,rank", SMALL_TYPES)
def test_freudenthal_total_and_weyl_invariance(kind, rank):
    ctx = W.root_system(kind, rank)
    for lam in itertools.product(range(3), repeat=rank):
        ms = W.freudenthal(ctx, lam)
        assert ms.total() == W.weyl_dim(ctx, lam) == W.character_total(ctx, lam)
        mult = dict(ms.entries)
        assert len(mult) == len(ms.entries)
        for w, m in ms.entries:
            assert m > 0
            for i in range(rank):
                assert mult[ctx.reflect(w, i)] == m


def test_distinct_mod_examples():
    ew = W.end_weights(5)
    assert sorted(set(ew)) == list(range(-10, 11, 2))
    assert W.distinct_mod(ew, 48) == (True, None)
    assert W.distinct_mod(ew, 6) == (False, (-6, 0))
    assert W.distinct_mod([3], 2) == (True, None)


def test_divisibility_examples():
    assert W.divisibility_condition(W.end_weights(5), 48) == (True, None)
    assert W.divisibility_condition([0, 6], 6) == (False, (6, 0))
    assert W.divisibility_condition([], 5) == (True, None)


def test_is_pr_restricted():
    assert W.is_pr_restricted(5, 7, 1)
    assert not W.is_pr_restricted(7, 7, 1)
    assert W.is_pr_restricted(7, 7, 2)


def _prime_powers(limit):
    out = []
    for q in range(2, limit + 1):
        f = [d for d in range(2, q + 1) if q % d == 0][0]
        x = q
        while x % f == 0:
            x //= f
        if x == 1:
            out.append(q)
    return out


def end_weight_threshold(q, a):
    """End weights are even, so differences are 2k with 1 <= k <= 2a; odd q - 1 only needs to exceed 2a."""
    return q - 1 > (4 * a if q % 2 else 2 * a)


@pytest.mark.parametrize("a", range(11))
def test_end_weight_closed_form(a):
    for q in _prime_powers(128):
        assert W.distinct_mod(W.end_weights(a), q - 1)[0] == end_weight_threshold(q, a)
        if q % 2:
            assert W.distinct_mod(W.end_weights(a), q - 1)[0] == (q - 1 > 4 * a)


def test_four_a_threshold_fails_for_even_q():
    # q = 4, a = 1: residues of -2, 0, 2 mod 3 are 1, 0, 2
    assert W.distinct_mod(W.end_weights(1), 3)[0]
    assert not 4 - 1 > 4 * 1


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.integers(-20, 20), min_size=2, max_size=2), max_size=12), st.integers(0, 30))
def test_large_modulus_always_distinct(ws, extra):
    ws = [tuple(w) for w in ws]
    m = 2 * W.spread(ws) + 1 + extra
    assert W.distinct_mod(ws, m)[0]


@pytest.mark.parametrize("p,b,a", [(7, 1, 5), (5, 1, 2), (3, 2, 2), (11, 1, 5), (7, 1, 1), (2, 3, 1)])
def test_torus_ground_truth(p, b, a):
    """Residue collisions are exactly the coincidences of torus eigenvalues."""
    F = field_new(p, b)
    t = sl2(p, b).gens[1]
    assert t.tolist() == [[F.zeta.key, 0], [0, F.zeta.inv().key]]
    end = end_module(sym_power(F, a))
    diag = np.diag(end.gen_images[1].data)
    logs = [F.from_key(int(x)).dlog() for x in diag]
    n = a + 1
    ws = W.sl2_weights(a)
    pairs = [ws[i] - ws[j] for i in range(n) for j in range(n)]
    assert logs == [w % (q := F.q - 1) for w in pairs]
    coincide = len(set(logs)) < len(set(pairs))
    ok, wit = W.distinct_mod(W.end_weights(a), F.q - 1)
    assert ok == (not coincide)
    if wit:
        assert (F.zeta ** wit[0]) == (F.zeta ** wit[1])


def test_distinctness_onset():
    info = W.distinctness_onset(W.end_weights(5), 7)
    assert info == {"spread": 20, "first_exponent": 2, "guaranteed_from_exponent": 2}
    # q = 4: weights -2, 0, 2 are already distinct mod 3
    info = W.distinctness_onset(W.end_weights(1), 2)
    assert info["first_exponent"] == 2


def test_audit_examples():
    r = W.audit_p_large("A", 1, 5, 7, 1, 2)
    assert r.verdict == "theorem applies: adequate" and r.weyl_dim == 6
    assert r.divisibility_ok and r.divisibility_modulus == 48
    r = W.audit_p_large("A", 1, 6, 7, 1, 2)
    assert r.verdict == "theorem applies: not adequate (p | dim)" and r.weyl_dim_mod_p == 0
    r = W.audit_p_large("A", 1, 1, 3, 1, 2)
    assert r.verdict == "hypotheses fail: no conclusion" and not r.p_ok and r.p_bound == 4
    r = W.audit_p_large("A", 2, (1, 1), 31, 1, 2)
    assert r.verdict == "theorem applies: adequate" and "Weyl-module" in r.dim_caveat
    r = W.audit_p_large("A", 1, 5, 7, 1, 1)
    assert not r.s_gt_r and r.verdict.startswith("hypotheses fail")
    with pytest.raises(W.RootDataError):
        W.audit_p_large("A", 1, 5, 8, 1, 2)
    with pytest.raises(W.RootDataError):
        W.audit_p_large("B", 1, 5, 7, 1, 2)


@pytest.mark.parametrize("kind,rank,lam,p", [("A", 2, (1, 0), 11), ("B", 2, (1, 0), 13), ("G", 2, (1, 0), 23)])
def test_divisibility_holds_when_p_large(kind, rank, lam, p):
    r = W.audit_p_large(kind, rank, lam, p, 1, 2)
    assert r.p_ok and r.divisibility_ok
