import numpy as np
import pytest

from lieadequacy.gf import field_new
from lieadequacy.matgrp import (GroupCapExceeded, Mat, batch_keys, element_order, enumerate_group,
                                evaluate_word, gl2_generators, is_p_regular, p_regular_mask,
                                relator_count, schreier_relators, sl2_generators, word_for)
from conftest import gl2, sl2

QS = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (2, 4), (5, 2)]


def _all_sl2(F):
    q = F.q
    out = set()
    for a in range(q):
        for b in range(q):
            for c in range(q):
                for d in range(q):
                    if F.sub_table[F.mul_table[a, d], F.mul_table[b, c]] == 1:
                        out.add((a, b, c, d))
    return out


@pytest.mark.parametrize("p,b", QS)
def test_sl2_order(p, b):
    q = p**b
    assert sl2(p, b).order == q * (q * q - 1)


@pytest.mark.parametrize("p,b", [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2)])
def test_sl2_elements_exact(p, b):
    ctx = sl2(p, b)
    got = {tuple(int(x) for x in m.ravel()) for m in ctx.elements}
    assert got == _all_sl2(ctx.field)


@pytest.mark.parametrize("p,b", [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2)])
def test_gl2_order(p, b):
    q = p**b
    assert gl2(p, b).order == (q * q - 1) * (q * q - q)


def test_cap():
    with pytest.raises(GroupCapExceeded):
        enumerate_group(sl2_generators(field_new(5, 1)), cap=100)


@pytest.mark.parametrize("p,b", [(3, 1), (5, 1), (2, 2), (3, 2), (7, 1)])
def test_tree_words_and_multiplication(p, b):
    ctx = sl2(p, b)
    F = ctx.field
    imgs = [g.data for g in ctx.gens]
    invs = [g.data for g in ctx.gen_inverses]
    rng = np.random.default_rng(0)
    for g in rng.integers(0, ctx.order, 30):
        w = word_for(ctx, int(g))
        assert len(w) == ctx.depth[g]
        assert np.array_equal(evaluate_word(F, imgs, invs, w, 2), ctx.elements[g])
    for x, y in rng.integers(0, ctx.order, (30, 2)):
        assert np.array_equal(ctx.elements[ctx.multiply(int(x), int(y))],
                              F.matmul(ctx.elements[x], ctx.elements[y]))
    keys = batch_keys(F, ctx.elements)
    assert len(set(keys.tolist())) == ctx.order


@pytest.mark.parametrize("p,b", QS)
def test_p_regular_count(p, b):
    ctx = sl2(p, b)
    q = p**b
    mask = p_regular_mask(ctx)
    want = q**3 - 2 * q**2 - q + 2 if p > 2 else q**3 - q**2 - q + 1
    assert mask.sum() == want


@pytest.mark.parametrize("p,b", [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2)])
def test_p_regular_by_orders(p, b):
    ctx = sl2(p, b)
    mask = p_regular_mask(ctx)
    for g in range(ctx.order):
        assert mask[g] == (element_order(ctx, g) % p != 0)
    assert is_p_regular(ctx, 0)


@pytest.mark.parametrize("p,b", [(2, 1), (3, 1), (5, 1), (2, 2)])
def test_unipotent_count_is_q_squared(p, b):
    # elements of p-power order, identity included
    ctx = sl2(p, b)
    orders = [element_order(ctx, g) for g in range(ctx.order)]
    assert sum(1 for o in orders if _is_power_of(o, p)) == (p**b) ** 2


def _is_power_of(n, p):
    while n % p == 0:
        n //= p
    return n == 1


@pytest.mark.parametrize("p,b", [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2)])
def test_schreier_relators_evaluate_to_identity(p, b):
    ctx = sl2(p, b)
    rels = list(schreier_relators(ctx))
    assert len(rels) == relator_count(ctx) == ctx.k * ctx.order - (ctx.order - 1)
    F = ctx.field
    imgs = [g.data for g in ctx.gens]
    invs = [g.data for g in ctx.gen_inverses]
    for r in rels[:: max(1, len(rels) // 50)]:
        assert np.array_equal(evaluate_word(F, imgs, invs, r.word, 2), np.eye(2, dtype=F.dtype))


def test_sl2_5_relators():
    assert relator_count(sl2(5)) == 241


def test_generators_shape():
    F = field_new(7, 1)
    u, t, w = sl2_generators(F)
    assert u.tolist() == [[1, 1], [0, 1]]
    assert t.tolist() == [[3, 0], [0, 5]]
    assert w.tolist() == [[0, 1], [6, 0]]
    assert gl2_generators(F)[-1].tolist() == [[3, 0], [0, 1]]


def test_mat_ops():
    F = field_new(3, 2)
    m = Mat.from_elems(F, [[1, 3], [0, 1]])
    assert (m @ m.inverse()).is_identity()
    assert m.det() == F.one
