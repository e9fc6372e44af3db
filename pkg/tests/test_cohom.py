import numpy as np
import pytest

from lieadequacy.cohom import (H1CapExceeded, ModuleAction, coboundary_dimension, h1_bruteforce,
                               h1_dimension, hom_to_additive, trivial_module)
from lieadequacy.rep import end_module, sym_power_of
from conftest import sl2
from oracles import end_element_action, hom_count_dim

SMALL = [(2, 1), (3, 1), (2, 2), (5, 1)]


def _end(ctx, a):
    return ModuleAction.from_representation(end_module(sym_power_of(ctx.gens, a)))


@pytest.mark.parametrize("p,b,want", [(2, 1, 1), (3, 1, 1), (2, 2, 0), (5, 1, 0), (7, 1, 0), (3, 2, 0)])
def test_trivial_module_h1(p, b, want):
    ctx = sl2(p, b)
    assert h1_dimension(ctx, trivial_module(ctx.field, ctx.k)).dim_h1 == want


@pytest.mark.parametrize("p,b", [(2, 1), (3, 1), (2, 2), (5, 1)])
def test_trivial_matches_hom_count(p, b):
    ctx = sl2(p, b)
    M = trivial_module(ctx.field, ctx.k)
    assert h1_dimension(ctx, M).dim_h1 == hom_count_dim(ctx) == h1_bruteforce(ctx, M).dim_h1
    assert hom_to_additive(ctx) == hom_count_dim(ctx)


@pytest.mark.parametrize("p,b", SMALL + [(3, 2)])
def test_end_modules_match_bruteforce_direct_action(p, b):
    ctx = sl2(p, b)
    for a in range(p):
        M = _end(ctx, a)
        fast = h1_dimension(ctx, M)
        slow = h1_bruteforce(ctx, M, element_action=end_element_action(ctx.field, a))
        assert fast.dim_h1 == slow.dim_h1
        assert fast.dim_z1 == slow.dim_z1 and fast.dim_b1 == slow.dim_b1


def test_sl2_7_sym5_ext_zero():
    ctx = sl2(7)
    res = h1_dimension(ctx, _end(ctx, 5))
    assert (res.dim_z1, res.dim_b1, res.dim_h1) == (35, 35, 0)


def test_sl2_11_sym5_ext_one():
    ctx = sl2(11)
    res = h1_dimension(ctx, _end(ctx, 5), mode="full")
    assert res.dim_h1 == 1 and not res.early_exit


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_relator_order_independence(seed):
    ctx = sl2(11)
    assert h1_dimension(ctx, _end(ctx, 5), shuffle_seed=seed).dim_h1 == 1
    ctx = sl2(5)
    for a in range(5):
        assert h1_dimension(ctx, _end(ctx, a), shuffle_seed=seed).dim_h1 == h1_dimension(ctx, _end(ctx, a)).dim_h1


@pytest.mark.parametrize("p,b", [(5, 1), (7, 1), (3, 2)])
def test_certify_agrees_with_full(p, b):
    ctx = sl2(p, b)
    for a in range(p):
        M = _end(ctx, a)
        full = h1_dimension(ctx, M, mode="full")
        cert = h1_dimension(ctx, M, mode="certify_zero")
        assert cert.dim_h1 == full.dim_h1
        if full.dim_h1 == 0:
            assert cert.relators_processed <= full.relators_processed


def test_certify_early_exit_on_big_group():
    ctx = sl2(7, 2)
    res = h1_dimension(ctx, _end(ctx, 5), mode="certify_zero")
    assert res.dim_h1 == 0 and res.early_exit
    assert res.relators_processed < ctx.order


def test_caps():
    ctx = sl2(11)
    M = _end(ctx, 5)
    with pytest.raises(H1CapExceeded):
        h1_dimension(ctx, M, mode="full", full_cap=100)
    # nonzero H^1 can never be certified, so a small cap leaves it undetermined
    with pytest.raises(H1CapExceeded):
        h1_dimension(ctx, M, mode="certify_zero", full_cap=100)
    with pytest.raises(H1CapExceeded):
        h1_bruteforce(ctx, M, cap=100)


def test_coboundary_dimension():
    ctx = sl2(5)
    assert coboundary_dimension(_end(ctx, 3)) == 15
    assert coboundary_dimension(trivial_module(ctx.field, ctx.k)) == 0


def test_mismatched_module():
    ctx = sl2(5)
    other = sl2(7)
    with pytest.raises(ValueError):
        h1_dimension(ctx, trivial_module(other.field, other.k))
