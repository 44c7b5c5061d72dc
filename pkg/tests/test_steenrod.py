from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from weylepi.koszul import KoszulCtx
from weylepi.steenrod import bockstein, milnor_degree, milnor_q, milnor_q_recursive, q_composite, reduced_power
from weylepi.suites import steenrod_suite

from test_koszul import random_element


def test_q_on_generators():
    ctx = KoszulCtx(3, 2)
    assert milnor_q(0, ctx.dt(1)) == ctx.t(1)
    assert milnor_q(2, ctx.dt(0)) == ctx.t(0, 9)
    assert milnor_q(1, ctx.t(0)).is_zero()
    assert bockstein(ctx.dt(0) * ctx.dt(1)) == ctx.t(0) * ctx.dt(1) - ctx.dt(0) * ctx.t(1)
    assert milnor_degree(1, 5) == 9


def test_reduced_power_instability_and_top():
    ctx = KoszulCtx(5, 2)
    x = ctx.t(0) * ctx.t(1)
    assert reduced_power(2, x) == x**5
    assert reduced_power(3, x).is_zero()
    assert reduced_power(1, ctx.dt(0)).is_zero()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([3, 5]))
def test_cartan_formula(seed, p):
    rng = random.Random(seed)
    ctx = KoszulCtx(p, 3)
    x, y = random_element(ctx, rng.randint(0, 8), rng), random_element(ctx, rng.randint(0, 8), rng)
    k = rng.randint(0, 4)
    rhs = ctx.zero()
    for a in range(k + 1):
        rhs = rhs + reduced_power(a, x) * reduced_power(k - a, y)
    assert reduced_power(k, x * y) == rhs


@pytest.mark.parametrize("p", [3, 5])
def test_adem_relation_p1p1(p):
    rng = random.Random(p)
    ctx = KoszulCtx(p, 2)
    x = random_element(ctx, 12, rng, terms=4)
    assert reduced_power(1, reduced_power(1, x)) == 2 * reduced_power(2, x)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([3, 5]), st.integers(0, 2))
def test_closed_form_matches_commutator_recursion(seed, p, i):
    rng = random.Random(seed)
    ctx = KoszulCtx(p, 3)
    x = random_element(ctx, rng.randint(0, 10), rng)
    assert milnor_q(i, x) == milnor_q_recursive(i, x)


def test_composite_rejects_repeats():
    ctx = KoszulCtx(3, 2)
    with pytest.raises(ValueError):
        q_composite([0, 0], ctx.dt(0))


def test_small_suite_passes_and_is_deterministic():
    a = steenrod_suite(3, 3, D=10, pairs=40, seed=7)
    b = steenrod_suite(3, 3, D=10, pairs=40, seed=7)
    assert a.passed
    assert a.to_json() == b.to_json()
