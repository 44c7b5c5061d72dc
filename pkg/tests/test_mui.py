from __future__ import annotations

import pytest

from weylepi.cache import Cache
from weylepi.koszul import KoszulCtx, apply_matrix
from weylepi.mui import (
    BudgetExceeded,
    MuiModel,
    NotDivisible,
    SubspaceSpec,
    dickson,
    dickson_coefficients,
    dickson_product,
    enumerate_group,
    exact_divide,
    family_order,
    group_generators,
    invariant_basis,
    invariant_basis_bruteforce,
    predicted_series,
    qbar_apply,
)
from weylepi.suites import division_suite


@pytest.mark.parametrize("n,p", [(1, 3), (2, 3), (3, 3), (2, 5), (3, 5)])
def test_dickson_recursion_matches_literal_product(n, p):
    ctx = KoszulCtx(p, n)
    for V in (SubspaceSpec.full(n), SubspaceSpec.sub(n)):
        if V.dim == 0:
            continue
        assert list(dickson_coefficients(ctx, V)) == dickson_product(ctx, V)


def test_dickson_top_and_degrees():
    ctx = KoszulCtx(3, 2)
    V = SubspaceSpec.full(2)
    assert dickson(ctx, V, 2) == ctx.one()
    assert dickson(ctx, V, 1).degree() == 2 * (9 - 3)
    assert dickson(ctx, V, 0).degree() == 2 * (9 - 1)
    with pytest.raises(ValueError):
        dickson(ctx, V, 3)


@pytest.mark.parametrize("family,n,p", [("sl", 2, 3), ("sl", 3, 3), ("gn", 3, 3), ("gnp", 3, 3),
                                        ("sl", 2, 5), ("gn", 2, 5), ("gnp", 2, 5)])
def test_generated_group_has_expected_order(family, n, p):
    H = group_generators(family, n, p)
    assert enumerate_group(H.generators) == family_order(family, n, p)
    assert enumerate_group(H.monomial_generators + H.extra_generators) == family_order(family, n, p)


@pytest.mark.parametrize("family,n,p,D", [("sl", 2, 3, 30), ("sl", 2, 5, 24), ("sl", 3, 3, 20),
                                          ("gn", 3, 3, 20), ("gnp", 3, 3, 20), ("gn", 2, 5, 20)])
def test_fast_invariants_equal_bruteforce(family, n, p, D):
    H = group_generators(family, n, p)
    for d in range(D + 1):
        fast = invariant_basis(H, d)
        assert fast == invariant_basis_bruteforce(H, d), d


@pytest.mark.parametrize("family,n,p,D", [("sl", 2, 3, 40), ("sl", 3, 3, 30), ("gn", 3, 3, 30),
                                          ("gnp", 3, 3, 30), ("sl", 2, 5, 40)])
def test_dimension_matches_free_module_series(family, n, p, D):
    H = group_generators(family, n, p)
    series = predicted_series(H, D)
    assert [len(invariant_basis(H, d)) for d in range(D + 1)] == series


@pytest.mark.parametrize("family,n,p", [("sl", 3, 3), ("gn", 3, 3), ("gnp", 3, 3), ("gn", 2, 5)])
def test_model_generators_are_invariant(family, n, p):
    M = MuiModel(family, n, p)
    H = group_generators(family, n, p)
    elems = list(M.ring_elements) + [M.module_element(I) for I in [(), (0,), (n - 1,), (0, n - 1)]]
    for x in elems:
        for g in H.generators:
            assert apply_matrix(g, x) == x


@pytest.mark.parametrize("n,p", [(2, 3), (3, 3), (4, 3), (2, 5), (3, 5)])
def test_division_identities(n, p):
    assert division_suite(n, p).passed


def test_exact_divide_reports_witness():
    ctx = KoszulCtx(3, 2)
    x = ctx.t(0) ** 2 + ctx.t(1)
    with pytest.raises(NotDivisible) as info:
        exact_divide(x, ctx.t(0))
    assert info.value.witness == (0, (0, 1))
    assert exact_divide(x * ctx.t(1), ctx.t(1)) == x


def test_budget_and_bad_index():
    H = group_generators("sl", 3, 3)
    with pytest.raises(BudgetExceeded):
        invariant_basis(H, 30, budget=10)
    with pytest.raises(ValueError):
        qbar_apply("gn", 3, KoszulCtx(3, 3).dt(0))


def test_invariant_cache_round_trip(tmp_path):
    H = group_generators("sl", 2, 3)
    cache = Cache(tmp_path)
    cold = invariant_basis(H, 16, cache=cache)
    warm = invariant_basis(H, 16, cache=cache)
    assert cold == warm == invariant_basis(H, 16)
    assert cache.hits == 1
