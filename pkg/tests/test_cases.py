from __future__ import annotations

import json

import pytest

from weylepi.cases import (
    CASE_KEYS,
    CaseModel,
    case_table,
    case_table_json,
    evaluate,
    get_case,
    render,
    series_M,
    series_M_odd,
    xi_images,
)
from weylepi.koszul import apply_matrix
from weylepi.suites import closure_suite, image_split_suite


def test_case_table_covers_all_keys():
    assert tuple(c.key for c in case_table()) == CASE_KEYS
    data = json.loads(case_table_json())
    assert case_table_json() == case_table_json()
    assert len(data) == len(CASE_KEYS)
    with pytest.raises(KeyError):
        get_case("g2")


@pytest.mark.parametrize("key", CASE_KEYS)
def test_generator_degrees_and_parity(key):
    c = get_case(key)
    assert c.k == (2 if key.startswith("pu") else 3)
    assert c.euler_degree in [d for _, d in c.ring]
    for g in c.M0 + c.M1:
        assert g.degree >= 0
        assert render(g.image)


def test_pu3_series():
    c = get_case("pu3")
    m1 = series_M(c, "M1", 10)
    assert m1[:4] == [0, 0, 1, 1]
    assert series_M(c, "M0", 0) == [1]
    assert all(x == 0 for x in series_M(c, "M1even/e", 30)[1::2])
    assert series_M_odd(c, "M0", 7)[7] == 1


@pytest.mark.parametrize("key", CASE_KEYS)
def test_images_are_invariant(key):
    c = get_case(key)
    cm = CaseModel(c, 24)
    for g in c.M0 + c.M1:
        x = cm.image(g)
        assert x.is_zero() or x.degree() == g.degree
        for h in cm.H.generators:
            assert apply_matrix(h, x) == x
    spans = xi_images(c, 16, cm)
    assert set(spans) == {"M0", "M1"}


@pytest.mark.parametrize("key", ["pu3", "pu5", "f4"])
def test_image_splitting_small(key):
    rep = image_split_suite(key, 24)
    assert rep.passed, [r.statement for r in rep.rows if not r.passed][:5]


@pytest.mark.parametrize("key", ["pu3", "e6"])
def test_closure_small(key):
    rep = closure_suite(key, 24)
    assert rep.passed, [r.statement for r in rep.rows if not r.passed][:5]


def test_evaluate_memoises_shared_subtrees():
    c = get_case("pu3")
    cm = CaseModel(c, 12)
    memo: dict = {}
    g = c.M1[0]
    assert evaluate(g.image, cm.mui, memo) == cm.image(g)
    assert memo
