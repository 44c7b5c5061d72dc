from __future__ import annotations

import pytest

from weylepi.filtration import all_subsets, product_law, split, verify_product_law
from weylepi.suites import filtration_suite, exact_sequence_suite


def test_product_law_shape():
    # complementary index sets multiply to +-e times u
    assert product_law((0,), (1,), 2) in {(1, ()), (-1, ())}
    assert product_law((0,), (0,), 2) is None
    assert product_law((), (0, 1), 2) == (1, ())
    assert product_law((0, 1), (0, 1), 2) == (1, (0, 1))
    assert len(all_subsets(4)) == 16


@pytest.mark.parametrize("family,n,p", [("sl", 2, 3), ("sl", 3, 3), ("gn", 3, 3), ("gnp", 3, 3),
                                        ("sl", 2, 5), ("gn", 2, 5), ("gnp", 3, 5)])
def test_product_law_against_honest_products(family, n, p):
    rep = verify_product_law(family, n, p)
    assert len(rep.rows) == 4**n
    assert rep.passed, [r.statement for r in rep.rows if not r.passed]


def test_split_ranges():
    assert split(2, 1, "sl", 3, 3).z_index == (0, 1)
    with pytest.raises(ValueError):
        split(2, 1, "gn", 3, 3)
    with pytest.raises(ValueError):
        split(0, 3, "sl", 3, 3)


@pytest.mark.parametrize("family,n,p,D,i,ell", [("sl", 2, 3, 40, 0, 1), ("sl", 2, 5, 40, 0, 1),
                                                 ("sl", 3, 3, 24, 1, 2), ("gn", 3, 3, 24, 1, 1)])
def test_filtration_statements_small(family, n, p, D, i, ell):
    rep = filtration_suite(family, n, p, D, i, ell)
    assert rep.passed, [r.statement for r in rep.rows if not r.passed][:5]


@pytest.mark.parametrize("family,n,p,D,i,ell", [("sl", 2, 3, 40, 0, 1), ("sl", 3, 3, 24, 1, 2),
                                                 ("gnp", 3, 3, 24, 1, 1), ("gn", 3, 5, 24, 1, 0)])
def test_exact_sequences_small(family, n, p, D, i, ell):
    rep = exact_sequence_suite(family, n, p, D, i, ell)
    assert rep.passed, [r.statement for r in rep.rows if not r.passed][:5]


def test_default_split_for_g_family_is_rejected():
    with pytest.raises(ValueError):
        exact_sequence_suite("gnp", 3, 3, 10)


def test_sequences_need_matching_lower_weight():
    # the sequences are claimed for (n, i) = (2, 0), (3, 1), (4, 2) only; other i break exactness
    assert not exact_sequence_suite("sl", 3, 3, 12, 0, 0).passed
