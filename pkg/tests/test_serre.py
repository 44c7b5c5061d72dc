from __future__ import annotations

import numpy as np
import pytest

from weylepi.cases import CASE_KEYS, get_case
from weylepi.serre import NegativeDimension, SymbolicSeries, bottom_row, build_E2, einfty_identity, page_report


@pytest.mark.parametrize("key", CASE_KEYS)
def test_replay_passes_to_200(key):
    rep = einfty_identity(get_case(key), 200)
    assert rep.passed, [r.statement for r in rep.rows if not r.passed]
    assert any(n.startswith("assumed") for n in rep.notes)


def test_pu3_bottom_row():
    row = bottom_row(get_case("pu3"), 30)
    assert [d for d, c in enumerate(row) if c] == [0, 2, 12, 14, 24, 26]
    assert all(c in (0, 1) for c in row)


def test_negative_coefficients_are_detected():
    s = SymbolicSeries(3, {"S": np.array([1, -1, 0, 0])})
    with pytest.raises(NegativeDimension):
        s.check_nonnegative("probe")


def test_page_report_is_deterministic():
    c = get_case("f4")
    assert page_report(c, 60) == page_report(c, 60)
    assert build_E2(c, 10).r == 2
