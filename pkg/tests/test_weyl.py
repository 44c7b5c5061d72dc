from __future__ import annotations

import csv
import random
from pathlib import Path

import numpy as np
import pytest

from weylepi import linalg, weyl
from weylepi.mui import BudgetExceeded

GOLDEN = Path(__file__).parent / "golden"


@pytest.mark.parametrize("type_,lattice", [("A2", "root"), ("A2", "weight"), ("A4", "root"), ("F4", "root"),
                                           ("E6", "weight"), ("E7", "weight"), ("E8", "root")])
@pytest.mark.parametrize("p", [3, 5])
def test_coxeter_relations(type_, lattice, p):
    weyl.validate_coxeter(weyl.root_datum(type_, lattice), p)


def test_broken_datum_fails_relations():
    bad = weyl.RootDatum("bad", ((2, -1), (-2, 2)), "root")   # B2 Cartan but m read as 4
    mats = weyl.integral_reflections(bad)
    mats[0] = mats[0].copy()
    mats[0][0, 1] += 1
    with pytest.raises(weyl.RelationFailure):
        weyl.validate_coxeter(bad, 3, mats)


@pytest.mark.parametrize("type_,order", [("A2", 6), ("A4", 120), ("F4", 1152)])
def test_group_orders(type_, order):
    assert weyl.weyl_group_order(weyl.root_datum(type_, "root"), 5 if type_ == "A4" else 3) == order
    with pytest.raises(BudgetExceeded):
        weyl.weyl_group_order(weyl.root_datum("E6", "weight"), 3)


def _group_elements(datum, p):
    gens = [np.array(g.rows, dtype=np.int64) for g in weyl.reflection_matrices(datum, p)]
    seen = {np.eye(datum.rank, dtype=np.int64).tobytes(): np.eye(datum.rank, dtype=np.int64)}
    frontier = list(seen.values())
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = (a @ g) % p
                if b.tobytes() not in seen:
                    seen[b.tobytes()] = b
                    nxt.append(b)
        frontier = nxt
    return list(seen.values())


@pytest.mark.parametrize("key,top", [("pu3", 10), ("su3", 10), ("f4", 4)])
def test_invariants_against_whole_group(key, top):
    """Generators only vs every group element: the same fixed space."""
    datum = weyl.root_datum(*weyl.CASE_DATA[key])
    p = weyl.case_prime(key)
    elems = _group_elements(datum, p)
    for d in range(top + 1):
        n = len(weyl.poly_slice(datum.rank, d))
        blocks = []
        for L in elems:
            A = None
            for _, A in weyl.symmetric_power_matrices(L, p, d):
                pass
            blocks.append((A.T - np.eye(n, dtype=np.int64)) % p)
        whole = linalg.nullspace_numpy(np.vstack(blocks), n, p)
        assert np.array_equal(weyl.weyl_invariant_basis(datum, p, d), whole)


def test_symmetric_power_of_identity_and_composition():
    rng = np.random.default_rng(0)
    p = 5
    L1, L2 = rng.integers(0, p, (3, 3)), rng.integers(0, p, (3, 3))
    for (d, A1), (_, A2), (_, A12) in zip(weyl.symmetric_power_matrices(L1, p, 4),
                                          weyl.symmetric_power_matrices(L2, p, 4),
                                          weyl.symmetric_power_matrices((L1 @ L2) % p, p, 4)):
        assert np.array_equal((A1 @ A2) % p, A12), d


def _poly(row, r, d):
    return {m: int(c) for m, c in zip(weyl.poly_slice(r, d), row) if c}


def _mul(f, g, p):
    out: dict = {}
    for a, x in f.items():
        for b, y in g.items():
            k = tuple(i + j for i, j in zip(a, b))
            out[k] = (out.get(k, 0) + x * y) % p
    return {k: v for k, v in out.items() if v}


@pytest.mark.parametrize("key,top", [("pu3", 12), ("pu5", 6), ("f4", 8)])
def test_products_of_invariants_are_invariant(key, top):
    datum = weyl.root_datum(*weyl.CASE_DATA[key])
    p = weyl.case_prime(key)
    r = datum.rank
    bases = {d: weyl.weyl_invariant_basis(datum, p, d) for d in range(1, top + 1)}
    rng = random.Random(key)
    nonempty = [d for d in bases if bases[d].shape[0]]
    for _ in range(100):
        a = rng.choice(nonempty)
        choices = [d for d in nonempty if a + d <= top]
        if not choices:
            continue
        b = rng.choice(choices)
        f = _poly(bases[a][rng.randrange(bases[a].shape[0])], r, a)
        g = _poly(bases[b][rng.randrange(bases[b].shape[0])], r, b)
        prod = _mul(f, g, p)
        target = bases[a + b]
        sb = linalg.SpanBuilder(p)
        for row in target:
            sb.add(_poly(row, r, a + b))
        assert sb.contains(prod)


def test_su3_control_series():
    assert weyl.control_series(30)[:13] == [1, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1, 0, 2]
    dims = weyl.weyl_invariant_dims(weyl.root_datum("A2", "weight"), 5, 30)
    assert dims == weyl.control_series(30)


def test_f4_degree_8_known_part():
    assert weyl.known_part("f4", 8)[8] == 1
    assert weyl.known_part("f4", 8)[4] == 1


def test_status_labels():
    assert weyl.status(3, 3) == "equal"
    assert weyl.status(4, 3) == "computed-exceeds-known"
    assert weyl.status(2, 3) == "VIOLATION"


def test_violation_row_fails_report():
    dims = [0] * 41
    rep = weyl.compare_theorem_main("pu3", 40, dims)
    assert not rep.passed


def test_pu3_matches_golden_prefix():
    with open(GOLDEN / "weyl_pu3.csv") as fh:
        rows = list(csv.DictReader(fh))
    dims = weyl.weyl_invariant_dims(weyl.root_datum("A2", "root"), 3, 40)
    assert weyl.golden_csv("pu3", 40, dims) == (GOLDEN / "weyl_pu3.csv").read_text()
    assert rows[1]["computed_dim"] == str(dims[2])


def test_slice_budget():
    with pytest.raises(BudgetExceeded):
        weyl.weyl_invariant_dims(weyl.root_datum("E7", "weight"), 3, 48, budget=5000)
