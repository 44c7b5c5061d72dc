"""Weyl-group invariants of H*(BT; F_p) = F_p[t_1..t_r] via reflection matrices."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .koszul import MatrixGL, compositions
from .mui import BudgetExceeded, enumerate_group
from .report import Report, check

WEYL_REF = "H*(BT)^W = H^even(BG)/(e_k): the known part of the right side is a lower bound"


def _chain(r: int) -> list[list[int]]:
    C = [[0] * r for _ in range(r)]
    for i in range(r):
        C[i][i] = 2
        if i + 1 < r:
            C[i][i + 1] = C[i + 1][i] = -1
    return C


def _e_series(r: int) -> list[list[int]]:
    """Bourbaki numbering: 1-3-4-5-...-r chain with node 2 attached to node 4."""
    C = [[2 if i == j else 0 for j in range(r)] for i in range(r)]
    edges = [(0, 2), (1, 3), (2, 3)] + [(k, k + 1) for k in range(3, r - 1)]
    for a, b in edges:
        C[a][b] = C[b][a] = -1
    return C


CARTAN = {
    "A2": _chain(2),
    "A4": _chain(4),
    "F4": [[2, -1, 0, 0], [-1, 2, -2, 0], [0, -1, 2, -1], [0, 0, -1, 2]],
    "E6": _e_series(6),
    "E7": _e_series(7),
    "E8": _e_series(8),
}


@dataclass(frozen=True)
class RootDatum:
    label: str
    cartan: tuple[tuple[int, ...], ...]   # a_ij = <alpha_i^vee, alpha_j>
    lattice: str                          # "root" or "weight"

    @property
    def rank(self) -> int:
        return len(self.cartan)

    def coxeter_m(self, i: int, j: int) -> int:
        if i == j:
            return 1
        return {0: 2, 1: 3, 2: 4, 3: 6}[self.cartan[i][j] * self.cartan[j][i]]


def root_datum(type_: str, lattice: str) -> RootDatum:
    if lattice not in ("root", "weight"):
        raise ValueError(lattice)
    return RootDatum(f"{type_}/{lattice}", tuple(tuple(r) for r in CARTAN[type_]), lattice)


# case key -> character lattice of the maximal torus
CASE_DATA = {
    "pu3": ("A2", "root"),
    "pu5": ("A4", "root"),
    "f4": ("F4", "root"),
    "e6": ("E6", "weight"),
    "e7": ("E7", "weight"),
    "e8": ("E8", "root"),
    "su3": ("A2", "weight"),
}
DESK_CASES = ("pu3", "pu5", "f4")
CONTROL_REF = "no-torsion control: invariants of W(A_2) are polynomial on degrees 4 and 6"


def case_prime(case_key: str) -> int:
    if case_key == "su3":
        return 5
    from .cases import get_case
    return get_case(case_key).p


def integral_reflections(datum: RootDatum) -> list[np.ndarray]:
    """Integer matrices of simple reflections; row j is the image of basis vector j."""
    r = datum.rank
    a = np.array(datum.cartan, dtype=np.int64)
    mats = []
    for i in range(r):
        S = np.eye(r, dtype=np.int64)
        if datum.lattice == "root":
            # s_i(alpha_j) = alpha_j - a_ij alpha_i
            S[:, i] -= a[i, :]
        else:
            # s_i(omega_j) = omega_j - delta_ij alpha_i, alpha_i = sum_k a_ki omega_k
            S[i, :] -= a[:, i]
        mats.append(S)
    return mats


class RelationFailure(AssertionError):
    pass


def validate_coxeter(datum: RootDatum, p: int, mats=None) -> None:
    mats = mats if mats is not None else integral_reflections(datum)
    r = datum.rank
    I = np.eye(r, dtype=np.int64)
    for i in range(r):
        for j in range(r):
            prod = mats[i] if i == j else (mats[i] @ mats[j])
            mij = 2 if i == j else datum.coxeter_m(i, j)
            if not np.array_equal(np.linalg.matrix_power(prod, mij) % p, I % p):
                raise RelationFailure(f"{datum.label}: (s_{i}s_{j})^{mij} != 1 mod {p}")


def reflection_matrices(datum: RootDatum, p: int) -> list[MatrixGL]:
    mats = integral_reflections(datum)
    validate_coxeter(datum, p, mats)
    return [MatrixGL((m % p).tolist(), p) for m in mats]


def weyl_group_order(datum: RootDatum, p: int) -> int:
    """Order of the image of W in GL_r(F_p), by closure enumeration."""
    if datum.rank > 4:
        raise BudgetExceeded("enumeration is limited to rank <= 4")
    return enumerate_group(reflection_matrices(datum, p))


# -- symmetric powers ----------------------------------------------------------------

@lru_cache(maxsize=64)
def poly_slice(r: int, d: int) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted(compositions(d, r)))


@lru_cache(maxsize=64)
def _slice_index(r: int, d: int) -> dict:
    return {m: i for i, m in enumerate(poly_slice(r, d))}


def _structure(r: int, d: int):
    """For degree d: parent index in degree d-1 and the variable removed, plus the
    multiplication-by-t_j index maps from degree d-1 to degree d."""
    monos = poly_slice(r, d)
    prev = _slice_index(r, d - 1)
    idx = _slice_index(r, d)
    parent = np.empty(len(monos), dtype=np.int64)
    var = np.empty(len(monos), dtype=np.int64)
    for k, m in enumerate(monos):
        i = next(i for i, a in enumerate(m) if a)
        lower = list(m)
        lower[i] -= 1
        parent[k] = prev[tuple(lower)]
        var[k] = i
    mult = []
    for j in range(r):
        arr = np.empty(len(prev), dtype=np.int64)
        for m, k in prev.items():
            up = list(m)
            up[j] += 1
            arr[k] = idx[tuple(up)]
        mult.append(arr)
    return parent, var, mult


def symmetric_power_matrices(L: np.ndarray, p: int, D: int):
    """Yield (d, A_d) for d = 0..D, A_d[a, b] = coefficient of monomial b in L(monomial a)."""
    r = L.shape[0]
    A = np.ones((1, 1), dtype=np.int64)
    yield 0, A
    for d in range(1, D + 1):
        parent, var, mult = _structure(r, d)
        n = len(parent)
        B = np.zeros((n, n), dtype=np.int64)
        P = A[parent]
        for j in range(r):
            coef = L[var, j] % p
            if not coef.any():
                continue
            B[:, mult[j]] += coef[:, None] * P
        B %= p
        A = B
        yield d, A


def weyl_invariant_dims(datum: RootDatum, p: int, D: int, budget: int = 5000) -> list[int]:
    """dim H^{2d}(BT)^W for 2d <= D, listed by cohomological degree (odd entries 0)."""
    mats = [np.array(g.rows, dtype=np.int64) for g in reflection_matrices(datum, p)]
    top = D // 2
    if len(poly_slice(datum.rank, top)) > budget:
        raise BudgetExceeded(f"{datum.label}: degree-{top} polynomial slice exceeds {budget}")
    gens = [symmetric_power_matrices(L, p, top) for L in mats]
    dims = [0] * (D + 1)
    for per_degree in zip(*gens):
        d = per_degree[0][0]
        n = per_degree[0][1].shape[0]
        blocks = [(A.T - np.eye(n, dtype=np.int64)) % p for _, A in per_degree]
        dims[2 * d] = int(linalg.stacked_nullspace(blocks, n, p).shape[0])
    return dims


def weyl_invariant_basis(datum: RootDatum, p: int, d: int) -> np.ndarray:
    """Canonical basis (rows over poly_slice(r, d)) of the degree-d W-invariant polynomials."""
    mats = [np.array(g.rows, dtype=np.int64) for g in reflection_matrices(datum, p)]
    blocks = []
    for L in mats:
        A = None
        for k, A in symmetric_power_matrices(L, p, d):
            pass
        blocks.append((A.T - np.eye(A.shape[0], dtype=np.int64)) % p)
    return linalg.stacked_nullspace(blocks, len(poly_slice(datum.rank, d)), p)


# -- comparison with the known part ------------------------------------------------------

def known_part(case_key: str, D: int) -> list[int]:
    from .cases import get_case, series_M
    c = get_case(case_key)
    a = series_M(c, "M0even/e", D)
    b = series_M(c, "M1even/e", D)
    return [x + y for x, y in zip(a, b)]


def status(computed: int, known: int) -> str:
    if computed == known:
        return "equal"
    return "computed-exceeds-known" if computed > known else "VIOLATION"


def compare_theorem_main(case_key: str, D: int, dims: list[int] | None = None) -> Report:
    from .cases import get_case
    p = get_case(case_key).p
    datum = root_datum(*CASE_DATA[case_key])
    dims = dims if dims is not None else weyl_invariant_dims(datum, p, D)
    known = known_part(case_key, D)
    rep = Report("weyl", {"case": case_key, "D": D, "lattice": datum.label})
    excess = []
    for deg in range(0, D + 1, 2):
        st = status(dims[deg], known[deg])
        check(rep.rows, deg, f"dim H^{deg}(BT)^W >= known part ({st})", known[deg], dims[deg], WEYL_REF,
              passed=st != "VIOLATION")
        if dims[deg] > known[deg]:
            excess.append((deg, dims[deg] - known[deg]))
    rep.notes.append("inferred even Ker xi* candidates (degree, excess): " + repr(excess))
    return rep


def golden_csv(case_key: str, D: int, dims: list[int]) -> str:
    known = known_part(case_key, D)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["degree", "computed_dim", "known_part", "status"])
    for deg in range(0, D + 1, 2):
        w.writerow([deg, dims[deg], known[deg], status(dims[deg], known[deg])])
    return buf.getvalue()


def control_series(D: int) -> list[int]:
    """Polynomial invariants on generators of degrees 4 and 6."""
    from .series import polynomial_ring_series
    return [int(x) for x in polynomial_ring_series([4, 6], D)]
