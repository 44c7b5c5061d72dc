"""Suite drivers: each returns a :class:`Report` for one verification suite.

Degree-parallel work goes through :func:`_map_degrees`; results are always
reassembled in degree order, so the report does not depend on ``jobs``.
"""
from __future__ import annotations

import random
from pathlib import Path
from concurrent.futures import ProcessPoolExecutor

from . import weyl
from .cache import Cache
from .cases import CaseModel, check_prop_image, get_case, steenrod_closure_check
from .filtration import FiltrationModel, check_exact_sequences, check_filtration_statements, verify_product_law
from .koszul import KoszulCtx, KoszulElement, slice_basis
from .mui import (
    SubspaceSpec,
    euler_class,
    exact_divide,
    f_class,
    group_generators,
    invariant_basis,
    omega_apply,
    predicted_series,
    top_form,
)
from .report import Report, check
from .serre import einfty_identity
from .steenrod import milnor_q, milnor_q_recursive, q_composite

STEENROD_REF = "Milnor primitives: Q_i^2 = 0, Q_iQ_j = -Q_jQ_i, odd derivation, Q_{i+1} = [P^{p^i}, Q_i]"
DIVISION_REF = "f_n^{-1} O_{n-1} u_n = u_{n-1} and f_n^{-1} Q_0...Q_{n-2} O_{n-1} u_n = e_{n-1}"
MUI_REF = "invariants form the free R-module on Qbar_I ubar_n, I a proper subset of Delta_n, plus R"

# (n) -> (i, ell) used when the split is not given explicitly
DEFAULT_SPLITS = {2: (0, 1), 3: (1, 2), 4: (2, 2)}
DEFAULT_MAX_DEG = {"steenrod": 30, "thm41": 60, "prop33": 40, "prop34": 40, "prop43": 40,
                   "thm42-closure": 40, "serre": 200, "weyl": 40}


def _open_cache(cache_dir):
    return Cache(cache_dir) if cache_dir else None


def _map_degrees(fn, args_list, jobs: int):
    if jobs <= 1 or len(args_list) <= 1:
        return [fn(*a) for a in args_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, *zip(*args_list)))


# -- Milnor primitives ------------------------------------------------------------

def _random_element(ctx: KoszulCtx, d: int, rng: random.Random) -> KoszulElement:
    sl = slice_basis(ctx, d)
    picks = rng.sample(range(len(sl)), min(len(sl), 4))
    return KoszulElement(ctx, {sl.basis[j]: rng.randrange(1, ctx.p) for j in picks})


def steenrod_suite(n: int, p: int, D: int = 30, pairs: int = 300, seed: int = 0, max_i: int = 2) -> Report:
    """Identities of Q_0..Q_max_i on every slice basis element up to degree D, plus Leibniz on random pairs."""
    ctx = KoszulCtx(p, n)
    rep = Report("steenrod", {"n": n, "p": p, "max_deg": D, "pairs": pairs, "seed": seed, "max_i": max_i})
    idx = range(max_i + 1)
    for d in range(D + 1):
        bad = {"square": 0, "anti": 0, "closed": 0}
        sl = slice_basis(ctx, d)
        for mono in sl.basis:
            x = KoszulElement._raw(ctx, {mono: 1})
            q = {i: milnor_q(i, x) for i in idx}
            for i in idx:
                bad["square"] += not milnor_q(i, q[i]).is_zero()
                bad["closed"] += q[i] != milnor_q_recursive(i, x)
                for j in range(i + 1, max_i + 1):
                    bad["anti"] += not (milnor_q(i, q[j]) + milnor_q(j, q[i])).is_zero()
        size = len(sl)
        check(rep.rows, d, f"Q_i Q_i x = 0 on {size} basis elements", 0, bad["square"], STEENROD_REF)
        check(rep.rows, d, f"Q_i Q_j x = -Q_j Q_i x on {size} basis elements", 0, bad["anti"], STEENROD_REF)
        check(rep.rows, d, f"closed form = commutator recursion on {size} basis elements", 0, bad["closed"],
              STEENROD_REF)
    rng = random.Random(seed)
    bad = 0
    for _ in range(pairs):
        a = rng.randint(0, D)
        b = rng.randint(0, D - a)
        x, y = _random_element(ctx, a, rng), _random_element(ctx, b, rng)
        sign = -1 if a % 2 else 1
        for i in idx:
            lhs = milnor_q(i, x * y)
            rhs = milnor_q(i, x) * y + sign * (x * milnor_q(i, y))
            bad += lhs != rhs
    check(rep.rows, None, f"signed Leibniz rule on {pairs} random pairs", 0, bad, STEENROD_REF)
    return rep


# -- exact divisions ------------------------------------------------------------------

def division_suite(n: int, p: int) -> Report:
    ctx = KoszulCtx(p, n)
    rep = Report("division", {"n": n, "p": p})
    f = f_class(ctx)
    u = top_form(ctx, SubspaceSpec.full(n))
    V = SubspaceSpec.sub(n)
    Ou = omega_apply(u)
    q1 = exact_divide(Ou, f)
    check(rep.rows, Ou.degree(), "remainder of O_{n-1} u_n modulo f_n", 0, len(Ou - q1 * f), DIVISION_REF)
    check(rep.rows, q1.degree(), "f_n^{-1} O_{n-1} u_n = u_{n-1}", True, q1 == top_form(ctx, V), DIVISION_REF)
    x = q_composite(range(n - 1), Ou)
    q2 = exact_divide(x, f)
    check(rep.rows, x.degree(), "remainder of Q_0...Q_{n-2} O_{n-1} u_n modulo f_n", 0, len(x - q2 * f),
          DIVISION_REF)
    check(rep.rows, q2.degree(), "f_n^{-1} Q_0...Q_{n-2} O_{n-1} u_n = e_{n-1}", True, q2 == euler_class(ctx, V),
          DIVISION_REF)
    return rep


# -- invariant dimensions -----------------------------------------------------------------

def _invariant_dim(family: str, n: int, p: int, d: int, cache_dir) -> int:
    return len(invariant_basis(group_generators(family, n, p), d, cache=_open_cache(cache_dir)))


def invariant_dimension_suite(family: str, n: int, p: int, D: int, jobs: int = 1, cache_dir=None) -> Report:
    H = group_generators(family, n, p)
    rep = Report("thm41", {"family": family, "n": n, "p": p, "max_deg": D})
    predicted = predicted_series(H, D)
    dims = _map_degrees(_invariant_dim, [(family, n, p, d, cache_dir) for d in range(D + 1)], jobs)
    for d in range(D + 1):
        check(rep.rows, d, f"dim of degree-{d} invariants = free-module series", predicted[d], dims[d], MUI_REF)
    return rep


# -- thin wrappers so every suite has the same calling shape ---------------------------------

def resolve_split(n: int, i: int | None, ell: int | None) -> tuple[int, int]:
    if i is None or ell is None:
        if n not in DEFAULT_SPLITS:
            raise ValueError(f"no default (i, ell) for n={n}; pass --i and --ell")
        di, dl = DEFAULT_SPLITS[n]
        i = di if i is None else i
        ell = dl if ell is None else ell
    return i, ell


def filtration_suite(family, n, p, D, i=None, ell=None) -> Report:
    i, ell = resolve_split(n, i, ell)
    return check_filtration_statements(family, n, i, ell, p, D, FiltrationModel(family, n, p, D))


def exact_sequence_suite(family, n, p, D, i=None, ell=None) -> Report:
    i, ell = resolve_split(n, i, ell)
    return check_exact_sequences(family, n, i, ell, p, D, FiltrationModel(family, n, p, D))


def image_split_suite(case_key: str, D: int, cache_dir=None) -> Report:
    case = get_case(case_key)
    return check_prop_image(case, D, model=CaseModel(case, D, _open_cache(cache_dir)))


def closure_suite(case_key: str, D: int, cache_dir=None) -> Report:
    case = get_case(case_key)
    return steenrod_closure_check(case, D, model=CaseModel(case, D, _open_cache(cache_dir)))


def serre_suite(case_key: str, D: int) -> Report:
    return einfty_identity(get_case(case_key), D)


def product_law_suite(family: str, n: int, p: int) -> Report:
    return verify_product_law(family, n, p)


# -- Weyl invariants ----------------------------------------------------------------------

def _weyl_dim(case_key: str, d: int) -> int:
    datum = weyl.root_datum(*weyl.CASE_DATA[case_key])
    return int(weyl.weyl_invariant_basis(datum, weyl.case_prime(case_key), d).shape[0])


def weyl_dims(case_key: str, D: int, jobs: int = 1, cache_dir=None, allow_large: bool = False) -> list[int]:
    """Per-degree invariant dimensions, cached per polynomial degree."""
    if case_key not in weyl.DESK_CASES and case_key != "su3" and not allow_large:
        raise weyl.BudgetExceeded(f"{case_key}: direct Weyl runs are opt-in (allow_large)")
    datum = weyl.root_datum(*weyl.CASE_DATA[case_key])
    p = weyl.case_prime(case_key)
    cache = _open_cache(cache_dir)
    top = D // 2
    found: dict[int, int] = {}
    if cache is not None:
        for d in range(top + 1):
            hit = cache.get(cache.key("weyl_dim", datum.label, p, d))
            if hit is not None:
                found[d] = hit
    missing = [d for d in range(top + 1) if d not in found]
    if missing:
        if jobs <= 1:
            full = weyl.weyl_invariant_dims(datum, p, 2 * max(missing))
            fresh = {d: full[2 * d] for d in missing}
        else:
            if len(weyl.poly_slice(datum.rank, max(missing))) > 5000:
                raise weyl.BudgetExceeded(f"{datum.label}: slice too large")
            vals = _map_degrees(_weyl_dim, [(case_key, d) for d in missing], jobs)
            fresh = dict(zip(missing, vals))
        for d, v in fresh.items():
            found[d] = v
            if cache is not None:
                cache.put(cache.key("weyl_dim", datum.label, p, d), v)
    dims = [0] * (D + 1)
    for d in range(top + 1):
        dims[2 * d] = found[d]
    return dims


def weyl_suite(case_key: str, D: int, jobs: int = 1, cache_dir=None, allow_large: bool = False,
               golden: str | None = None) -> Report:
    dims = weyl_dims(case_key, D, jobs, cache_dir, allow_large)
    if case_key != "su3":
        rep = weyl.compare_theorem_main(case_key, D, dims)
        if golden is not None:
            want = Path(golden).read_text()
            got = weyl.golden_csv(case_key, D, dims)
            differ = [a for a, b in zip(want.splitlines(), got.splitlines()) if a != b]
            check(rep.rows, None, f"full table equals golden file {Path(golden).name}", True, want == got,
                  weyl.WEYL_REF)
            if differ:
                rep.notes.append("golden mismatch, first differing row: " + differ[0])
        return rep
    rep = Report("weyl", {"case": case_key, "D": D, "lattice": "A2/weight"})
    control = weyl.control_series(D)
    for deg in range(0, D + 1, 2):
        check(rep.rows, deg, f"dim H^{deg}(BT)^W = polynomial invariants on degrees 4, 6",
              control[deg], dims[deg], weyl.CONTROL_REF)
    return rep
