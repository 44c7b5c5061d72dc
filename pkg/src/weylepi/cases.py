"""The five (G, p) cases: free modules M_0, M_1 with their images in the
Weyl-invariants of the non-toral elementary abelian subgroup, and the
checks that these images split the image ring and fit into exact sequences."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

from .filtration import FiltrationModel, contains_all, span_of, split
from .koszul import KoszulElement, apply_matrix
from .mui import MuiModel, group_generators, invariant_basis, qbar_apply
from .report import Report, check
from .series import free_module_series
from .steenrod import milnor_q, reduced_power
from .linalg import SpanBuilder

CASE_KEYS = ("pu3", "pu5", "f4", "e6", "e7", "e8")
IMAGE_REF = "images of M_0 and M_1 split the image of xi* and fit into exact sequences"
CLOSURE_REF = "image of xi* is generated over the Steenrod algebra by the listed classes"


# -- image expressions ----------------------------------------------------------
# ("base", name) | ("Q", i, e) | ("P", k, e) | ("mul", a, b) | ("neg", e) | ("one",)

def evaluate(expr, M: MuiModel, memo: dict | None = None) -> KoszulElement:
    memo = {} if memo is None else memo
    if expr in memo:
        return memo[expr]
    op = expr[0]
    if op == "one":
        val = M.ctx.one()
    elif op == "base":
        val = _base(expr[1], M)
    elif op == "Q":
        val = milnor_q(expr[1], evaluate(expr[2], M, memo))
    elif op == "P":
        val = reduced_power(expr[1], evaluate(expr[2], M, memo))
    elif op == "mul":
        val = evaluate(expr[1], M, memo) * evaluate(expr[2], M, memo)
    elif op == "neg":
        val = -evaluate(expr[1], M, memo)
    else:
        raise ValueError(f"bad expression {expr!r}")
    memo[expr] = val
    return val


def _base(name: str, M: MuiModel) -> KoszulElement:
    ctx, n = M.ctx, M.n
    if name == "u":           # u_n
        return M.ubar if M.family == "sl" else ctx.monomial((0,) * n, range(n))
    if name == "Obar u":      # f_n^{-1} O_{n-1} u_n = u_{n-1}
        return qbar_apply("gn", n - 1, ctx.monomial((0,) * n, range(n)))
    if name.startswith("ring:"):
        return M.ring_elements[int(name[5:])]
    if name == "f":
        from .mui import f_class
        return f_class(ctx)
    raise ValueError(name)


def render(expr) -> str:
    op = expr[0]
    if op == "one":
        return "1"
    if op == "base":
        return {"u": "u_n", "Obar u": "Obar u_n", "f": "f_n"}.get(expr[1], expr[1])
    if op == "Q":
        return f"Q{expr[1]}({render(expr[2])})"
    if op == "P":
        return f"P^{expr[1]}({render(expr[2])})"
    if op == "mul":
        return f"{render(expr[1])}*{render(expr[2])}"
    if op == "neg":
        return f"-{render(expr[1])}"
    raise ValueError(expr)


def _Q(i, e):
    return ("Q", i, e)


def _P(k, e):
    return ("P", k, e)


def _neg(e):
    return ("neg", e)


def _mul(a, b):
    return ("mul", a, b)


ONE = ("one",)


@dataclass(frozen=True)
class Generator:
    label: str
    degree: int
    image: tuple


@dataclass(frozen=True)
class CaseSpec:
    key: str
    group: str
    p: int
    m: int
    k: int
    n: int
    i: int
    ell: int
    family: str
    ring: tuple[tuple[str, int], ...]
    M0: tuple[Generator, ...]
    M1: tuple[Generator, ...]
    closure_generators: tuple[tuple[str, tuple], ...]
    restrict_top: bool = False    # image lies in the submodule generated by Obar u_n
    notes: tuple[str, ...] = field(default=())

    @property
    def euler_degree(self) -> int:
        return next(d for l, d in self.ring if l.startswith("e_"))

    @property
    def y_m1(self) -> tuple:
        """Image of y_{m+1}: Q_0 u_2 for PU(p), -Q_1 y_4 = Q_0 Q_1 u_3 otherwise."""
        return next(g.image for g in self.M1 if g.degree == self.m + 1)

    def to_dict(self) -> dict:
        gens = lambda gs: [{"label": g.label, "degree": g.degree, "image": render(g.image)} for g in gs]
        return {"key": self.key, "group": self.group, "p": self.p, "m": self.m, "k": self.k,
                "rank_A": self.n, "i": self.i, "ell": self.ell, "family": self.family,
                "R": [{"label": l, "degree": d} for l, d in self.ring],
                "M0": gens(self.M0), "M1": gens(self.M1),
                "closure_generators": [l for l, _ in self.closure_generators],
                "notes": list(self.notes)}


def _deg_of(expr, p, base_deg) -> int:
    op = expr[0]
    if op == "one":
        return 0
    if op == "base":
        return base_deg[expr[1]]
    if op == "Q":
        return _deg_of(expr[2], p, base_deg) + 2 * p ** expr[1] - 1
    if op == "P":
        return _deg_of(expr[2], p, base_deg) + 2 * expr[1] * (p - 1)
    if op == "mul":
        return _deg_of(expr[1], p, base_deg) + _deg_of(expr[2], p, base_deg)
    return _deg_of(expr[1], p, base_deg)


def _make(labels_exprs, p, base_deg):
    return tuple(Generator(l, _deg_of(e, p, base_deg), e) for l, e in labels_exprs)


def _pu(p: int) -> CaseSpec:
    desc = MuiModel("sl", 2, p).description
    y2 = ("base", "u")
    base_deg = {"u": 2}
    M0 = _make([("1", ONE), (f"y_{2 * p + 1}", _Q(1, y2))], p, base_deg)
    M1 = _make([("y_3", _Q(0, y2)), ("y_2", y2)], p, base_deg)
    ring = tuple(sorted(((r.label.replace("e_n", "e_2"), r.degree) for r in desc.ring), key=lambda t: t[1]))
    closure = (("u_2", y2), ("c_{2,1}", ("base", "ring:0")))
    return CaseSpec(f"pu{p}", f"PU({p})", p, 2, 2, 2, 0, 1, "sl", ring, M0, M1, closure)


def _f4e8(key: str, group: str, p: int) -> CaseSpec:
    desc = MuiModel("sl", 3, p).description
    y4 = _Q(0, ("base", "u"))
    base_deg = {"u": 3}
    y8 = _P(1, y4)
    y9 = _neg(_Q(1, y4))
    y20 = _P(p, _P(1, y4))
    M0 = _make([("1", ONE), (f"y_{2 * p * p + 2}", y20), (f"y_{2 * p * p + 3}", _neg(_Q(2, y4))),
                (f"y_{2 * p * p + 2 * p + 1}", _neg(_Q(2, y8)))], p, base_deg)
    M1 = _make([(f"y_{2 * p + 3}", y9), (f"y_{2 * p + 3}y_{2 * p * p + 2}", _mul(y9, y20)),
                ("y_4", y4), (f"y_{2 * p + 2}", y8)], p, base_deg)
    ring = tuple(sorted(((r.label.replace("e_n", "e_3"), r.degree) for r in desc.ring), key=lambda t: t[1]))
    closure = (("Q_0u_3", y4), ("c_{3,1}", ("base", "ring:0")), ("c_{3,2}", ("base", "ring:1")))
    return CaseSpec(key, group, p, 2 * p + 2, 3, 3, 1, 2, "sl", ring, M0, M1, closure)


def _e6e7(key: str) -> CaseSpec:
    p = 3
    family = "gn" if key == "e6" else "gnp"
    desc = MuiModel(family, 4, p).description
    base_deg = {"Obar u": 3, "u": 4}
    y4 = _Q(0, ("base", "Obar u"))
    y8 = _P(1, y4)
    y9 = _neg(_Q(1, y4))
    y20 = _P(3, _P(1, y4))
    ring = tuple(sorted(((r.label.replace("e_{n-1}", "e_3").replace("f_n^{p-1}", "f_4^2").replace("f_n", "f_4"), r.degree) for r in desc.ring),
                        key=lambda t: t[1]))
    if key == "e6":
        y10 = _Q(0, _Q(1, ("base", "u")))
        y22 = _P(3, y10)
        y26 = _P(1, y22)
        y30 = _mul(y10, y20)
        M0 = _make([("1", ONE), ("y_22", y22), ("y_26", y26), ("y_20", y20), ("Q_2y_10", _Q(2, y10)),
                    ("Q_2y_4", _Q(2, y4)), ("Q_2y_8", _Q(2, y8)), ("Q_2y_30", _Q(2, y30))], p, base_deg)
        M1 = _make([("y_9", y9), ("y_9y_22", _mul(y9, y22)), ("y_9y_26", _mul(y9, y26)), ("y_9y_20", _mul(y9, y20)),
                    ("y_10", y10), ("y_4", y4), ("y_8", y8), ("y_30", y30)], p, base_deg)
        closure = (("Q_0u_3", y4), ("c_{3,1}", ("base", "ring:0")), ("c_{3,2}", ("base", "ring:1")),
                   ("Q_0Q_1u_4", y10), ("O_3(dt_1)", ("base", "f")))
        notes = ("images are computed from the M_0/M_1 generator lists; the displayed image list of xi*M_0 repeats a term",)
        return CaseSpec("e6", "E_6", p, 8, 3, 4, 2, 2, family, ring, M0, M1, closure, False, notes)
    M0 = _make([("1", ONE), ("y_20", y20), ("Q_2y_4", _Q(2, y4)), ("Q_2y_8", _Q(2, y8))], p, base_deg)
    M1 = _make([("y_9", y9), ("y_9y_20", _mul(y9, y20)), ("y_4", y4), ("y_8", y8)], p, base_deg)
    closure = (("Q_0u_3", y4), ("c_{3,1}", ("base", "ring:0")), ("c_{3,2}", ("base", "ring:1")),
               ("O_3(dt_1)^2", _mul(("base", "f"), ("base", "f"))))
    return CaseSpec("e7", "E_7", p, 8, 3, 4, 2, 2, family, ring, M0, M1, closure, True)


@lru_cache(maxsize=None)
def case_table() -> tuple[CaseSpec, ...]:
    return (_pu(3), _pu(5), _f4e8("f4", "F_4", 3), _e6e7("e6"), _e6e7("e7"), _f4e8("e8", "E_8", 5))


def get_case(key: str) -> CaseSpec:
    for c in case_table():
        if c.key == key:
            return c
    raise KeyError(f"unknown case {key!r}; expected one of {CASE_KEYS}")


def case_table_json() -> str:
    return json.dumps([c.to_dict() for c in case_table()], indent=2, sort_keys=True) + "\n"


# -- series --------------------------------------------------------------------------

SERIES_PARTS = ("M0", "M1", "M0even/e", "M1even/e")


def series_M(case: CaseSpec, part: str, D: int) -> list[int]:
    """Poincare series of M_0, M_1 or of M^even/(e_k), from generator degrees."""
    if part not in SERIES_PARTS:
        raise ValueError(f"unknown part {part!r}; expected one of {SERIES_PARTS}")
    gens = case.M0 if part.startswith("M0") else case.M1
    degs = [g.degree for g in gens]
    ring = [d for _, d in case.ring]
    if part.endswith("even/e"):
        degs = [d for d in degs if d % 2 == 0]
        ring.remove(case.euler_degree)
    return free_module_series(degs, ring, D)


def series_M_odd(case: CaseSpec, part: str, D: int) -> list[int]:
    gens = case.M0 if part == "M0" else case.M1
    return free_module_series([g.degree for g in gens if g.degree % 2], [d for _, d in case.ring], D)


# -- images inside the invariant ring ----------------------------------------------------

class CaseModel:
    def __init__(self, case: CaseSpec, maxdeg: int, cache=None):
        self.case = case
        self.maxdeg = maxdeg
        self.mui = MuiModel(case.family, case.n, case.p)
        self.F = FiltrationModel(case.family, case.n, case.p, maxdeg)
        self.H = group_generators(case.family, case.n, case.p)
        self.cache = cache
        self._memo: dict = {}

    def image(self, g: Generator) -> KoszulElement:
        return evaluate(g.image, self.mui, self._memo)

    def span(self, part: str, d: int) -> list[KoszulElement]:
        """R-multiples of the images of the generators of M_0 or M_1 in degree d."""
        gens = self.case.M0 if part == "M0" else self.case.M1
        out = []
        for g in gens:
            for x, _ in self.F._ring_by_degree.get(d - g.degree, []):
                out.append(self.mui.ring_monomial(x) * self.image(g))
        return out

    def invariant_span(self, d: int) -> SpanBuilder:
        sb = SpanBuilder(self.case.p)
        for b in invariant_basis(self.H, d, cache=self.cache):
            sb.add(b.terms)
        return sb


def xi_images(case: CaseSpec, d: int, model: CaseModel | None = None) -> dict:
    """Spanning sets of xi*M_0 and xi*M_1 in degree d, after checking every image is invariant."""
    cm = model or CaseModel(case, d)
    for g in case.M0 + case.M1:
        x = cm.image(g)
        if x and x.degree() != g.degree:
            raise AssertionError(f"{g.label}: image has degree {x.degree()}, expected {g.degree}")
        for h in cm.H.generators:
            if apply_matrix(h, x) != x:
                raise AssertionError(f"{g.label}: image {render(g.image)} is not invariant")
    return {"M0": cm.span("M0", d), "M1": cm.span("M1", d)}


def check_prop_image(case: CaseSpec, maxdeg: int, cache=None, model: CaseModel | None = None) -> Report:
    cm = model or CaseModel(case, maxdeg, cache)
    p = case.p
    rep = Report("prop43", {"case": case.key, "max_deg": maxdeg})
    S = split(case.ell, case.i, case.family, case.n, p)
    F = cm.F
    top = case.n - 1

    def keep(b):
        return not case.restrict_top or not b.in_F or top in b.index_set

    ym1 = evaluate(case.y_m1, cm.mui, cm._memo)
    qk = case.k - 1
    shift_q = 2 * p**qk - 1
    e = cm.mui.euler
    edeg = case.euler_degree
    s = {part: series_M(case, part, maxdeg) for part in SERIES_PARTS}
    for g in case.M0 + case.M1:
        x = cm.image(g)
        ok = (not x or x.degree() == g.degree) and all(apply_matrix(h, x) == x for h in cm.H.generators)
        if g.degree <= maxdeg and x:
            ok = ok and cm.invariant_span(g.degree).contains(x.terms)
        check(rep.rows, g.degree, f"xi*({g.label}) = {render(g.image)} is a nonzero invariant", True,
              bool(ok and x), IMAGE_REF)
    for d in range(maxdeg + 1):
        m0, m1 = cm.span("M0", d), cm.span("M1", d)
        s0, s1 = span_of(m0, p), span_of(m1, p)
        both = span_of(m0 + m1, p)
        basis = F.basis(d)
        n0 = span_of(F.elements([b for b in basis if S.in_N0(b) and keep(b)]), p)
        n1 = span_of(F.elements([b for b in basis if S.in_N1(b) and keep(b)]), p)
        check(rep.rows, d, "(1) dim xi*M_0 + dim xi*M_1 = dim of the sum = series",
              [s["M0"][d] + s["M1"][d]] * 2, [len(s0) + len(s1), len(both)], IMAGE_REF)
        eq0 = len(s0) == len(n0) and contains_all(n0, m0)
        eq1 = len(s1) == len(n1) and contains_all(n1, m1)
        check(rep.rows, d, "(1) xi*M_0 = N_0 and xi*M_1 = N_1 as subspaces", [True, True], [eq0, eq1], IMAGE_REF)
        if case.family == "sl" and case.n == 2:
            inv = cm.invariant_span(d)
            check(rep.rows, d, "(1) xi* onto the invariant ring", len(inv), len(both), IMAGE_REF)
        # (2) multiplication by xi*(y_{m+1})
        src = cm.span("M0", d - case.m - 1)
        img = span_of([ym1 * x for x in src], p)
        check(rep.rows, d, "(2) y_{m+1}: injective, into xi*M_1, cokernel = M_1^even/(e_k)",
              [s["M0"][d - case.m - 1] if d > case.m else 0, True, s["M1even/e"][d]],
              [len(img), contains_all(s1, [ym1 * x for x in src]), len(s1) - len(img)], IMAGE_REF)
        # (3) Q_{k-1}
        src = cm.span("M1", d - shift_q)
        imgs = [milnor_q(qk, x) for x in src]
        img = span_of(imgs, p)
        check(rep.rows, d, f"(3) Q_{qk}: injective, into xi*M_0, cokernel = M_0^even/(e_k)",
              [s["M1"][d - shift_q] if d >= shift_q else 0, True, s["M0even/e"][d]],
              [len(img), contains_all(s0, imgs), len(s0) - len(img)], IMAGE_REF)
        # the e_k quotients as explicit cokernels
        for part, sp in (("M0", s0), ("M1", s1)):
            if d % 2 == 0:
                low = span_of([e * x for x in cm.span(part, d - edeg)], p)
                got = len(sp) - len(low)
            else:
                got = 0
            check(rep.rows, d, f"{part}^even/(e_k): explicit cokernel = series", s[f"{part}even/e"][d], got, IMAGE_REF)
    return rep


# -- Steenrod closure ------------------------------------------------------------------------

def steenrod_closure(gens, maxdeg: int, p: int, ctx) -> dict[int, SpanBuilder]:
    """Degreewise span of the smallest subalgebra containing ``gens`` and closed
    under the Bockstein and all reduced powers, truncated at ``maxdeg``."""
    spans: dict[int, SpanBuilder] = {}
    found: list[KoszulElement] = []
    queue: list[KoszulElement] = [ctx.one()] + [g for g in gens if g]

    def add(x: KoszulElement) -> None:
        if not x:
            return
        d = x.degree()
        if d > maxdeg:
            return
        sb = spans.setdefault(d, SpanBuilder(p))
        v = sb.reduce(x.terms)
        if v and sb.add(v):
            queue.append(KoszulElement._raw(ctx, v))

    pending = queue
    queue = []
    for x in pending:
        add(x)
    while queue:
        x = queue.pop(0)
        d = x.degree()
        found.append(x)
        add(milnor_q(0, x))
        k = 1
        while 2 * k <= d and d + 2 * k * (p - 1) <= maxdeg:
            add(reduced_power(k, x))
            k += 1
        for y in found:
            if d + y.degree() <= maxdeg:
                add(x * y)
    return spans


def steenrod_closure_check(case: CaseSpec, maxdeg: int, cache=None, model: CaseModel | None = None) -> Report:
    cm = model or CaseModel(case, maxdeg, cache)
    p = case.p
    rep = Report("thm42-closure", {"case": case.key, "max_deg": maxdeg})
    gens = [evaluate(e, cm.mui, cm._memo) for _, e in case.closure_generators]
    spans = steenrod_closure(gens, maxdeg, p, cm.mui.ctx)
    for d in range(maxdeg + 1):
        target = cm.span("M0", d) + cm.span("M1", d)
        tsp = span_of(target, p)
        csp = spans.get(d, SpanBuilder(p))
        same = len(tsp) == len(csp) and contains_all(csp, target)
        check(rep.rows, d, "closure of listed generators = xi*M_0 + xi*M_1", len(tsp),
              len(csp) if same else f"{len(csp)} (different span)", CLOSURE_REF, passed=same)
    rep.notes.append("generators: " + ", ".join(l for l, _ in case.closure_generators))
    return rep
