"""Weight filtration on the Mui invariant rings, the E/Ê splitting and
the two multiplication/Milnor exact sequences, checked on explicit spans."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg
from .koszul import KoszulElement, sign_interleave, _perm_sign
from .mui import FAMILIES, MuiModel, qbar_apply, qbar_shift
from .report import Report, check
from .series import free_module_series

PRODUCT_REF = "product of two Mui generators: zero unless I and J cover Delta_n, else a signed e-multiple of Q_K u_n"
PARITY_REF = "parity of the weight pieces F_i and F_n"
QUOTIENT_REF = "weight n-1 and n pieces of the complement of E(l) modulo z_l"
SES_REF = "short exact sequences for multiplication by z_l and for Q_l between N_0 and N_1"


# -- product law -----------------------------------------------------------

def sgn(I, J) -> int:
    """Sign of the permutation listing I then J (both increasing); 1 if either is empty."""
    return sign_interleave(I, J)


def product_law(I, J, n: int):
    """Predicted Q_I u_n * Q_J u_n as None (zero) or (sign, K) meaning sign * e_n * Q_K u_n."""
    I, J = tuple(sorted(I)), tuple(sorted(J))
    full = set(range(n))
    if set(I) | set(J) != full:
        return None
    K = tuple(sorted(set(I) & set(J)))
    IK = tuple(sorted(set(I) - set(K)))
    r = len(IK)
    sign = (-1) ** (n * r + r * r) * sgn(K, IK) * sgn(IK, J)
    return sign, K


def all_subsets(n: int) -> list[tuple[int, ...]]:
    return [c for r in range(n + 1) for c in itertools.combinations(range(n), r)]


def verify_product_law(family: str, n: int, p: int, model: MuiModel | None = None) -> Report:
    """Honest products of every pair of (barred) Mui generators against the closed formula."""
    M = model or MuiModel(family, n, p)
    rep = Report("lemma31", {"family": family, "n": n, "p": p})
    e = M.euler
    for I in all_subsets(n):
        for J in all_subsets(n):
            lhs = M.module_element(I) * M.module_element(J)
            law = product_law(I, J, n)
            rhs = M.ctx.zero() if law is None else law[0] * (e * M.module_element(law[1]))
            pred = "0" if law is None else f"{'+' if law[0] > 0 else '-'}e*Q{list(law[1])}"
            check(rep.rows, lhs.degree() if lhs else None, f"Q{list(I)}u * Q{list(J)}u", pred,
                  pred if lhs == rhs else "mismatch", PRODUCT_REF)
            if law is not None:
                # weight additivity: |I| + |J| = n + |K| whenever the product is nonzero
                if not len(I) + len(J) == n + len(law[1]):
                    rep.rows[-1].passed = False
    return rep


# -- the filtration ------------------------------------------------------------

@dataclass(frozen=True)
class WeightedGenerator:
    """x * Qbar_I ubar for an R-monomial x; ``index_set`` None marks the summand R itself."""
    ring: tuple[int, ...]
    index_set: tuple[int, ...] | None
    degree: int
    weight: int

    @property
    def in_F(self) -> bool:
        return self.index_set is not None

    def label(self, ring_labels) -> str:
        parts = [f"{l}^{a}" if a > 1 else l for l, a in zip(ring_labels, self.ring) if a]
        if self.index_set is not None:
            parts.append("Qbar%s ubar" % list(self.index_set))
        return "*".join(parts) or "1"


class FiltrationModel:
    """Degreewise bases of R + F_{inf,0} with weights, evaluated lazily."""

    def __init__(self, family: str, n: int, p: int, maxdeg: int):
        if family not in FAMILIES:
            raise ValueError(family)
        self.family, self.n, self.p, self.maxdeg = family, n, p, maxdeg
        self.mui = MuiModel(family, n, p)
        self.ctx = self.mui.ctx
        self._elements: dict = {}

    @property
    def k(self) -> int:
        return self.n if self.family == "sl" else self.n - 1

    @cached_property
    def _ring_by_degree(self) -> dict:
        out: dict = {}
        for exps, deg, w in self.mui.ring_monomials(self.maxdeg):
            out.setdefault(deg, []).append((exps, w))
        return out

    @cached_property
    def ring_labels(self) -> list[str]:
        return [r.label for r in self.mui.description.ring]

    def basis(self, d: int) -> list[WeightedGenerator]:
        if d < 0 or d > self.maxdeg:
            return []
        out = [WeightedGenerator(x, None, d, w) for x, w in self._ring_by_degree.get(d, [])]
        for g in self.mui.description.modules:
            for x, w in self._ring_by_degree.get(d - g.degree, []):
                out.append(WeightedGenerator(x, g.index_set, d, w + g.weight))
        return out

    def element(self, b: WeightedGenerator) -> KoszulElement:
        key = (b.ring, b.index_set)
        if key not in self._elements:
            x = self.mui.ring_monomial(b.ring)
            if b.index_set is not None:
                x = x * self.mui.module_element(b.index_set)
            self._elements[key] = x
        return self._elements[key]

    def elements(self, gens) -> list[KoszulElement]:
        return [self.element(b) for b in gens]


# -- sparse span helpers --------------------------------------------------------

def span_of(elements, p: int) -> linalg.SpanBuilder:
    sb = linalg.SpanBuilder(p)
    for x in elements:
        sb.add(x.terms)
    return sb


def contains_all(sb: linalg.SpanBuilder, elements) -> bool:
    return all(sb.contains(x.terms) for x in elements)


def intersection(A, B, p: int) -> list[dict]:
    """Basis of span(A) ∩ span(B) as sparse vectors (kernel of [A | -B])."""
    A = [a.terms for a in A if a]
    B = [b.terms for b in B if b]
    if not A or not B:
        return []
    keys = sorted({k for v in A + B for k in v})
    idx = {k: i for i, k in enumerate(keys)}
    mat = np.zeros((len(keys), len(A) + len(B)), dtype=np.int64)
    for c, v in enumerate(A):
        for k, a in v.items():
            mat[idx[k], c] = a
    for c, v in enumerate(B):
        for k, a in v.items():
            mat[idx[k], len(A) + c] = -a
    ker = linalg.nullspace(mat, len(A) + len(B), p)
    out = []
    for row in ker:
        vec: dict = {}
        for c, v in enumerate(A):
            if row[c]:
                for k, a in v.items():
                    vec[k] = (vec.get(k, 0) + int(row[c]) * a) % p
        vec = {k: a for k, a in vec.items() if a}
        if vec:
            out.append(vec)
    return out


# -- the splitting ------------------------------------------------------------------

@dataclass(frozen=True)
class SplitSpec:
    family: str
    n: int
    p: int
    ell: int
    i: int

    @property
    def k(self) -> int:
        return self.n if self.family == "sl" else self.n - 1

    @property
    def z_index(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.n) if j != self.ell)

    def in_E(self, b: WeightedGenerator) -> bool:
        return b.in_F and self.ell in b.index_set

    def in_Ehat(self, b: WeightedGenerator) -> bool:
        return b.in_F and self.ell not in b.index_set

    def in_N0(self, b: WeightedGenerator) -> bool:
        return (not b.in_F) or (self.in_E(b) and b.weight >= self.i)

    def in_N1(self, b: WeightedGenerator) -> bool:
        return self.in_Ehat(b) and b.weight >= self.i

    def module_generators(self, part: str) -> list[tuple[str, int, int]]:
        """R-module generators (label, index-set-or-None, e-power) of N_0 or N_1."""
        out = []
        if part == "N0":
            out.append(("1", None, 0))
        for r in range(self.n):
            for I in itertools.combinations(range(self.n), r):
                if (self.ell in I) != (part == "N0"):
                    continue
                a = 0 if len(I) >= self.i else -(-(self.i - len(I)) // self.n)
                out.append((("e^%d*" % a if a else "") + "Qbar%s ubar" % list(I), I, a))
        return out

    def series(self, part: str, D: int, even_mod_e: bool = False) -> list[int]:
        """Poincare series of N_0, N_1 or of N^even/(e_k) from generator degrees."""
        desc = MuiModel(self.family, self.n, self.p).description
        mdeg = {m.index_set: m.degree for m in desc.modules}
        edeg = desc.euler_degree()
        degs = [(0 if I is None else mdeg[I]) + a * edeg for _, I, a in self.module_generators(part)]
        ring = [r.degree for r in desc.ring]
        if even_mod_e:
            degs = [d for d in degs if d % 2 == 0]
            ring = list(ring)
            ring.remove(edeg)
        return free_module_series(degs, ring, D)


def split(ell: int, i: int, family: str, n: int, p: int) -> SplitSpec:
    """l ranges over 0..n-2; l = n-1 (z = Q_0...Q_{n-2} u_n) is allowed for SL_n only."""
    top = n - 1 if family == "sl" else n - 2
    if not 0 <= ell <= top:
        raise ValueError(f"split index {ell} outside 0..{top} for family {family}")
    if not 0 <= i <= n - 1:
        raise ValueError(f"lower weight {i} outside 0..{n - 1}")
    return SplitSpec(family, n, p, ell, i)


PARITY_TABLE = {
    # weight -> "F" if the even part is everything, "0" if it vanishes
    (2, 0): {0: "F", 1: "0"},
    (3, 1): {1: "F", 2: "0", 3: "0"},
    (4, 2): {2: "F", 3: "0", 4: "F", 5: "0"},
}


def _rank(elements, p) -> int:
    return len(span_of(elements, p))


def check_filtration_statements(family: str, n: int, i: int, ell: int, p: int, maxdeg: int,
                                model: FiltrationModel | None = None) -> Report:
    """Parity of F_i, F_n and the two quotient statements modulo R*z_l, degree by degree."""
    S = split(ell, i, family, n, p)
    F = model or FiltrationModel(family, n, p, maxdeg)
    rep = Report("prop33", {"family": family, "n": n, "i": i, "ell": ell, "p": p, "max_deg": maxdeg})
    zdeg = F.mui.module_element(S.z_index).degree()
    even_tot: dict = {}
    odd_tot: dict = {}
    for d in range(maxdeg + 1):
        basis = F.basis(d)
        by_w: dict = {}
        for b in basis:
            if b.in_F:
                by_w.setdefault(b.weight, []).append(b)
        dims = {w: _rank(F.elements(bs), p) for w, bs in by_w.items()}
        for w, dim in dims.items():
            (even_tot if d % 2 == 0 else odd_tot)[w] = (even_tot if d % 2 == 0 else odd_tot).get(w, 0) + dim
        if i < n:
            want_even = (n - i) % 2 == 0
            bad_parity = (d % 2 == 1) if want_even else (d % 2 == 0)
            if bad_parity:
                check(rep.rows, d, f"dim F_{i} in {'odd' if want_even else 'even'} degree", 0, dims.get(i, 0),
                      PARITY_REF)
        want_even = n % 2 == 0
        if (d % 2 == 1) if want_even else (d % 2 == 0):
            check(rep.rows, d, f"dim F_{n} in {'odd' if want_even else 'even'} degree", 0, dims.get(n, 0), PARITY_REF)
        # R*z_l in degree d
        Rz = [F.mui.ring_monomial(x) * F.mui.module_element(S.z_index) for x, _ in F._ring_by_degree.get(d - zdeg, [])]
        rz = span_of(Rz, p)
        Ehat = F.elements([b for b in basis if S.in_Ehat(b)])
        for w, label in ((n - 1, "(3)"), (n, "(4)")):
            Fw = F.elements(by_w.get(w, []))
            cap = intersection(Fw, Ehat, p)
            if w == n - 1:
                residue = rz.copy()
                for v in cap:
                    residue.add(v)
                check(rep.rows, d, f"{label} dim (F_{n - 1} ∩ Ê({ell}) + Rz)/Rz", 0, len(residue) - len(rz), QUOTIENT_REF)
            else:
                joint = rz.copy()
                for x in Fw:
                    joint.add(x.terms)
                inside = span_of(Ehat, p)
                ok = contains_all(inside, Fw) and len(cap) == _rank(Fw, p)
                check(rep.rows, d, f"{label} F_{n} injects into quotient and lies in Ê({ell})",
                      len(rz) + _rank(Fw, p), len(joint), QUOTIENT_REF, passed=ok and len(joint) == len(rz) + _rank(Fw, p))
    table = PARITY_TABLE.get((n, i))
    if table:
        for w, claim in sorted(table.items()):
            bad = odd_tot.get(w, 0) if claim == "F" else even_tot.get(w, 0)
            check(rep.rows, None, f"table: F_{w}^even = {'F_' + str(w) if claim == 'F' else '0'} "
                  f"(dim of the {'odd' if claim == 'F' else 'even'} part to degree {maxdeg})", 0, bad, PARITY_REF)
    return rep


def _ses_block(rep: Report, F: FiltrationModel, S: SplitSpec, d: int, name: str,
               source_pred, target_pred, op, shift: int, quotient_dim: int, p: int):
    src = F.elements([b for b in F.basis(d - shift) if source_pred(b)])
    tgt_basis = [b for b in F.basis(d) if target_pred(b)]
    tgt = span_of(F.elements(tgt_basis), p)
    images = [op(x) for x in src]
    img = span_of(images, p)
    src_dim = _rank(src, p)
    check(rep.rows, d, f"{name}: image inside target", True, contains_all(tgt, images), SES_REF)
    check(rep.rows, d, f"{name}: injective (rank of image = dim source)", src_dim, len(img), SES_REF)
    check(rep.rows, d, f"{name}: cokernel dim = dim N^even/(e_k)", quotient_dim, len(tgt) - len(img), SES_REF)
    return img


def check_exact_sequences(family: str, n: int, i: int, ell: int, p: int, maxdeg: int,
                          model: FiltrationModel | None = None) -> Report:
    """0 -> N_0 -z_l-> N_1 -> N_1^even/(e_k) -> 0 and 0 -> N_1 -Q_l-> N_0 -> N_0^even/(e_k) -> 0.

    Both maps are applied to explicit bases; cokernel dimensions are compared
    with e_k-quotients computed as explicit cokernels as well.  The image is
    also compared, as a subspace, with N^odd + e_k N^even.
    """
    S = split(ell, i, family, n, p)
    F = model or FiltrationModel(family, n, p, maxdeg)
    rep = Report("prop34", {"family": family, "n": n, "i": i, "ell": ell, "p": p, "max_deg": maxdeg})
    z = F.mui.module_element(S.z_index)
    zdeg = z.degree()
    e = F.mui.euler
    edeg = e.degree()
    qshift = qbar_shift(family, ell, n, p)

    def quotient_dim(pred, d):
        if d % 2:
            return 0
        whole = _rank(F.elements([b for b in F.basis(d) if pred(b)]), p)
        low = [e * x for x in F.elements([b for b in F.basis(d - edeg) if pred(b)])]
        return whole - _rank(low, p)

    def odd_plus_e_even(pred, d):
        if d % 2:
            return span_of(F.elements([b for b in F.basis(d) if pred(b)]), p)
        return span_of([e * x for x in F.elements([b for b in F.basis(d - edeg) if pred(b)])], p)

    q_series = {part: S.series(part, maxdeg, even_mod_e=True) for part in ("N0", "N1")}
    for d in range(maxdeg + 1):
        for part, pred in (("N0", S.in_N0), ("N1", S.in_N1)):
            check(rep.rows, d, f"dim {part}^even/(e_k): explicit cokernel = generator series",
                  q_series[part][d], quotient_dim(pred, d), SES_REF)
        # direct sum N_0 + N_1 = R + F_{inf,i}
        basis = F.basis(d)
        n0 = F.elements([b for b in basis if S.in_N0(b)])
        n1 = F.elements([b for b in basis if S.in_N1(b)])
        both = span_of(n0 + n1, p)
        whole = span_of(F.elements([b for b in basis if not b.in_F or b.weight >= i]), p)
        check(rep.rows, d, "N_0 ⊕ N_1 = R ⊕ F_{inf,i} (dims)", [len(whole), len(whole)],
              [_rank(n0, p) + _rank(n1, p), len(both)], SES_REF)

        img = _ses_block(rep, F, S, d, f"z_{ell}: N_0 -> N_1", S.in_N0, S.in_N1, lambda x: z * x, zdeg,
                         quotient_dim(S.in_N1, d), p)
        ref = odd_plus_e_even(S.in_N1, d)
        check(rep.rows, d, f"z_{ell}: image = N_1^odd + e_k N_1^even", True,
              len(ref) == len(img) and contains_all(img, [KoszulElement._raw(F.ctx, v) for v in ref.rows.values()]),
              SES_REF)

        img = _ses_block(rep, F, S, d, f"Q_{ell}: N_1 -> N_0", S.in_N1, S.in_N0,
                         lambda x: qbar_apply(family, ell, x), qshift, quotient_dim(S.in_N0, d), p)
        ref = odd_plus_e_even(S.in_N0, d)
        check(rep.rows, d, f"Q_{ell}: image = N_0^odd + e_k N_0^even", True,
              len(ref) == len(img) and contains_all(img, [KoszulElement._raw(F.ctx, v) for v in ref.rows.values()]),
              SES_REF)
    return rep
