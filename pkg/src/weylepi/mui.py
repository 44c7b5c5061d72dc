"""Dickson and Mui invariants of SL_n(F_p), G_n and G_n' on H*(BA_n).

G_n is the group of matrices with first column (1,0,...,0)^T and lower-right
block in SL_{n-1}; G_n' allows any unit in the corner.  Under the row
convention of :class:`~weylepi.koszul.MatrixGL` these stabilise the span of
t_2..t_n, so the Dickson classes of that span are G_n-invariant.
"""
from __future__ import annotations

import heapq
import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .koszul import (
    KoszulCtx,
    KoszulElement,
    MatrixGL,
    apply_matrix,
    kernel_stacked,
    linear_combination,
    mask_indices,
    slice_basis,
    _perm_sign,
)
from .linalg import inv_mod, primitive_root
from .steenrod import milnor_q, q_composite

log = logging.getLogger(__name__)

FAMILIES = ("sl", "gn", "gnp")
WARN_SLICE = 20_000


class NotDivisible(ArithmeticError):
    def __init__(self, witness, remainder_terms: int = 0):
        super().__init__(f"not divisible; irreducible remainder term {witness}")
        self.witness = witness
        self.remainder_terms = remainder_terms


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SubspaceSpec:
    """A coordinate span: indices of the t-variables spanning it."""
    indices: tuple[int, ...]

    @classmethod
    def full(cls, n: int) -> "SubspaceSpec":
        return cls(tuple(range(n)))

    @classmethod
    def sub(cls, n: int) -> "SubspaceSpec":
        """span(t_2, ..., t_n): drops t_1."""
        return cls(tuple(range(1, n)))

    @property
    def dim(self) -> int:
        return len(self.indices)


# -- Dickson invariants -------------------------------------------------------

@lru_cache(maxsize=64)
def dickson_coefficients(ctx: KoszulCtx, V: SubspaceSpec) -> tuple[KoszulElement, ...]:
    """Coefficients a_0..a_dim of prod_{x in V}(X - x) = sum_i a_i X^{p^i}.

    The product over V + <t> is grouped by cosets of V:
    prod_a P_V(X - a t) = P_V(X)^p - P_V(t)^{p-1} P_V(X), using that P_V is
    additive.  :func:`dickson_product` expands the same product factor by
    factor and serves as the test oracle.
    """
    p = ctx.p
    coeffs = [ctx.one()]
    for j in V.indices:
        t = ctx.t(j)
        value = _eval_additive(coeffs, t)
        w = value ** (p - 1)
        new = [-(w * coeffs[0])]
        for i in range(1, len(coeffs)):
            new.append(coeffs[i - 1].frobenius() - w * coeffs[i])
        new.append(coeffs[-1].frobenius())
        coeffs = new
    return tuple(coeffs)


def _eval_additive(coeffs: Sequence[KoszulElement], t: KoszulElement) -> KoszulElement:
    total = t.ctx.zero()
    power = t
    for a in coeffs:
        total = total + a * power
        power = power.frobenius()
    return total


def dickson(ctx: KoszulCtx, V: SubspaceSpec, i: int) -> KoszulElement:
    """c_{dim V, i}: prod_{x in V}(X - x) = sum_j (-1)^j c_{d, d-j} X^{p^{d-j}}."""
    d = V.dim
    if not 0 <= i <= d:
        raise ValueError(f"Dickson index {i} outside 0..{d}")
    a = dickson_coefficients(ctx, V)[i]
    return a if (d - i) % 2 == 0 else -a


def dickson_product(ctx: KoszulCtx, V: SubspaceSpec) -> list[KoszulElement]:
    """Literal expansion of prod_{x in V}(X - x) in one extra variable X.

    Returns the coefficients of X^{p^i} (as elements of ``ctx``) for
    i = 0..dim V.  Exponential in dim V; small cases only.
    """
    p, n = ctx.p, ctx.n
    big = KoszulCtx(p, n + 1)
    X = big.t(n)
    prod = big.one()
    for coeffs in itertools.product(range(p), repeat=V.dim):
        x = linear_combination(big, [(c, big.t(j)) for c, j in zip(coeffs, V.indices)])
        prod = prod * (X - x)
    out = []
    for i in range(V.dim + 1):
        q = p**i
        out.append(KoszulElement(ctx, {(ext, exps[:n]): c for (ext, exps), c in prod.terms.items() if exps[n] == q}))
    stray = [exps[n] for (_, exps) in prod.terms if exps[n] not in {p**i for i in range(V.dim + 1)}]
    if stray:
        raise AssertionError(f"product has non-additive X powers {sorted(set(stray))}")
    return out


# -- Mui classes --------------------------------------------------------------

def top_form(ctx: KoszulCtx, V: SubspaceSpec) -> KoszulElement:
    """u_V = product of dt_i over the span, in increasing order."""
    return ctx.monomial((0,) * ctx.n, V.indices)


def euler_class(ctx: KoszulCtx, V: SubspaceSpec) -> KoszulElement:
    """Q_0 ... Q_{d-1} u_V with d = dim V."""
    return q_composite(range(V.dim), top_form(ctx, V))


def omega_apply(x: KoszulElement) -> KoszulElement:
    """Q_{n-1} - c_{n-1,n-2} Q_{n-2} + ... + (-1)^{n-1} c_{n-1,0} Q_0 applied to x.

    The Dickson classes are those of span(t_2..t_n).
    """
    ctx = x.ctx
    n = ctx.n
    if n < 2:
        raise ValueError("needs rank at least 2")
    V = SubspaceSpec.sub(n)
    total = milnor_q(n - 1, x)
    for j in range(n - 1):
        sign = -1 if (n - 1 - j) % 2 else 1
        total = total + sign * (dickson(ctx, V, j) * milnor_q(j, x))
    return total


@lru_cache(maxsize=32)
def f_class(ctx: KoszulCtx) -> KoszulElement:
    return omega_apply(ctx.dt(0))


def _rev(exps):
    return tuple(-e for e in exps)


def exact_divide(x: KoszulElement, d: KoszulElement) -> KoszulElement:
    """q with q * d == x, for d a nonzero polynomial.

    Each exterior component is divided separately by leading-term
    elimination in lex order; a leading term not divisible by lt(d) proves
    non-divisibility and is reported as the witness.
    """
    if d.is_zero() or not d.is_polynomial():
        raise ValueError("divisor must be a nonzero polynomial")
    ctx = x.ctx
    p = ctx.p
    dterms = {exps: c for (_, exps), c in d.terms.items()}
    lt = max(dterms)
    lc_inv = inv_mod(dterms[lt], p)
    quotient: dict = {}
    for ext in sorted({e for e, _ in x.terms}):
        rem = x.component(ext)
        heap = [_rev(k) for k in rem]
        heapq.heapify(heap)
        while rem:
            top = _rev(heapq.heappop(heap))
            c = rem.get(top)
            if not c:
                continue
            if any(a < b for a, b in zip(top, lt)):
                raise NotDivisible((ext, top), len(rem))
            shift = tuple(a - b for a, b in zip(top, lt))
            q = c * lc_inv % p
            quotient[(ext, shift)] = q
            for exps, a in dterms.items():
                key = tuple(u + v for u, v in zip(exps, shift))
                old = rem.get(key, 0)
                v = (old - q * a) % p
                if v:
                    if not old:
                        heapq.heappush(heap, _rev(key))
                    rem[key] = v
                else:
                    rem.pop(key, None)
    return KoszulElement(ctx, quotient)


# -- families and barred operations -----------------------------------------

def _check_family(family: str):
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def ubar(family: str, ctx: KoszulCtx) -> KoszulElement:
    _check_family(family)
    u = top_form(ctx, SubspaceSpec.full(ctx.n))
    if family == "gnp":
        return f_class(ctx) ** (ctx.p - 2) * u
    return u


def _f_power(family: str, ctx: KoszulCtx) -> KoszulElement:
    return f_class(ctx) if family == "gn" else f_class(ctx) ** (ctx.p - 1)


def qbar_apply(family: str, i: int, x: KoszulElement) -> KoszulElement:
    """Barred Milnor operation: Q_i for i <= n-2; the top one depends on the family."""
    _check_family(family)
    n = x.ctx.n
    if i < n - 1 or family == "sl":
        return milnor_q(i, x)
    if i != n - 1:
        raise ValueError(f"barred index {i} out of range for n={n}")
    return exact_divide(omega_apply(x), _f_power(family, x.ctx))


def qbar_composite(family: str, I: Iterable[int], x: KoszulElement) -> KoszulElement:
    I = list(I)
    if len(set(I)) != len(I):
        raise ValueError(f"repeated index in {I}")
    for i in reversed(I):
        x = qbar_apply(family, i, x)
    return x


# -- groups -------------------------------------------------------------------

@dataclass(frozen=True)
class GroupSpec:
    family: str
    n: int
    p: int
    generators: tuple[MatrixGL, ...]
    # fast route: monomial matrices handled by orbit sums, plus a few others
    monomial_generators: tuple[MatrixGL, ...] = field(default=(), repr=False)
    extra_generators: tuple[MatrixGL, ...] = field(default=(), repr=False)

    @property
    def ctx(self) -> KoszulCtx:
        return KoszulCtx(self.p, self.n)

    def key(self) -> str:
        return f"{self.family}-n{self.n}-p{self.p}"


def _signed_swaps(n: int, p: int, start: int) -> list[MatrixGL]:
    out = []
    for i in range(start, n - 1):
        rows = [[int(a == b) for b in range(n)] for a in range(n)]
        rows[i][i] = rows[i + 1][i + 1] = 0
        rows[i][i + 1] = 1
        rows[i + 1][i] = -1
        out.append(MatrixGL(rows, p))
    return out


def _torus_generator(n: int, p: int, start: int) -> list[MatrixGL]:
    if n - start < 2:
        return []
    alpha = primitive_root(p)
    diag = [1] * n
    diag[start] = alpha
    diag[start + 1] = inv_mod(alpha, p)
    return [MatrixGL.diagonal(diag, p)]


def group_generators(family: str, n: int, p: int) -> GroupSpec:
    """Transvection generating sets for SL_n, G_n, G_n' (0-based indices)."""
    _check_family(family)
    E = lambda i, j: MatrixGL.elementary(n, p, i, j, 1)
    if family == "sl":
        gens = [E(i, j) for i in range(n) for j in range(n) if i != j]
        mono = _signed_swaps(n, p, 0) + _torus_generator(n, p, 0)
        extra = [E(0, 1)]
    else:
        gens = [E(i, j) for i in range(1, n) for j in range(1, n) if i != j]
        gens += [E(0, j) for j in range(1, n)]
        mono = _signed_swaps(n, p, 1) + _torus_generator(n, p, 1)
        extra = [E(0, 1)] + ([E(1, 2)] if n >= 3 else [])
        if family == "gnp":
            diag = [primitive_root(p)] + [1] * (n - 1)
            corner = MatrixGL.diagonal(diag, p)
            gens.append(corner)
            mono.append(corner)
    return GroupSpec(family, n, p, tuple(gens), tuple(mono), tuple(extra))


def family_order(family: str, n: int, p: int) -> int:
    def sl(m):
        order = p ** (m * (m - 1) // 2)
        for k in range(2, m + 1):
            order *= p**k - 1
        return order
    if family == "sl":
        return sl(n)
    base = p ** (n - 1) * sl(n - 1)
    return base * (p - 1) if family == "gnp" else base


def enumerate_group(gens: Sequence[MatrixGL], limit: int = 2_000_000) -> int:
    """Order of the matrix group generated by ``gens`` (breadth-first closure)."""
    if not gens:
        return 1
    n, p = gens[0].n, gens[0].p
    weights = (p ** np.arange(n * n, dtype=np.int64)).reshape(n, n)
    G = np.array([g.rows for g in gens], dtype=np.int64)
    ident = np.eye(n, dtype=np.int64)[None]
    code = lambda arr: (arr * weights).sum(axis=(1, 2))
    seen = np.unique(code(ident))
    frontier = ident
    while frontier.shape[0]:
        prods = np.einsum("kij,gjl->gkil", frontier, G).reshape(-1, n, n) % p
        codes, idx = np.unique(code(prods), return_index=True)
        fresh = ~np.isin(codes, seen)
        frontier = prods[idx[fresh]]
        seen = np.union1d(seen, codes[fresh])
        if seen.size > limit:
            raise BudgetExceeded(f"group larger than {limit}")
    return int(seen.size)


# -- brute-force invariants ---------------------------------------------------

def _orbit_vectors(sl, mono_gens: Sequence[MatrixGL], p: int) -> list[dict]:
    """Invariant vectors of the monomial subgroup, one per orbit that carries one."""
    data = [g.monomial_data() for g in mono_gens]
    if any(d is None for d in data):
        raise ValueError("monomial_generators must be monomial matrices")
    n = len(sl.basis[0][1]) if sl.basis else 0

    def image(mono, perm, scal):
        ext, exps = mono
        new = [0] * n
        c = 1
        for i, e in enumerate(exps):
            if e:
                new[perm[i]] = e
                c = c * pow(scal[i], e, p)
        idx = mask_indices(ext)
        img = [perm[i] for i in idx]
        mask = 0
        for i in idx:
            c = c * scal[i]
        for k in img:
            mask |= 1 << k
        return (mask, tuple(new)), c * _perm_sign(img) % p

    visited = set()
    vectors = []
    for start in sl.basis:
        if start in visited:
            continue
        coef = {start: 1}
        queue = [start]
        ok = True
        visited.add(start)
        while queue:
            m = queue.pop()
            for perm, scal in data:
                m2, s = image(m, perm, scal)
                want = coef[m] * s % p
                if m2 in coef:
                    if coef[m2] != want:
                        ok = False
                else:
                    coef[m2] = want
                    visited.add(m2)
                    queue.append(m2)
        if ok:
            vectors.append(coef)
    return vectors


def invariant_basis(H: GroupSpec, d: int, budget: int = 200_000, cache=None) -> list[KoszulElement]:
    """Canonical basis of the degree-d H-invariants of H*(BA_n).

    Orbit sums give the invariants of the monomial subgroup; the remaining
    generators are imposed as a stacked kernel on that subspace.  Invariance
    under a generating set is invariance under the group.
    """
    ctx = H.ctx
    sl = slice_basis(ctx, d)
    if len(sl) > budget:
        raise BudgetExceeded(f"slice of degree {d} has {len(sl)} monomials (budget {budget})")
    if len(sl) > WARN_SLICE:
        log.warning("large slice: degree %d has %d monomials", d, len(sl))
    key = None
    if cache is not None:
        key = cache.key("invariant_basis", H.key(), d)
        hit = cache.get(key)
        if hit is not None:
            return [KoszulElement.from_triples(ctx, t) for t in hit]
    basis = _invariant_basis_fast(H, d) if H.monomial_generators else invariant_basis_bruteforce(H, d)
    if cache is not None:
        cache.put(key, [b.to_triples() for b in basis])
    return basis


def _invariant_basis_fast(H: GroupSpec, d: int) -> list[KoszulElement]:
    ctx = H.ctx
    p = ctx.p
    sl = slice_basis(ctx, d)
    if not len(sl):
        return []
    vectors = _orbit_vectors(sl, H.monomial_generators, p)
    if not vectors:
        return []
    elems = [KoszulElement._raw(ctx, v) for v in vectors]
    blocks = []
    for g in H.extra_generators:
        rows: dict = {}
        for col, v in enumerate(elems):
            diff = apply_matrix(g, v) - v
            for k, c in diff.terms.items():
                rows.setdefault(k, {})[col] = c
        block = np.zeros((len(rows), len(elems)), dtype=np.int64)
        for r, k in enumerate(sorted(rows)):
            for col, c in rows[k].items():
                block[r, col] = c
        blocks.append(block)
    coeffs = linalg.stacked_nullspace(blocks, len(elems), p)
    if coeffs.shape[0] == 0:
        return []
    dense = np.zeros((coeffs.shape[0], len(sl)), dtype=np.int64)
    for col, v in enumerate(vectors):
        idx = [sl.index[m] for m in v]
        vals = np.array([v[m] for m in v], dtype=np.int64)
        dense[:, idx] = (dense[:, idx] + np.outer(coeffs[:, col], vals)) % p
    red = linalg.rref(dense, len(sl), p)[0]
    return [sl.element(ctx, row) for row in red]


def invariant_basis_bruteforce(H: GroupSpec, d: int) -> list[KoszulElement]:
    """Common kernel of (g - 1) over all listed generators on the full slice."""
    maps = [lambda x, g=g: apply_matrix(g, x) - x for g in H.generators]
    return kernel_stacked(H.ctx, maps, d)


# -- predicted structure --------------------------------------------------------

def proper_subsets(n: int) -> list[tuple[int, ...]]:
    out = []
    for r in range(n):
        out += list(itertools.combinations(range(n), r))
    return out


@dataclass(frozen=True)
class RingGenerator:
    label: str
    degree: int
    weight: int


@dataclass(frozen=True)
class ModuleGenerator:
    index_set: tuple[int, ...]
    degree: int

    @property
    def weight(self) -> int:
        return len(self.index_set)

    @property
    def label(self) -> str:
        return "Qbar_{%s} ubar" % ",".join(map(str, self.index_set))


@dataclass(frozen=True)
class MuiBasisDescription:
    family: str
    n: int
    p: int
    ring: tuple[RingGenerator, ...]
    modules: tuple[ModuleGenerator, ...]

    @property
    def euler_label(self) -> str:
        return "e_n" if self.family == "sl" else "e_{n-1}"

    def euler_degree(self) -> int:
        return next(r.degree for r in self.ring if r.label == self.euler_label)

    def series(self, D: int) -> list[int]:
        from .series import free_module_series
        return free_module_series([0] + [m.degree for m in self.modules], [r.degree for r in self.ring], D)


def qbar_shift(family: str, i: int, n: int, p: int) -> int:
    if i < n - 1 or family == "sl":
        return 2 * p**i - 1
    if family == "gn":
        return -1
    return 2 * p ** (n - 1) - 1 - 2 * (p - 1) * p ** (n - 1)


def mui_description(family: str, n: int, p: int) -> MuiBasisDescription:
    _check_family(family)
    if family == "sl":
        ring = [RingGenerator(f"c_{{{n},{i}}}", 2 * (p**n - p**i), 0) for i in range(1, n)]
        ring.append(RingGenerator("e_n", 2 * sum(p**i for i in range(n)), n))
        base = n
    else:
        ring = [RingGenerator(f"c_{{{n - 1},{i}}}", 2 * (p ** (n - 1) - p**i), 0) for i in range(1, n - 1)]
        ring.append(RingGenerator("e_{n-1}", 2 * sum(p**i for i in range(n - 1)), n))
        if family == "gn":
            ring.append(RingGenerator("f_n", 2 * p ** (n - 1), 0))
            base = n
        else:
            ring.append(RingGenerator("f_n^{p-1}", 2 * (p - 1) * p ** (n - 1), 0))
            base = n + 2 * (p - 2) * p ** (n - 1)
    mods = [ModuleGenerator(I, base + sum(qbar_shift(family, i, n, p) for i in I)) for I in proper_subsets(n)]
    return MuiBasisDescription(family, n, p, tuple(ring), tuple(mods))


def predicted_series(H: GroupSpec, D: int) -> list[int]:
    return mui_description(H.family, H.n, H.p).series(D)


def predicted_dimension(H: GroupSpec, d: int) -> int:
    return predicted_series(H, d)[d]


# -- concrete elements of the invariant ring ---------------------------------

class MuiModel:
    """Ring and module generators of an invariant ring as actual elements."""

    def __init__(self, family: str, n: int, p: int):
        _check_family(family)
        self.family, self.n, self.p = family, n, p
        self.ctx = KoszulCtx(p, n)
        self.description = mui_description(family, n, p)
        self._rmono: dict = {}

    @cached_property
    def ring_elements(self) -> tuple[KoszulElement, ...]:
        ctx, n, p = self.ctx, self.n, self.p
        if self.family == "sl":
            V = SubspaceSpec.full(n)
            gens = [dickson(ctx, V, i) for i in range(1, n)] + [euler_class(ctx, V)]
        else:
            V = SubspaceSpec.sub(n)
            gens = [dickson(ctx, V, i) for i in range(1, n - 1)] + [euler_class(ctx, V)]
            gens.append(_f_power(self.family, ctx))
        return tuple(gens)

    @property
    def euler_index(self) -> int:
        return self.n - 1 if self.family == "sl" else self.n - 2

    @property
    def euler(self) -> KoszulElement:
        return self.ring_elements[self.euler_index]

    @cached_property
    def ubar(self) -> KoszulElement:
        return ubar(self.family, self.ctx)

    @lru_cache(maxsize=None)
    def module_element(self, I: tuple[int, ...]) -> KoszulElement:
        return qbar_composite(self.family, I, self.ubar)

    def ring_monomial(self, exps: tuple[int, ...]) -> KoszulElement:
        if exps not in self._rmono:
            if not any(exps):
                val = self.ctx.one()
            else:
                j = max(i for i, e in enumerate(exps) if e)
                lower = list(exps)
                lower[j] -= 1
                val = self.ring_monomial(tuple(lower)) * self.ring_elements[j]
            self._rmono[exps] = val
        return self._rmono[exps]

    def ring_monomials(self, maxdeg: int) -> list[tuple[tuple[int, ...], int, int]]:
        """(exponents, degree, weight) of R-monomials up to ``maxdeg``."""
        ring = self.description.ring
        out = []

        def rec(j, acc, deg):
            if j == len(ring):
                out.append((tuple(acc), deg, sum(a * r.weight for a, r in zip(acc, ring))))
                return
            k = 0
            while deg + k * ring[j].degree <= maxdeg:
                rec(j + 1, acc + [k], deg + k * ring[j].degree)
                k += 1

        rec(0, [], 0)
        out.sort(key=lambda t: (t[1], t[0]))
        return out
