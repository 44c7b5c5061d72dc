"""The algebra F_p[t_1..t_n] (x) Lambda(dt_1..dt_n) and its GL_n(F_p) action.

Monomials are plain tuples ``(ext, exps)``: ``ext`` is a bitmask of the
exterior generators present (bit i <-> dt_{i+1}) and ``exps`` the exponent
vector of the polynomial part.  Tuples compare lexicographically, which is
exactly the canonical monomial order (ext as bitset first, then exponents),
so ``sorted(terms)`` is the canonical serialization order everywhere.

t_i sits in degree 2 and dt_i in degree 1.  Indices are 0-based in code:
``ctx.t(0)`` is t_1.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from . import linalg
from .linalg import inv_mod, is_prime


class ContextMismatch(ValueError):
    pass


class MixedDegree(ValueError):
    pass


class SingularMatrix(ValueError):
    pass


@dataclass(frozen=True)
class FieldCtx:
    p: int

    def __post_init__(self):
        if self.p < 3 or not is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")


@dataclass(frozen=True)
class KoszulCtx:
    p: int
    n: int

    def __post_init__(self):
        FieldCtx(self.p)
        if not 1 <= self.n <= 8:
            raise ValueError(f"rank must satisfy 1 <= n <= 8, got {self.n}")

    # constructors -----------------------------------------------------
    def zero(self) -> "KoszulElement":
        return KoszulElement(self, {})

    def scalar(self, c: int) -> "KoszulElement":
        return KoszulElement(self, {(0, (0,) * self.n): c})

    def one(self) -> "KoszulElement":
        return self.scalar(1)

    def t(self, i: int, power: int = 1) -> "KoszulElement":
        exps = [0] * self.n
        exps[i] = power
        return KoszulElement(self, {(0, tuple(exps)): 1})

    def dt(self, i: int) -> "KoszulElement":
        return KoszulElement(self, {(1 << i, (0,) * self.n): 1})

    def monomial(self, exps: Sequence[int], ext: Iterable[int] = (), coeff: int = 1) -> "KoszulElement":
        """t^exps * dt_{i1} ... dt_{ir} with the dt's multiplied in the given order."""
        ext = list(ext)
        mask = 0
        for i in ext:
            if mask >> i & 1:
                return self.zero()
            mask |= 1 << i
        sign = _perm_sign(ext)
        return KoszulElement(self, {(mask, tuple(exps)): sign * coeff})


def mask_degree(mask: int) -> int:
    return mask.bit_count()


def mono_degree(mono) -> int:
    ext, exps = mono
    return 2 * sum(exps) + ext.bit_count()


def mask_indices(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _perm_sign(seq: Sequence[int]) -> int:
    inv = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return -1 if inv & 1 else 1


def _mask_sign(m1: int, m2: int) -> int:
    """Sign of sorting dt_{m1} dt_{m2} (each already increasing) into order."""
    count = 0
    m = m2
    j = 0
    while m:
        if m & 1:
            count += (m1 >> (j + 1)).bit_count()
        m >>= 1
        j += 1
    return -1 if count & 1 else 1


def sign_interleave(I: Iterable[int], J: Iterable[int]) -> int:
    """Sign of the permutation sorting (i_1..i_r, j_1..j_s) into increasing order.

    ``I`` and ``J`` are disjoint index sets; an empty side gives +1.
    """
    I = sorted(I)
    J = sorted(J)
    if set(I) & set(J):
        raise ValueError(f"index sets overlap: {I} and {J}")
    return _perm_sign(I + J)


class KoszulElement:
    """Immutable finite linear combination of Koszul monomials."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: KoszulCtx, terms: dict):
        p = ctx.p
        self.ctx = ctx
        self.terms = {k: c % p for k, c in terms.items() if c % p}

    @classmethod
    def _raw(cls, ctx: KoszulCtx, terms: dict) -> "KoszulElement":
        # caller guarantees reduced nonzero coefficients
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj.terms = terms
        return obj

    # --- basic protocol ---------------------------------------------
    def _check(self, other: "KoszulElement"):
        if not isinstance(other, KoszulElement):
            raise TypeError(type(other))
        if other.ctx != self.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")

    def __eq__(self, other):
        if isinstance(other, int):
            return self == self.ctx.scalar(other)
        if not isinstance(other, KoszulElement):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __add__(self, other):
        if isinstance(other, int):
            other = self.ctx.scalar(other)
        self._check(other)
        return KoszulElement(self.ctx, _add(self.terms, other.terms, 1, self.ctx.p))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = self.ctx.scalar(other)
        self._check(other)
        return KoszulElement(self.ctx, _add(self.terms, other.terms, -1, self.ctx.p))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return KoszulElement(self.ctx, {k: -c for k, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return KoszulElement(self.ctx, {k: c * other for k, c in self.terms.items()})
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = self.ctx.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # --- gradings ----------------------------------------------------
    def degrees(self) -> set[int]:
        return {mono_degree(m) for m in self.terms}

    def degree(self) -> int | None:
        """Common degree of all terms; None for zero; MixedDegree otherwise."""
        degs = self.degrees()
        if not degs:
            return None
        if len(degs) > 1:
            raise MixedDegree(sorted(degs))
        return degs.pop()

    def is_polynomial(self) -> bool:
        return all(ext == 0 for ext, _ in self.terms)

    def component(self, ext: int) -> dict:
        return {exps: c for (e, exps), c in self.terms.items() if e == ext}

    def frobenius(self) -> "KoszulElement":
        """x -> x^p on a purely polynomial element (additive in char p)."""
        if not self.is_polynomial():
            raise ValueError("frobenius only defined here on polynomial elements")
        p = self.ctx.p
        return KoszulElement._raw(
            self.ctx, {(0, tuple(e * p for e in exps)): c for (_, exps), c in self.terms.items()}
        )

    # --- serialization -----------------------------------------------
    def to_triples(self) -> list[tuple[list[int], int, int]]:
        return [(list(exps), ext, c) for (ext, exps), c in sorted(self.terms.items())]

    @classmethod
    def from_triples(cls, ctx: KoszulCtx, triples) -> "KoszulElement":
        return cls(ctx, {(int(ext), tuple(int(e) for e in exps)): int(c) for exps, ext, c in triples})

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (ext, exps), c in sorted(self.terms.items(), reverse=True):
            factors = []
            for i, e in enumerate(exps):
                if e == 1:
                    factors.append(f"t{i + 1}")
                elif e > 1:
                    factors.append(f"t{i + 1}^{e}")
            factors += [f"dt{i + 1}" for i in mask_indices(ext)]
            body = "*".join(factors) or "1"
            parts.append(body if c == 1 else f"{c}*{body}")
        return " + ".join(parts)


def _add(a: dict, b: dict, sign: int, p: int) -> dict:
    out = dict(a)
    for k, c in b.items():
        v = (out.get(k, 0) + sign * c) % p
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def multiply(a: KoszulElement, b: KoszulElement) -> KoszulElement:
    a._check(b)
    p = a.ctx.p
    out: dict = {}
    for (e1, x1), c1 in a.terms.items():
        for (e2, x2), c2 in b.terms.items():
            if e1 & e2:
                continue
            c = c1 * c2 * _mask_sign(e1, e2)
            key = (e1 | e2, tuple(u + v for u, v in zip(x1, x2)))
            v = (out.get(key, 0) + c) % p
            if v:
                out[key] = v
            else:
                del out[key]
    return KoszulElement._raw(a.ctx, out)


def linear_combination(ctx: KoszulCtx, pairs: Iterable[tuple[int, KoszulElement]]) -> KoszulElement:
    out: dict = {}
    p = ctx.p
    for c, x in pairs:
        for k, a in x.terms.items():
            v = (out.get(k, 0) + c * a) % p
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return KoszulElement._raw(ctx, out)


# -- matrices ---------------------------------------------------------------

class MatrixGL:
    """Invertible n x n matrix over F_p.

    Acts on the algebra by substitution t_i -> sum_j g[i][j] t_j (and the same
    on dt_i), i.e. row i of ``g`` is the image of t_{i+1}.  With this row
    convention ``apply_matrix(g @ h, x) == apply_matrix(h, apply_matrix(g, x))``.
    """

    __slots__ = ("p", "n", "rows")

    def __init__(self, rows: Sequence[Sequence[int]], p: int, check: bool = True):
        self.p = p
        self.rows = tuple(tuple(int(v) % p for v in r) for r in rows)
        self.n = len(self.rows)
        if any(len(r) != self.n for r in self.rows):
            raise ValueError("matrix must be square")
        if check and self.det() == 0:
            raise SingularMatrix(self.rows)

    @classmethod
    def identity(cls, n: int, p: int) -> "MatrixGL":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], p, check=False)

    @classmethod
    def elementary(cls, n: int, p: int, i: int, j: int, c: int = 1) -> "MatrixGL":
        """Transvection I + c e_ij (t_i -> t_i + c t_j)."""
        rows = [[int(a == b) for b in range(n)] for a in range(n)]
        rows[i][j] = c
        return cls(rows, p, check=False)

    @classmethod
    def diagonal(cls, diag: Sequence[int], p: int) -> "MatrixGL":
        n = len(diag)
        return cls([[diag[a] if a == b else 0 for b in range(n)] for a in range(n)], p)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, MatrixGL) and self.p == other.p and self.rows == other.rows

    def __hash__(self):
        return hash((self.p, self.rows))

    def __repr__(self):
        return f"MatrixGL({[list(r) for r in self.rows]}, p={self.p})"

    def __matmul__(self, other: "MatrixGL") -> "MatrixGL":
        n, p = self.n, self.p
        cols = list(zip(*other.rows))
        return MatrixGL([[sum(a * b for a, b in zip(r, c)) % p for c in cols] for r in self.rows], p, check=False)

    def det(self) -> int:
        p = self.p
        m = [list(r) for r in self.rows]
        n = self.n
        d = 1
        for c in range(n):
            piv = next((r for r in range(c, n) if m[r][c] % p), None)
            if piv is None:
                return 0
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                d = -d
            d = d * m[c][c] % p
            inv = inv_mod(m[c][c], p)
            for r in range(c + 1, n):
                f = m[r][c] * inv % p
                if f:
                    m[r] = [(a - f * b) % p for a, b in zip(m[r], m[c])]
        return d % p

    def monomial_data(self):
        """(perm, scalars) if exactly one nonzero per row, else None."""
        perm, scal = [], []
        for r in self.rows:
            nz = [j for j, v in enumerate(r) if v]
            if len(nz) != 1:
                return None
            perm.append(nz[0])
            scal.append(r[nz[0]])
        return perm, scal

    def elementary_factors(self) -> list[tuple]:
        """Factor g = E_1 E_2 ... E_k into elementary matrices.

        Returned in that order; items are ('add', i, j, c), ('scale', i, s)
        or ('swap', i, j).  Substitution by g is substitution by E_1 first.
        """
        p, n = self.p, self.n
        m = [list(r) for r in self.rows]
        ops = []   # row operations A_1, A_2, ... with A_r ... A_1 g = I
        for c in range(n):
            piv = next((r for r in range(c, n) if m[r][c]), None)
            if piv is None:
                raise SingularMatrix(self.rows)
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                ops.append(("swap", c, piv))
            if m[c][c] != 1:
                inv = inv_mod(m[c][c], p)
                m[c] = [v * inv % p for v in m[c]]
                ops.append(("scale", c, inv))
            for r in range(n):
                if r != c and m[r][c]:
                    f = m[r][c]
                    m[r] = [(a - f * b) % p for a, b in zip(m[r], m[c])]
                    ops.append(("add", r, c, -f % p))
        factors = []
        for op in ops:
            if op[0] == "swap":
                factors.append(op)
            elif op[0] == "scale":
                factors.append(("scale", op[1], inv_mod(op[2], p)))
            else:
                factors.append(("add", op[1], op[2], (-op[3]) % p))
        return factors


@lru_cache(maxsize=None)
def _binom_row(a: int, p: int) -> tuple[int, ...]:
    return tuple(comb(a, k) % p for k in range(a + 1))


def _apply_add(x: KoszulElement, i: int, j: int, c: int) -> KoszulElement:
    """Substitute t_i -> t_i + c t_j, dt_i -> dt_i + c dt_j."""
    p = x.ctx.p
    out: dict = {}
    bi, bj = 1 << i, 1 << j
    lo, hi = (i, j) if i < j else (j, i)
    between = ((1 << hi) - 1) & ~((1 << (lo + 1)) - 1)
    cpow = [pow(c, k, p) for k in range(max((e[i] for _, e in x.terms), default=0) + 2)]
    for (ext, exps), coef in x.terms.items():
        ext_terms = [(ext, coef)]
        if ext & bi and not ext & bj:
            s = -1 if (ext & between).bit_count() & 1 else 1
            ext_terms.append(((ext & ~bi) | bj, coef * c * s))
        a = exps[i]
        row = _binom_row(a, p)
        base = list(exps)
        for k in range(a + 1):
            bc = row[k]
            if not bc:
                continue
            base[i] = a - k
            base[j] = exps[j] + k
            key_exps = tuple(base)
            w = bc * cpow[k]
            for e2, c2 in ext_terms:
                key = (e2, key_exps)
                v = (out.get(key, 0) + w * c2) % p
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
    return KoszulElement._raw(x.ctx, out)


def _apply_monomial(x: KoszulElement, perm: Sequence[int], scal: Sequence[int]) -> KoszulElement:
    """Substitute t_i -> scal[i] * t_{perm[i]} (and likewise dt_i)."""
    p = x.ctx.p
    n = x.ctx.n
    out: dict = {}
    for (ext, exps), coef in x.terms.items():
        new = [0] * n
        c = coef
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
        c = c * _perm_sign(img) % p
        if c:
            key = (mask, tuple(new))
            v = (out.get(key, 0) + c) % p
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return KoszulElement._raw(x.ctx, out)


def apply_matrix(g: MatrixGL, x: KoszulElement) -> KoszulElement:
    """Image of x under the algebra automorphism induced by g (row convention)."""
    if g.n != x.ctx.n or g.p != x.ctx.p:
        raise ContextMismatch(f"matrix {g.n}x{g.n} mod {g.p} vs {x.ctx}")
    mono = g.monomial_data()
    if mono is not None:
        return _apply_monomial(x, *mono)
    n = g.n
    for op in g.elementary_factors():
        if op[0] == "add":
            x = _apply_add(x, op[1], op[2], op[3])
        elif op[0] == "scale":
            scal = [1] * n
            scal[op[1]] = op[2]
            x = _apply_monomial(x, list(range(n)), scal)
        else:
            perm = list(range(n))
            perm[op[1]], perm[op[2]] = op[2], op[1]
            x = _apply_monomial(x, perm, [1] * n)
    return x


def apply_matrix_naive(g: MatrixGL, x: KoszulElement) -> KoszulElement:
    """Reference substitution: expand every monomial through the linear forms."""
    ctx = x.ctx
    forms = [linear_combination(ctx, [(g[i, j], ctx.t(j)) for j in range(ctx.n)]) for i in range(ctx.n)]
    dforms = [linear_combination(ctx, [(g[i, j], ctx.dt(j)) for j in range(ctx.n)]) for i in range(ctx.n)]
    total = ctx.zero()
    for (ext, exps), c in x.terms.items():
        term = ctx.scalar(c)
        for i, e in enumerate(exps):
            term = term * forms[i] ** e
        for i in mask_indices(ext):
            term = term * dforms[i]
        total = total + term
    return total


# -- degree slices ------------------------------------------------------------

def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All exponent vectors of length ``parts`` summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class DegreeSlice:
    degree: int
    basis: tuple
    index: dict = field(compare=False, repr=False)

    def __len__(self):
        return len(self.basis)

    def vector(self, x: KoszulElement) -> np.ndarray:
        v = np.zeros(len(self.basis), dtype=np.int64)
        for k, c in x.terms.items():
            v[self.index[k]] = c
        return v

    def element(self, ctx: KoszulCtx, vec) -> KoszulElement:
        return KoszulElement(ctx, {self.basis[i]: int(c) for i, c in enumerate(vec) if c})


@lru_cache(maxsize=256)
def _slice(n: int, d: int, exterior: bool) -> DegreeSlice:
    monos = []
    masks = range(1 << n) if exterior else [0]
    for mask in masks:
        r = mask.bit_count()
        if r > d or (d - r) % 2:
            continue
        for exps in compositions((d - r) // 2, n):
            monos.append((mask, exps))
    monos.sort()
    return DegreeSlice(d, tuple(monos), {m: i for i, m in enumerate(monos)})


def slice_basis(ctx: KoszulCtx, d: int, exterior: bool = True) -> DegreeSlice:
    if d < 0:
        raise ValueError("degree must be non-negative")
    return _slice(ctx.n, d, exterior)


def slice_dimension(n: int, d: int, exterior: bool = True) -> int:
    total = 0
    for r in range(0, min(n, d) + 1 if exterior else 1):
        if (d - r) % 2:
            continue
        k = (d - r) // 2
        total += comb(n, r) * comb(k + n - 1, n - 1)
    return total


def map_blocks(sl: DegreeSlice, maps: Sequence[Callable[[KoszulElement], KoszulElement]], ctx: KoszulCtx):
    """Dense matrices (rows = target monomials that occur) of linear maps on a slice."""
    blocks = []
    for f in maps:
        images = [f(KoszulElement._raw(ctx, {m: 1})) for m in sl.basis]
        rows: dict = {}
        for col, img in enumerate(images):
            for k, c in img.terms.items():
                rows.setdefault(k, {})[col] = c
        block = np.zeros((len(rows), len(sl.basis)), dtype=np.int64)
        for r, key in enumerate(sorted(rows)):
            for col, c in rows[key].items():
                block[r, col] = c
        blocks.append(block)
    return blocks


def kernel_stacked(ctx: KoszulCtx, maps: Sequence[Callable[[KoszulElement], KoszulElement]],
                   d: int, exterior: bool = True) -> list[KoszulElement]:
    """Canonical (RREF) basis of the common kernel of linear maps on the degree-d slice."""
    sl = slice_basis(ctx, d, exterior)
    basis = linalg.stacked_nullspace(map_blocks(sl, maps, ctx), len(sl), ctx.p)
    return [sl.element(ctx, row) for row in basis]
