"""Exact linear algebra over the prime field F_p.

Two independent back ends live here.  The production path delegates to
FLINT's ``nmod_mat`` (C implementation); :func:`rref_numpy` is a plain
Gauss-Jordan elimination on numpy integer arrays that the tests use as an
oracle for the FLINT path.  Every public function returns canonical data: a
reduced row echelon form is unique, so kernels and spans come out identical
no matter which back end, job count or cache state produced them.
"""
from __future__ import annotations

import bisect
from typing import Iterable, Sequence

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import flint

    HAVE_FLINT = True
except ImportError:  # pragma: no cover
    flint = None
    HAVE_FLINT = False


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(a, -1, p)


def primitive_root(p: int) -> int:
    """Smallest generator of the cyclic group (Z/p)^x."""
    if p == 2:
        return 1
    phi = p - 1
    factors = {q for q in range(2, phi + 1) if phi % q == 0 and is_prime(q)}
    for g in range(2, p):
        if all(pow(g, phi // q, p) != 1 for q in factors):
            return g
    raise ValueError(p)


# -- numpy reference implementation -----------------------------------------

def rref_numpy(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p by textbook Gauss-Jordan elimination."""
    m = np.array(a, dtype=np.int64) % p
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * inv_mod(int(m[r, c]), p)) % p
        col = m[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            m[hit] = (m[hit] - np.outer(col[hit], m[r])) % p
        pivots.append(c)
        r += 1
    return m[:r], pivots


def nullspace_numpy(a: np.ndarray, ncols: int, p: int) -> np.ndarray:
    """Kernel basis (as rows, in canonical RREF) via the numpy path."""
    a = np.asarray(a, dtype=np.int64).reshape(-1, ncols)
    red, pivots = rref_numpy(a, p)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for r, pc in enumerate(pivots):
            basis[k, pc] = (-red[r, f]) % p
    if len(free) == 0:
        return basis
    return rref_numpy(basis, p)[0]


# -- production path --------------------------------------------------------

def _to_flint(rows: Sequence[Sequence[int]] | np.ndarray, ncols: int, p: int):
    arr = np.asarray(rows, dtype=np.int64).reshape(-1, ncols) % p
    return flint.nmod_mat(arr.shape[0], ncols, arr.ravel().tolist(), p)


def _from_flint(mat, nrows: int | None = None) -> np.ndarray:
    m = mat.nrows() if nrows is None else nrows
    n = mat.ncols()
    flat = [int(x) for x in mat.entries()]
    return np.array(flat, dtype=np.int64).reshape(mat.nrows(), n)[:m]


def rref(rows, ncols: int, p: int) -> tuple[np.ndarray, list[int]]:
    """Canonical RREF (nonzero rows only) and pivot columns."""
    arr = np.asarray(rows, dtype=np.int64).reshape(-1, ncols)
    if arr.shape[0] == 0 or ncols == 0:
        return np.zeros((0, ncols), dtype=np.int64), []
    if not HAVE_FLINT:
        return rref_numpy(arr, p)
    red, rk = _to_flint(arr, ncols, p).rref()
    out = _from_flint(red, rk)
    pivots = [int(np.nonzero(out[r])[0][0]) for r in range(rk)]
    return out, pivots


def rank(rows, ncols: int, p: int) -> int:
    arr = np.asarray(rows, dtype=np.int64).reshape(-1, ncols)
    if arr.shape[0] == 0 or ncols == 0:
        return 0
    if not HAVE_FLINT:
        return len(rref_numpy(arr, p)[1])
    return _to_flint(arr, ncols, p).rank()


def nullspace(rows, ncols: int, p: int) -> np.ndarray:
    """Basis of {x : A x = 0} as the rows of a canonical RREF matrix."""
    arr = np.asarray(rows, dtype=np.int64).reshape(-1, ncols)
    if ncols == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if arr.shape[0] == 0:
        return np.eye(ncols, dtype=np.int64)
    if not HAVE_FLINT:
        return nullspace_numpy(arr, ncols, p)
    ker, k = _to_flint(arr, ncols, p).nullspace()
    if k == 0:
        return np.zeros((0, ncols), dtype=np.int64)
    basis = _from_flint(ker.transpose(), k)
    return rref(basis, ncols, p)[0]


def stacked_nullspace(blocks: Iterable[np.ndarray], ncols: int, p: int) -> np.ndarray:
    """Simultaneous kernel of several maps sharing one source.

    The kernel is narrowed block by block (K <- K . ker(B K)) so the working
    matrix never holds all blocks at once.
    """
    if HAVE_FLINT:
        return _stacked_nullspace_flint(blocks, ncols, p)
    basis = np.eye(ncols, dtype=np.int64)
    for block in blocks:
        block = np.asarray(block, dtype=np.int64).reshape(-1, ncols)
        if block.shape[0] == 0 or basis.shape[0] == 0:
            continue
        image = (block @ basis.T) % p          # rows x current kernel dim
        coeffs = nullspace(image, basis.shape[0], p)
        basis = (coeffs @ basis) % p
    if basis.shape[0] == 0:
        return basis
    return rref(basis, ncols, p)[0]


def _stacked_nullspace_flint(blocks, ncols: int, p: int) -> np.ndarray:
    basis = None  # flint matrix whose rows span the current kernel; None = everything
    for block in blocks:
        block = np.asarray(block, dtype=np.int64).reshape(-1, ncols)
        if block.shape[0] == 0:
            continue
        B = _to_flint(block, ncols, p)
        if basis is None:
            ker, k = B.nullspace()
            if not k:
                return np.zeros((0, ncols), dtype=np.int64)
            basis = _trim_rows(ker.transpose(), k)
            continue
        image = B * basis.transpose()
        ker, k = image.nullspace()
        if k == 0:
            return np.zeros((0, ncols), dtype=np.int64)
        basis = _trim_rows(ker.transpose(), k) * basis
    if basis is None:
        return np.eye(ncols, dtype=np.int64)
    red, rk = basis.rref()
    return _from_flint(red, rk)


def _trim_rows(mat, k: int):
    """First k rows of a flint matrix."""
    if mat.nrows() == k:
        return mat
    n = mat.ncols()
    flat = mat.entries()[: k * n]
    return flint.nmod_mat(k, n, [int(x) for x in flat], mat.modulus())


class SpanBuilder:
    """Incrementally maintained reduced echelon basis of sparse vectors.

    Vectors are dicts ``key -> coefficient``; keys must be totally ordered.
    The pivot of a vector is its largest key.  Used for the many small spans
    (closures, filtration pieces) where building dense matrices would waste
    time on mostly-zero columns.
    """

    def __init__(self, p: int):
        self.p = p
        self.rows: dict = {}   # pivot key -> normalized vector (pivot coeff 1)
        self._order: list = []

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, vec: dict) -> dict:
        p = self.p
        v = {k: c % p for k, c in vec.items() if c % p}
        # a row with pivot k only touches keys below k: one descending pass
        for piv in reversed(self._order):
            c = v.get(piv)
            if not c:
                continue
            for k, a in self.rows[piv].items():
                nv = (v.get(k, 0) - c * a) % p
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
        return v

    def add(self, vec: dict) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        piv = max(v)
        inv = inv_mod(v[piv], self.p)
        self.rows[piv] = {k: (c * inv) % self.p for k, c in v.items()}
        bisect.insort(self._order, piv)
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def copy(self) -> "SpanBuilder":
        other = SpanBuilder(self.p)
        other.rows = {k: dict(v) for k, v in self.rows.items()}
        other._order = list(self._order)
        return other
