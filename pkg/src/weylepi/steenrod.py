"""Bockstein, reduced powers and Milnor primitives on H*(BA_n; F_p)."""
from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Iterable

from .koszul import KoszulElement, mask_indices


def milnor_degree(i: int, p: int) -> int:
    """Q_i raises degree by 2p^i - 1."""
    return 2 * p**i - 1


def milnor_q(i: int, x: KoszulElement) -> KoszulElement:
    """Q_i as the odd derivation dt_j -> t_j^{p^i}, t_j -> 0."""
    if i < 0:
        raise ValueError("Milnor index must be non-negative")
    p = x.ctx.p
    q = p**i
    out: dict = {}
    for (ext, exps), c in x.terms.items():
        if not ext:
            continue
        for pos, j in enumerate(mask_indices(ext)):
            new = list(exps)
            new[j] += q
            key = (ext & ~(1 << j), tuple(new))
            v = (out.get(key, 0) + (-c if pos & 1 else c)) % p
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return KoszulElement._raw(x.ctx, out)


def bockstein(x: KoszulElement) -> KoszulElement:
    return milnor_q(0, x)


@lru_cache(maxsize=4096)
def _power_factors(a: int, k: int, p: int) -> tuple:
    """Nonzero (c, binom(a, c) mod p) for 0 <= c <= min(a, k)."""
    return tuple((c, comb(a, c) % p) for c in range(min(a, k) + 1) if comb(a, c) % p)


@lru_cache(maxsize=500_000)
def _power_terms(k: int, p: int, exps: tuple) -> tuple[tuple[tuple, int], ...]:
    """Terms of P^k(t^exps): choose c_j with sum k from (t_j + t_j^p)^{a_j}."""
    facs = [_power_factors(a, k, p) for a in exps]
    caps = [f[-1][0] for f in facs]
    suffix = [0] * (len(facs) + 1)
    for j in range(len(facs) - 1, -1, -1):
        suffix[j] = suffix[j + 1] + caps[j]
    out = []
    n = len(exps)

    def rec(j, left, coef, acc):
        if j == n:
            if left == 0:
                out.append((tuple(acc), coef))
            return
        for c, b in facs[j]:
            if c > left:
                break
            if left - c > suffix[j + 1]:
                continue
            acc.append(exps[j] + c * (p - 1))
            rec(j + 1, left - c, coef * b % p, acc)
            acc.pop()

    rec(0, k, 1, [])
    return tuple(out)


def reduced_power(k: int, x: KoszulElement) -> KoszulElement:
    """The reduced power P^k, read off the multiplicative total power
    t_j -> t_j + t_j^p, dt_j -> dt_j."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return x
    p = x.ctx.p
    out: dict = {}
    get = out.get
    for (ext, exps), c in x.terms.items():
        for new, coef in _power_terms(k, p, exps):
            key = (ext, new)
            out[key] = get(key, 0) + c * coef
    return KoszulElement._raw(x.ctx, {key: v % p for key, v in out.items() if v % p})


def _linear_extend(x: KoszulElement, mono_fn, *args) -> KoszulElement:
    p = x.ctx.p
    out: dict = {}
    get = out.get
    for mono, c in x.terms.items():
        for k, a in mono_fn(*args, mono).items():
            out[k] = get(k, 0) + c * a
    return KoszulElement._raw(x.ctx, {k: v % p for k, v in out.items() if v % p})


@lru_cache(maxsize=200_000)
def _power_mono(k: int, p: int, mono) -> dict:
    from .koszul import KoszulCtx
    ctx = KoszulCtx(p, len(mono[1]))
    return reduced_power(k, KoszulElement._raw(ctx, {mono: 1})).terms


@lru_cache(maxsize=200_000)
def _qrec_mono(i: int, p: int, mono) -> dict:
    from .koszul import KoszulCtx
    ctx = KoszulCtx(p, len(mono[1]))
    x = KoszulElement._raw(ctx, {mono: 1})
    if i == 0:
        return bockstein(x).terms
    k = p ** (i - 1)
    lower = _linear_extend(x, _qrec_mono, i - 1, p)
    first = _linear_extend(lower, _power_mono, k, p)
    second = _linear_extend(_linear_extend(x, _power_mono, k, p), _qrec_mono, i - 1, p)
    return (first - second).terms


def milnor_q_recursive(i: int, x: KoszulElement) -> KoszulElement:
    """Q_0 = beta, Q_{i+1} = P^{p^i} Q_i - Q_i P^{p^i}, evaluated literally.

    Only the evaluation is memoized per monomial; no closed form is used.
    """
    if i < 0:
        raise ValueError("Milnor index must be non-negative")
    return _linear_extend(x, _qrec_mono, i, x.ctx.p)


def q_composite(indices: Iterable[int], x: KoszulElement) -> KoszulElement:
    """Q_{i_1} ... Q_{i_r} x, innermost (rightmost) operator applied first."""
    indices = list(indices)
    if len(set(indices)) != len(indices):
        raise ValueError(f"repeated Milnor index in {indices}")
    for i in reversed(indices):
        x = milnor_q(i, x)
    return x
