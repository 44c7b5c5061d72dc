"""Truncated Poincare series with integer coefficients."""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


def monomial_series(degrees: Iterable[int], D: int) -> np.ndarray:
    """sum_g t^{deg g}, truncated at t^D."""
    out = np.zeros(D + 1, dtype=np.int64)
    for d in degrees:
        if d < 0:
            raise ValueError(f"negative degree {d}")
        if d <= D:
            out[d] += 1
    return out


def polynomial_ring_series(degrees: Sequence[int], D: int) -> np.ndarray:
    """1 / prod (1 - t^{d_i}), truncated at t^D."""
    out = np.zeros(D + 1, dtype=np.int64)
    out[0] = 1
    for d in degrees:
        if d <= 0:
            raise ValueError(f"polynomial generators need positive degree, got {d}")
        for k in range(d, D + 1):
            out[k] += out[k - d]
    return out


def multiply(a: np.ndarray, b: np.ndarray, D: int | None = None) -> np.ndarray:
    D = min(len(a), len(b)) - 1 if D is None else D
    return np.convolve(a[: D + 1], b[: D + 1])[: D + 1]


def shift(a: np.ndarray, k: int) -> np.ndarray:
    """t^k * a, truncated to the same length."""
    out = np.zeros_like(a)
    if k < len(a):
        out[k:] = a[: len(a) - k]
    return out


def free_module_series(generator_degrees: Sequence[int], ring_degrees: Sequence[int], D: int) -> list[int]:
    """Poincare series of the free module R{g_1, ...} over R = F_p[ring generators]."""
    s = multiply(monomial_series(generator_degrees, D), polynomial_ring_series(ring_degrees, D), D)
    return [int(x) for x in s]


def brute_series(coeff_fn, D: int) -> list[int]:
    """Tabulate a degree -> dimension function; the pair of this and a closed series is a dual route."""
    return [int(coeff_fn(d)) for d in range(D + 1)]
