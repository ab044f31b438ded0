"""Goldbach representation numbers R_k(n) and their cumulative sums.

Two independent routes build an ``RTable``: a direct convolution oracle
(exact summation order, O(n^2)) and a real FFT fast path.  The FFT path
estimates its own rounding error and refuses rather than return a table
whose entries may be off by more than ``FFT_ERROR_BUDGET``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .arith import LambdaTable, kahan_cumsum

FFT_ERROR_BUDGET = 1e-4
MAX_SUM_FOLD = 6


class PrecisionBudgetError(ArithmeticError):
    """The FFT rounding estimate exceeds the per-entry budget."""


@dataclass(frozen=True, eq=False)
class RTable:
    n_max: int
    k: int
    values: np.ndarray
    method: str

    def __post_init__(self):
        self.values.flags.writeable = False

    def check_range(self, n: int) -> None:
        if n > self.n_max:
            raise IndexError(f"argument {n} exceeds RTable range n_max={self.n_max}")


def r2_direct(n: int, table: LambdaTable) -> float:
    """R(n) = sum_{h=1}^{n-1} Lambda(h) Lambda(n-h), summed exactly-rounded."""
    table.check_range(n)
    if n < 4:
        return 0.0
    lam = table.lam
    return math.fsum(lam[1:n] * lam[n - 1 : 0 : -1])


def fft_error_estimate(a: np.ndarray, k: int, length: int) -> float:
    """Heuristic per-entry rounding error of a k-th power convolution by FFT.

    Uses eps * k * log2(L) * ||a||_1^(k-1) * ||a||_2, the usual FFT bound
    with ``||a * b||_2 <= ||a||_1 ||b||_2`` applied fold by fold.
    """
    eps = np.finfo(np.float64).eps
    l1 = float(np.sum(np.abs(a)))
    l2 = float(np.sqrt(np.sum(a * a)))
    return eps * k * math.log2(length) * l1 ** (k - 1) * l2


def _convolve_fft(a: np.ndarray, b: np.ndarray, n: int, workers=None) -> np.ndarray:
    """Linear convolution of a and b, truncated to indices 0..n."""
    length = scipy.fft.next_fast_len(a.size + b.size - 1, real=True)
    eps = np.finfo(np.float64).eps
    err = eps * math.log2(length) * float(np.sum(np.abs(b))) * float(np.sqrt(np.sum(a * a)))
    if err > FFT_ERROR_BUDGET:
        raise PrecisionBudgetError(f"estimated FFT rounding {err:.2e} per entry exceeds {FFT_ERROR_BUDGET:g}")
    fa = scipy.fft.rfft(a, length, workers=workers)
    fb = fa if b is a else scipy.fft.rfft(b, length, workers=workers)
    return scipy.fft.irfft(fa * fb, length, workers=workers)[: n + 1]


def r_table(n_max: int, k: int, table: LambdaTable, method: str = "fft", workers=None) -> RTable:
    """Table of R_k(n) for 0 <= n <= n_max.

    ``method="direct"`` convolves k-1 times with ``numpy.convolve``;
    ``method="fft"`` raises one real transform of Lambda to the k-th power,
    with transform length above ``k * n_max`` so nothing wraps.
    """
    if k < 2:
        raise ValueError(f"fold count must be >= 2, got {k}")
    table.check_range(n_max)
    a = np.array(table.lam[: n_max + 1])

    if method == "direct":
        out = a
        for _ in range(k - 1):
            out = np.convolve(out, a)[: n_max + 1]
    elif method == "fft":
        need = k * n_max + 1
        if need > 2**31:
            raise OverflowError(f"transform length {need} too large; split the range")
        length = scipy.fft.next_fast_len(need, real=True)
        err = fft_error_estimate(a, k, length)
        if err > FFT_ERROR_BUDGET:
            raise PrecisionBudgetError(
                f"estimated FFT rounding {err:.2e} per entry exceeds {FFT_ERROR_BUDGET:g} "
                f"(k={k}, n_max={n_max}); split the range or use the direct method"
            )
        spectrum = scipy.fft.rfft(a, length, workers=workers)
        out = scipy.fft.irfft(spectrum**k, length, workers=workers)[: n_max + 1]
        # exact zeros come back as +-rounding noise
        np.maximum(out, 0.0, out=out)
    else:
        raise ValueError(f"unknown method {method!r}")

    out[: min(2 * k, n_max + 1)] = 0.0
    return RTable(n_max, k, out, method)


def sum_R(N: int, table: LambdaTable) -> float:
    """sum_{n<=N} R(n) via the pairing sum_h Lambda(h) psi(N-h), O(N)."""
    table.check_range(N)
    if N < 4:
        return 0.0
    return math.fsum(table.lam[1:N] * table.psi_prefix[N - 1 : 0 : -1])


def sum_Rk(N: int, k: int, table: LambdaTable, workers=None) -> float:
    """sum_{n<=N} R_k(n).

    Builds the (k-1)-fold convolution of Lambda one level at a time (each
    level a pairwise FFT convolution truncated at N), prefix-sums it, and
    pairs it with Lambda as in ``sum_R``.
    """
    if not 2 <= k <= MAX_SUM_FOLD:
        raise ValueError(f"k must lie in [2, {MAX_SUM_FOLD}], got {k}")
    table.check_range(N)
    if k == 2:
        return sum_R(N, table)
    if N < 2 * k:
        return 0.0
    a = np.array(table.lam[: N + 1])
    conv = a
    for _ in range(k - 2):
        conv = _convolve_fft(a, conv, N, workers=workers)
        np.maximum(conv, 0.0, out=conv)
    prefix = kahan_cumsum(conv)
    return math.fsum(a[1:N] * prefix[N - 1 : 0 : -1])


def weighted_discrepancy(y: int, N: int, r: RTable, table: LambdaTable) -> float:
    """sum_{n<=y} [R(n) - (2 psi(n) - n)] exp(-n/N)."""
    if not 2 <= y <= N:
        raise ValueError(f"need 2 <= y <= N, got y={y}, N={N}")
    r.check_range(y)
    table.check_range(y)
    n = np.arange(1, y + 1, dtype=np.float64)
    terms = (r.values[1 : y + 1] - (2.0 * table.psi_prefix[1 : y + 1] - n)) * np.exp(-n / N)
    return math.fsum(terms)


def short_interval_sum(N: int, H: int, r: RTable) -> float:
    """sum_{n=N}^{N+H} R(n), inclusive at both ends; requires 2 <= H <= N."""
    if not 2 <= H <= N:
        raise ValueError(f"need 2 <= H <= N, got N={N}, H={H}")
    r.check_range(N + H)
    return math.fsum(r.values[N : N + H + 1])
