"""Sieve-based arithmetic core.

Provides the von Mangoldt function, the Chebyshev function psi and its
jump-averaged and iterated variants, and the Goldbach singular series.

Memory: a table of size ``n_max`` holds two float64 arrays (Lambda and the
psi prefix, 16 bytes per entry) plus a transient boolean sieve (1 byte per
entry).  ``n_max = 10**7`` needs about 170 MB.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numba
import numpy as np

CACHE_MAGIC = b"LMB1"
MAX_ITERATED_ORDER = 20
# exp(700) is close to the largest finite double
_EXPONENT_BUDGET = 700.0


@numba.njit(cache=True)
def kahan_cumsum(x):
    """Running sum of ``x`` with Kahan compensation, in index order."""
    out = np.empty_like(x)
    s = 0.0
    c = 0.0
    for i in range(x.size):
        y = x[i] - c
        t = s + y
        c = (t - s) - y
        s = t
        out[i] = s
    return out


@dataclass(frozen=True, eq=False)
class LambdaTable:
    """Von Mangoldt values ``lam[n]`` and prefix sums ``psi_prefix[n]`` for 0 <= n <= n_max.

    Index 0 is a zero placeholder so that ``lam[n]`` is Lambda(n).
    """

    n_max: int
    lam: np.ndarray
    psi_prefix: np.ndarray

    def __post_init__(self):
        for arr in (self.lam, self.psi_prefix):
            if arr.shape != (self.n_max + 1,):
                raise ValueError(f"array shape {arr.shape} does not match n_max={self.n_max}")
            arr.flags.writeable = False

    def check_range(self, n: int) -> None:
        if n > self.n_max:
            raise IndexError(f"argument {n} exceeds table range n_max={self.n_max}")


def prime_sieve(n: int) -> np.ndarray:
    """Primes ``p <= n`` (Eratosthenes, odd-only striding)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    is_p[4::2] = False
    for i in range(3, math.isqrt(n) + 1, 2):
        if is_p[i]:
            is_p[i * i :: 2 * i] = False
    return np.flatnonzero(is_p)


def sieve_lambda(n_max: int) -> LambdaTable:
    """Build the von Mangoldt table up to ``n_max`` in O(n_max log log n_max)."""
    n_max = int(n_max)
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    try:
        lam = np.zeros(n_max + 1, dtype=np.float64)
        primes = prime_sieve(n_max)
    except MemoryError as exc:
        need = 17 * (n_max + 1)
        raise MemoryError(f"cannot allocate Lambda table for n_max={n_max} (~{need} bytes)") from exc

    lam[primes] = np.log(primes.astype(np.float64))
    for p in primes[: np.searchsorted(primes, math.isqrt(n_max), side="right")]:
        p = int(p)
        logp = math.log(p)
        q = p * p
        while q <= n_max:
            lam[q] = logp
            q *= p
    return LambdaTable(n_max, lam, kahan_cumsum(lam))


def save_table(table: LambdaTable, path) -> None:
    """Write the binary cache: magic, n_max (u64 LE), then Lambda as f64 LE."""
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<Q", table.n_max))
        fh.write(np.ascontiguousarray(table.lam, dtype="<f8").tobytes())


def load_table(path) -> LambdaTable:
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != CACHE_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, expected {CACHE_MAGIC!r}")
        (n_max,) = struct.unpack("<Q", fh.read(8))
        lam = np.frombuffer(fh.read(), dtype="<f8").astype(np.float64)
    if lam.size != n_max + 1:
        raise ValueError(f"{path}: truncated cache ({lam.size} values for n_max={n_max})")
    return LambdaTable(int(n_max), lam, kahan_cumsum(lam))


def cached_table(n_max: int, cache_dir=None) -> LambdaTable:
    """Return a table covering ``n_max``, reusing any cache file in ``cache_dir`` that is large enough."""
    if cache_dir is None:
        return sieve_lambda(n_max)
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    best = None
    for f in cache_dir.glob("lambda_*.lmb"):
        try:
            size = int(f.stem.split("_", 1)[1])
        except ValueError:
            continue
        if size >= n_max and (best is None or size < best[0]):
            best = (size, f)
    if best is not None:
        return load_table(best[1])
    table = sieve_lambda(n_max)
    save_table(table, cache_dir / f"lambda_{n_max}.lmb")
    return table


def psi(x: float, table: LambdaTable) -> float:
    """Chebyshev psi(x) = sum of Lambda(m) for m <= x."""
    if x < 2:
        return 0.0
    n = math.floor(x)
    table.check_range(n)
    return float(table.psi_prefix[n])


def psi0(t: float, table: LambdaTable) -> float:
    """psi with half weight at the jump: psi(t) - Lambda(t)/2 at integers."""
    if t < 2:
        return 0.0
    n = math.floor(t)
    table.check_range(n)
    value = float(table.psi_prefix[n])
    if t == n:
        value -= 0.5 * float(table.lam[n])
    return value


def psi_iterated(j: int, t: float, table: LambdaTable) -> float:
    """psi_j(t) = (1/j!) * sum_{n <= t} (t - n)**j * Lambda(n), evaluated directly.

    Orders above 20, or orders whose largest term would overflow a double,
    are rejected.
    """
    if j < 0:
        raise ValueError(f"order must be non-negative, got {j}")
    if j > MAX_ITERATED_ORDER or (t > 1 and j * math.log(t) + math.log(math.log(t) + 1) > _EXPONENT_BUDGET):
        raise OverflowError(f"psi_{j}({t}) would overflow double range")
    if j == 0:
        return psi(t, table)
    if t < 2:
        return 0.0
    n = math.floor(t)
    table.check_range(n)
    ns = np.arange(2, n + 1, dtype=np.float64)
    terms = (t - ns) ** j * table.lam[2 : n + 1]
    return math.fsum(terms) / math.factorial(j)


@lru_cache(maxsize=8)
def _twin_prime_factor(prime_cutoff: int) -> float:
    """prod over 2 < p <= cutoff of (1 - 1/(p-1)^2), accumulated in log space."""
    p = prime_sieve(prime_cutoff)[1:].astype(np.float64)
    return math.exp(math.fsum(np.log1p(-1.0 / (p - 1.0) ** 2)))


def odd_prime_divisors(k: int) -> list[int]:
    out = []
    k = int(k)
    while k % 2 == 0:
        k //= 2
    d = 3
    while d * d <= k:
        if k % d == 0:
            out.append(d)
            while k % d == 0:
                k //= d
        d += 2
    if k > 1:
        out.append(k)
    return out


def singular_series(k: int, prime_cutoff: int = 10**7) -> float:
    """Goldbach singular series, zero at odd ``k``.

    The infinite product is truncated at ``prime_cutoff``; the discarded tail
    is a relative error below ``1/prime_cutoff``.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if k % 2:
        return 0.0
    divs = odd_prime_divisors(k)
    if divs and divs[-1] > prime_cutoff:
        raise ValueError(f"prime_cutoff {prime_cutoff} is below the prime factor {divs[-1]} of {k}")
    value = 2.0 * _twin_prime_factor(int(prime_cutoff))
    for p in divs:
        value *= (p - 1) / (p - 2)
    return value
