"""Zeta-zero tables and truncated sums over nontrivial zeros.

All zeros are taken on the critical line, rho = 1/2 + i*gamma, and only the
positive ordinates are stored; every sum folds each conjugate pair into
``2 * Re(term)``.  Sums are accumulated with ``math.fsum``, so results do
not depend on evaluation order or chunking.
"""
from __future__ import annotations

import gzip
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .arith import LambdaTable, psi0

# -zeta'/zeta(0)
LOG_2PI = math.log(2.0 * math.pi)
COUNT_GATE = 2.0

BUILTIN_TABLES = {
    "builtin:100": "zeros_100.txt",
    "builtin:100k": "zeros_100k.txt.gz",
}


class ZeroTableError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ZeroTable:
    gammas: np.ndarray
    height: float
    source_id: str

    def __post_init__(self):
        self.gammas.flags.writeable = False

    def upto(self, Z: float) -> np.ndarray:
        if Z > self.height:
            raise ValueError(f"truncation height {Z} exceeds table height {self.height}")
        return self.gammas[: np.searchsorted(self.gammas, Z, side="right")]


@dataclass(frozen=True)
class SumWithBound:
    value: float
    tail_bound: float
    trunc_height: float


def smooth_zero_count(T):
    """Riemann-von Mangoldt main terms for the number of zeros with 0 < gamma <= T."""
    u = np.asarray(T, dtype=np.float64) / (2.0 * np.pi)
    return u * np.log(u) - u + 7.0 / 8.0


def _check_table(gammas: np.ndarray, source: str) -> None:
    if gammas.size == 0:
        raise ZeroTableError(f"{source}: no ordinates")
    bad = np.flatnonzero(np.diff(gammas) <= 0)
    if bad.size:
        i = int(bad[0]) + 1
        raise ZeroTableError(f"{source}: ordinate {i + 1} ({gammas[i]}) does not exceed its predecessor")
    if not 14.13 <= gammas[0] <= 14.14:
        raise ZeroTableError(f"{source}: first ordinate {gammas[0]} is not the first zeta zero")
    # counts just below and at each ordinate straddle the jump of N(T)
    idx = np.arange(1, gammas.size + 1, dtype=np.float64)
    smooth = smooth_zero_count(gammas)
    dev = np.maximum(np.abs(idx - smooth), np.abs(idx - 1 - smooth))
    worst = int(np.argmax(dev))
    if dev[worst] > COUNT_GATE:
        raise ZeroTableError(
            f"{source}: zero count {worst + 1} at height {gammas[worst]:.6f} departs from "
            f"the Riemann-von Mangoldt estimate {smooth[worst]:.2f} by more than {COUNT_GATE:g}; "
            "table is likely missing or duplicating zeros"
        )


def parse_zeros(lines, source: str = "<memory>") -> ZeroTable:
    """Parse one ordinate per line; '#' comments and blank lines are skipped."""
    values = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            g = float(line.split()[0])
        except ValueError:
            raise ZeroTableError(f"{source}:{lineno}: cannot parse {line!r} as an ordinate") from None
        if not math.isfinite(g) or g <= 0:
            raise ZeroTableError(f"{source}:{lineno}: ordinate must be positive and finite, got {line!r}")
        values.append(g)
    gammas = np.array(values, dtype=np.float64)
    _check_table(gammas, source)
    return ZeroTable(gammas, float(gammas[-1]), source)


def load_zeros(path) -> ZeroTable:
    """Load a zeros file, or a shipped table via ``builtin:100`` / ``builtin:100k``."""
    key = str(path)
    if key in BUILTIN_TABLES:
        ref = resources.files("goldbach_explicit") / "data" / BUILTIN_TABLES[key]
        with resources.as_file(ref) as p:
            return _read_zero_file(p, key)
    return _read_zero_file(Path(path), key)


def _read_zero_file(path: Path, source: str) -> ZeroTable:
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rt", encoding="utf-8") as fh:
        return parse_zeros(fh, source)


def tail_estimate(x: float, k: int, Z: float) -> float:
    """Size of the discarded |gamma| > Z part of a k-fold zero sum at x.

    Integrates 2 x^(k-1/2) / t^2 against the zero density (1/2pi) log(t/2pi)
    over t > Z, which dominates the k >= 2 terms.
    """
    if Z < 2.0 * math.pi * math.e:
        raise ValueError(f"Z must be at least 2*pi*e, got {Z}")
    return x ** (k - 0.5) / math.pi * (math.log(Z / (2.0 * math.pi)) + 1.0) / Z


def _rising(gammas: np.ndarray, k: int) -> np.ndarray:
    rho = 0.5 + 1j * gammas
    den = np.ones_like(rho)
    for j in range(k):
        den = den * (rho + j)
    return den


def _power_terms(x: float, k: int, gammas: np.ndarray) -> np.ndarray:
    """x^(rho+k-1) as x^(k-1/2) * e^(i gamma log x)."""
    phase = gammas * math.log(x)
    return x ** (k - 0.5) * (np.cos(phase) + 1j * np.sin(phase))


def _tail_or_zero(x: float, k: int, Z: float) -> float:
    # below 2*pi*e no zeros exist yet, so the estimate is not meaningful
    return tail_estimate(x, k, Z) if Z >= 2.0 * math.pi * math.e else math.inf


def zero_sum_k(x: float, k: int, Z: float, zt: ZeroTable) -> SumWithBound:
    """sum over zeros with |gamma| <= Z of x^(rho+k-1) / (rho (rho+1) ... (rho+k-1))."""
    if x < 2:
        raise ValueError(f"x must be >= 2, got {x}")
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    g = zt.upto(Z)
    terms = _power_terms(x, k, g) / _rising(g, k)
    return SumWithBound(2.0 * math.fsum(terms.real), _tail_or_zero(x, k, Z), float(Z))


def zero_sum_interval(N: float, H: float, Z: float, zt: ZeroTable) -> SumWithBound:
    """sum over zeros of ((N+H)^(rho+1) - N^(rho+1)) / (rho (rho+1)), differenced per term."""
    if not 2 <= H <= N:
        raise ValueError(f"need 2 <= H <= N, got N={N}, H={H}")
    g = zt.upto(Z)
    diff = _power_terms(N + H, 2, g) - _power_terms(N, 2, g)
    tail = _tail_or_zero(N + H, 2, Z) + _tail_or_zero(N, 2, Z)
    return SumWithBound(2.0 * math.fsum((diff / _rising(g, 2)).real), tail, float(Z))


def _nearest_integer_distance(t: float) -> float:
    return abs(t - round(t))


def psi0_explicit(t: float, Z: float, zt: ZeroTable, c: float = 1.0, constant: float = LOG_2PI) -> SumWithBound:
    """Truncated explicit formula for psi0(t), t >= 2.

    The tail bound is ``c * [(t/Z) log^2(tZ) + log t * min(1, t / (Z ||t||))]``
    with a configurable implied constant ``c``.
    """
    if t < 2:
        raise ValueError(f"t must be >= 2, got {t}")
    g = zt.upto(Z)
    rho = 0.5 + 1j * g
    phase = g * math.log(t)
    terms = math.sqrt(t) * (np.cos(phase) + 1j * np.sin(phase)) / rho
    value = t - 2.0 * math.fsum(terms.real) - constant - 0.5 * math.log1p(-1.0 / (t * t))
    dist = _nearest_integer_distance(t)
    near = 1.0 if dist == 0 else min(1.0, t / (Z * dist))
    bound = c * ((t / Z) * math.log(t * Z) ** 2 + math.log(t) * near)
    return SumWithBound(value, bound, float(Z))


def fit_log_constant(table: LambdaTable, zt: ZeroTable, ts=(10.5, 100.5, 1000.5), Z=None) -> float:
    """Fit the explicit formula's constant term against sieved psi0.

    Each residual ``psi0_explicit(t) - psi0(t)`` (taken with constant 0) is
    weighted by ``1 / tail_bound(t)**2``, so points whose truncation error
    budget is large barely move the estimate.  The result should reproduce
    -zeta'/zeta(0) = log(2 pi).
    """
    Z = zt.height if Z is None else Z
    fits = [psi0_explicit(t, Z, zt, constant=0.0) for t in ts]
    resid = np.array([f.value - psi0(t, table) for f, t in zip(fits, ts)])
    w = np.array([f.tail_bound for f in fits]) ** -2.0
    return math.fsum(w * resid) / math.fsum(w)


def check_sum_integral(M: int, Z: float, table: LambdaTable, zt: ZeroTable):
    """Compare sum_{n<=M} (psi(n) - n) with minus the truncated zero sum.

    Returns ``(lhs, rhs, normalized_gap)`` with ``normalized_gap = |lhs - rhs| / M``.
    """
    table.check_range(M)
    n = np.arange(1, M + 1, dtype=np.float64)
    lhs = math.fsum(table.psi_prefix[1 : M + 1] - n)
    rhs = -zero_sum_k(M, 2, Z, zt).value if M >= 2 else 0.0
    return lhs, rhs, abs(lhs - rhs) / M
