"""Weighted circle-method toolkit.

Exponential sums over alpha in [-1/2, 1/2] with the damping weight
exp(-n/N), written in terms of z = 1/N - 2*pi*i*alpha:

* ``S_tilde``: sum of Lambda(n) e^{-n/N} e(n alpha)
* ``V``: sum of e^{-m z} = 1/(e^z - 1)
* ``T``: sum_{n<=y} e(n alpha)
* ``fejer_L``: |T(N; alpha)|^2

plus numerical checks of the mean-value lemmas built on them.  Implied
constants ("<<", "O(1)") are not derived here; the checks report ratios
and the frozen gates live in the constants file.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import finufft
import numpy as np

from .arith import LambdaTable
from .goldbach import r_table
from .quadrature import QuadResult, panel_plan, quad

TWO_PI = 2.0 * math.pi
# S_tilde integrands carry negligible energy above this many cycles per N
S_BANDWIDTH_FACTOR = 25.0
# below this many points the direct (fsum) evaluator is used
_DIRECT_LIMIT = 64


@dataclass(frozen=True)
class ZPoint:
    N: int
    alpha: float

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be positive, got {self.N}")
        if not -0.5 <= self.alpha <= 0.5:
            raise ValueError(f"alpha must lie in [-1/2, 1/2], got {self.alpha}")

    @property
    def z(self) -> complex:
        return complex(1.0 / self.N, -TWO_PI * self.alpha)


@dataclass(frozen=True)
class ExpSumConfig:
    """Truncation of the S_tilde series at ``trunc_factor * N`` terms.

    At 40N the discarded tail is below 1e-12 * N.
    """

    trunc_factor: int = 40
    nufft_eps: float = 1e-13

    def trunc_len(self, N: int) -> int:
        return self.trunc_factor * int(N)


DEFAULT_CONFIG = ExpSumConfig()


def z_of(N, alpha):
    return 1.0 / N - 1j * TWO_PI * np.asarray(alpha, dtype=np.float64)


def _unit_phase(x):
    """e(x) with x reduced mod 1 first."""
    x = np.asarray(x, dtype=np.float64)
    r = x - np.rint(x)
    return np.cos(TWO_PI * r) + 1j * np.sin(TWO_PI * r)


def V(N, alpha):
    """1 / (e^z - 1), the closed form of sum_{m>=1} e^{-m/N} e(m alpha)."""
    return 1.0 / np.expm1(z_of(N, alpha))


def T(y: int, alpha):
    """sum_{n=1}^{y} e(n alpha) via e((y+1)d/2) sin(pi y d) / sin(pi d), d = alpha mod 1.

    The ratio is taken as y sinc(y d) / sinc(d), which stays accurate as d -> 0.
    """
    a = np.asarray(alpha, dtype=np.float64)
    d = a - np.rint(a)
    out = _unit_phase(0.5 * (y + 1) * d) * (y * np.sinc(y * d) / np.sinc(d))
    return out if out.ndim else complex(out)


def fejer_L(N: int, alpha):
    """Fejer kernel sum_{|n|<=N} (N - |n|) e(n alpha) = |T(N; alpha)|^2."""
    return np.abs(T(N, alpha)) ** 2


def _coefficients(N: int, table: LambdaTable, cfg: ExpSumConfig) -> np.ndarray:
    M = cfg.trunc_len(N)
    if M > table.n_max:
        raise IndexError(f"S_tilde truncation {M} exceeds table range n_max={table.n_max}")
    n = np.arange(M + 1, dtype=np.float64)
    return table.lam[: M + 1] * np.exp(-n / N)


def _series_direct(coef: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """sum_n coef[n] e(n alpha), one exactly-rounded fsum per point."""
    idx = np.flatnonzero(coef)
    c = coef[idx]
    out = np.empty(alpha.shape, dtype=np.complex128)
    for i, a in enumerate(alpha.ravel()):
        w = _unit_phase(idx * a)
        out.flat[i] = complex(math.fsum(c * w.real), math.fsum(c * w.imag))
    return out


def _series_nufft(coef: np.ndarray, alpha: np.ndarray, eps: float) -> np.ndarray:
    """sum_n coef[n] e(n alpha) by a type-2 nonuniform FFT, modes shifted to be centred."""
    half = (coef.size + 1) // 2
    modes = np.zeros(2 * half, dtype=np.complex128)
    modes[: coef.size] = coef
    x = TWO_PI * alpha.ravel()
    vals = finufft.nufft1d2(x, modes, eps=eps, isign=1, modeord=0)
    return (vals * _unit_phase(half * alpha.ravel())).reshape(alpha.shape)


def S_tilde(N: int, alpha, table: LambdaTable, cfg: ExpSumConfig = DEFAULT_CONFIG, method: str = "auto"):
    """Truncated sum of Lambda(n) e^{-n/N} e(n alpha) over n <= cfg.trunc_len(N).

    ``method`` is ``"direct"`` (compensated, exactly conjugate-symmetric),
    ``"nufft"``, or ``"auto"`` (direct for small inputs).
    """
    a = np.asarray(alpha, dtype=np.float64)
    coef = _coefficients(N, table, cfg)
    if method == "auto":
        method = "direct" if a.size <= _DIRECT_LIMIT else "nufft"
    if method == "direct":
        out = _series_direct(coef, a)
    elif method == "nufft":
        if np.any(np.abs(a) > 1.5):
            raise ValueError("nufft evaluation needs |alpha| <= 3/2")
        out = _series_nufft(coef, a, cfg.nufft_eps)
    else:
        raise ValueError(f"unknown method {method!r}")
    return out if out.ndim else complex(out)


def R_tilde(N: int, alpha, table: LambdaTable, cfg: ExpSumConfig = DEFAULT_CONFIG):
    """S_tilde(alpha) - 1/z."""
    return S_tilde(N, alpha, table, cfg) - 1.0 / z_of(N, alpha)


def _s_plan(N, a=-0.5, b=0.5, cfg=DEFAULT_CONFIG, extra=()):
    bandwidth = min(S_BANDWIDTH_FACTOR, cfg.trunc_factor) * N
    return panel_plan(a, b, N=N, bandwidth=bandwidth, cycles_per_panel=1.0, extra=extra)


# ---------------------------------------------------------------- lemma checks

class Check(NamedTuple):
    value: float
    target: float
    gap: float
    converged: bool


def inverse_z_square_mass(N: int, rtol: float = 1e-10) -> QuadResult:
    """Quadrature of 1/|z|^2 over [-1/2, 1/2]; closed form (N/pi) arctan(pi N)."""
    return quad(lambda a: 1.0 / np.abs(z_of(N, a)) ** 2, -0.5, 0.5, panel_plan(-0.5, 0.5, N=N), rtol=rtol)


def residue_check(n: int, N: int) -> Check:
    """Quadrature of e(-n alpha)/z^2 against n e^{-n/N}."""
    if not 1 <= n <= N:
        raise ValueError(f"need 1 <= n <= N, got n={n}, N={N}")
    res = quad(lambda a: _unit_phase(-n * a) / z_of(N, a) ** 2, -0.5, 0.5,
               panel_plan(-0.5, 0.5, N=N, bandwidth=n, cycles_per_panel=0.25))
    target = n * math.exp(-n / N)
    return Check(res.value.real, target, abs(res.value.real - target), res.converged)


def i1_check(y: int, N: int) -> Check:
    """Quadrature of T(y; -alpha)/z^2 against sum_{n<=y} n e^{-n/N}."""
    res = quad(lambda a: T(y, -a) / z_of(N, a) ** 2, -0.5, 0.5,
               panel_plan(-0.5, 0.5, N=N, bandwidth=y, cycles_per_panel=0.25))
    n = np.arange(1, y + 1, dtype=np.float64)
    target = math.fsum(n * np.exp(-n / N))
    return Check(res.value.real, target, abs(res.value.real - target), res.converged)


def mean_square_check(N: int, table: LambdaTable, cfg: ExpSumConfig = DEFAULT_CONFIG) -> Check:
    """Quadrature of |S_tilde - 1/z|^2 over [-1/2, 1/2] against (N/2) log N."""
    res = quad(lambda a: np.abs(R_tilde(N, a, table, cfg)) ** 2, -0.5, 0.5, _s_plan(N, cfg=cfg), max_refine=2)
    target = 0.5 * N * math.log(N)
    return Check(res.value, target, abs(res.value - target), res.converged)


def parseval_check(N: int, table: LambdaTable, cfg: ExpSumConfig = DEFAULT_CONFIG) -> Check:
    """Quadrature of |S_tilde|^2 against the coefficient sum of Lambda(m)^2 e^{-2m/N}."""
    res = quad(lambda a: np.abs(S_tilde(N, a, table, cfg)) ** 2, -0.5, 0.5, _s_plan(N, cfg=cfg), max_refine=2)
    coef = _coefficients(N, table, cfg)
    target = math.fsum(coef * coef)
    return Check(res.value, target, abs(res.value - target), res.converged)


def lp_l2_profile(N: int, xi_list, table: LambdaTable, cfg: ExpSumConfig = DEFAULT_CONFIG):
    """Rows ``(xi, integral, integral / (N xi log^2 N))`` of the local mean square of S_tilde - 1/z."""
    scale = N * math.log(N) ** 2
    rows = []
    for xi in xi_list:
        if not 0 < xi <= 0.5:
            raise ValueError(f"xi must lie in (0, 1/2], got {xi}")
        res = quad(lambda a: np.abs(R_tilde(N, a, table, cfg)) ** 2, -xi, xi, _s_plan(N, -xi, xi, cfg), max_refine=2)
        rows.append((xi, res.value, res.value / (scale * xi)))
    return rows


def i2_identity_check(y: int, N: int, table: LambdaTable):
    """Both sides of the discrete cancellation identity, returned as ``(lhs, rhs, gap)``.

    lhs = sum_{n<=y} e^{-n/N} sum_{m<n} (Lambda(m) - 1), a direct double sum;
    rhs = sum_{n<=y} e^{-n/N} (psi(n-1) - (n-1)) from the sieve prefix.
    """
    if not 1 <= y <= N:
        raise ValueError(f"need 1 <= y <= N, got y={y}, N={N}")
    table.check_range(max(y - 1, 1))
    lam = table.lam
    lhs_terms = [math.exp(-n / N) * math.fsum(lam[1:n] - 1.0) for n in range(1, y + 1)]
    lhs = math.fsum(lhs_terms)
    n = np.arange(1, y + 1, dtype=np.float64)
    rhs = math.fsum(np.exp(-n / N) * (table.psi_prefix[:y] - (n - 1.0)))
    return lhs, rhs, abs(lhs - rhs)


def i2_integral_check(y: int, N: int, table: LambdaTable, cfg: ExpSumConfig = DEFAULT_CONFIG) -> Check:
    """Quadrature of T(y; -alpha) (S_tilde - 1/z)/z against sum_{n<=y} e^{-n/N} (psi(n) - n)."""
    res = quad(lambda a: T(y, -a) * R_tilde(N, a, table, cfg) / z_of(N, a), -0.5, 0.5,
               _s_plan(N, cfg=cfg), max_refine=2)
    n = np.arange(1, y + 1, dtype=np.float64)
    target = math.fsum(np.exp(-n / N) * (table.psi_prefix[1 : y + 1] - n))
    return Check(res.value.real, target, abs(res.value.real - target), res.converged)


def circle_identity_check(y: int, N: int, table: LambdaTable, cfg: ExpSumConfig = DEFAULT_CONFIG) -> Check:
    """Quadrature of S_tilde^2 T(y; -alpha) against sum_{n<=y} e^{-n/N} R(n)."""
    res = quad(lambda a: S_tilde(N, a, table, cfg) ** 2 * T(y, -a), -0.5, 0.5, _s_plan(N, cfg=cfg), max_refine=2)
    r = r_table(y, 2, table, method="fft")
    n = np.arange(1, y + 1, dtype=np.float64)
    target = math.fsum(np.exp(-n / N) * r.values[1:])
    return Check(res.value.real, target, abs(res.value.real - target), res.converged)


class Shell(NamedTuple):
    lo: float
    hi: float
    contribution: float
    majorant: float


def dyadic_shells(y: int):
    """Edges (lo, hi) of the dyadic shells [2^k/y, 2^{k+1}/y] tiling (1/y, 1/2]."""
    shells = []
    k = 0
    while 2**k < y / 2:
        shells.append((2**k / y, min(2 ** (k + 1) / y, 0.5)))
        k += 1
    return shells


def i3_decomposition(y: int, N: int, table: LambdaTable, cfg: ExpSumConfig = DEFAULT_CONFIG):
    """Integral of |T(y; -alpha)| |S_tilde - 1/z|^2, split into the central window and dyadic shells.

    Each entry of the profile carries its contribution and the majorant
    used to bound it: ``y * int |R|^2`` on the window, ``(y / 2^(k+1)) * int |R|^2``
    on shell k (from |T| <= 1/(2||alpha||)).  Shell entries cover both signs
    of alpha.  Returns ``(total, profile)``.
    """
    if not math.isqrt(N) <= y <= N:
        raise ValueError(f"need sqrt(N) <= y <= N, got y={y}, N={N}")

    def both(a):
        r2 = np.abs(R_tilde(N, a, table, cfg)) ** 2
        return np.abs(T(y, -a)) * r2 + 1j * r2

    def piece(lo, hi):
        # zeros of T sit at multiples of 1/y: use them as edges so |T| is smooth per panel
        j = np.arange(math.ceil(lo * y), math.floor(hi * y) + 1) / y
        res = quad(both, lo, hi, _s_plan(N, lo, hi, cfg, extra=j), rtol=1e-6, max_refine=2)
        return res.value.real, res.value.imag

    c_val, c_mass = piece(-1.0 / y, 1.0 / y)
    profile = [Shell(-1.0 / y, 1.0 / y, c_val, y * c_mass)]
    for lo, hi in dyadic_shells(y):
        pv, pm = piece(lo, hi)
        nv, nm = piece(-hi, -lo)
        profile.append(Shell(lo, hi, pv + nv, (0.5 / lo) * (pm + nm)))
    total = math.fsum(s.contribution for s in profile)
    return total, profile


def pointwise_bound_check(N: int, alpha_grid, table: LambdaTable, cfg: ExpSumConfig = DEFAULT_CONFIG):
    """Max over the grid of |S_tilde - 1/z| / (sqrt(N) (1 + sqrt(N |alpha|)) log N); returns ``(max, ratios)``."""
    a = np.asarray(alpha_grid, dtype=np.float64)
    env = math.sqrt(N) * (1.0 + np.sqrt(N * np.abs(a))) * math.log(N)
    ratios = np.abs(R_tilde(N, a, table, cfg)) / env
    return float(np.max(ratios)), ratios


def default_alpha_grid(N: int, size: int = 64) -> np.ndarray:
    """alpha = 0 followed by ``size - 1`` log-spaced points from 1/(10N) to 1/2."""
    return np.concatenate([[0.0], np.geomspace(0.1 / N, 0.5, size - 1)])


class RemarkResult(NamedTuple):
    integral: float
    ratio: float
    full_mean_square: float
    local_bound_holds: bool


def remark_counterexample(N: int, y: float, xi_grid=None) -> RemarkResult:
    """Closed-form integrals of the step function f_N = (1/2) sqrt(N) log N on ||alpha|| <= 1/log N.

    ``integral`` is the integral of |f_N|^2/alpha over [1/y, 1/2] and
    ``ratio`` its size relative to N log^3 N.  Also checks that f_N meets
    the local bound int_{-xi}^{xi} |f|^2 <= N xi log^2 N on ``xi_grid``.
    """
    L = math.log(N)
    if N < 1000 or y < L:
        raise ValueError(f"need N >= 1000 and y >= log N, got N={N}, y={y}")
    height2 = 0.25 * N * L * L
    cut = 1.0 / L
    integral = height2 * math.log(min(cut, 0.5) * y) if 1.0 / y < cut else 0.0
    full = 2.0 * min(cut, 0.5) * height2
    if xi_grid is None:
        xi_grid = np.linspace(0.0, 0.5, 101)
    local = all(2.0 * min(xi, cut) * height2 <= N * xi * L * L * (1 + 1e-15) for xi in xi_grid)
    return RemarkResult(integral, integral / (N * L**3), full, local)
