"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test prints a single PASS/FAIL line; the lines are collected again in
the "acceptance criteria" section of the pytest summary.  Runtimes exclude
building the session's sieve tables ("given cached sieve").
"""
import math
import time

import numpy as np
import pytest
import scipy.fft

from goldbach_explicit import arith, circle, experiments, goldbach
from goldbach_explicit.quadrature import panel_plan, quad
from goldbach_explicit.zeros import check_sum_integral

from oracles import lambda_trial

pytestmark = pytest.mark.acceptance


def _fmt(values):
    return ", ".join(f"{v:.3g}" for v in values)


def test_criterion_01_sieve(criterion):
    t0 = time.perf_counter()
    tb = arith.sieve_lambda(10**5)
    psi10 = arith.psi(10, tb)
    elapsed = time.perf_counter() - t0
    oracle = np.array([lambda_trial(n) for n in range(1, 10**5 + 1)])
    err = float(np.max(np.abs(tb.lam[1:] - oracle)))
    ok = err <= 1e-12 and abs(psi10 - 7.8320141) <= 1e-6 and elapsed < 1
    criterion(1, ok, f"max|Lambda - trial| = {err:.2e} (<= 1e-12), psi(10) = {psi10:.9f} "
                     f"(7.8320141 +- 1e-6), runtime {elapsed:.2f}s (< 1s)")


def test_criterion_02_convolution(criterion, small_table):
    t0 = time.perf_counter()
    worst = 0.0
    for n_max in (10, 100, 1000, 4096):
        for k in (2, 3):
            f = goldbach.r_table(n_max, k, small_table, method="fft").values
            d = goldbach.r_table(n_max, k, small_table, method="direct").values
            worst = max(worst, float(np.max(np.abs(f - d))))
    s10 = goldbach.sum_R(10, small_table)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and abs(s10 - 24.6985042) <= 1e-6 and elapsed < 10
    criterion(2, ok, f"FFT vs direct max-abs {worst:.2e} (<= 1e-6), sum_(n<=10) R(n) = {s10:.7f} "
                     f"(24.6985042 +- 1e-6), runtime {elapsed:.2f}s (< 10s)")


def test_criterion_03_i2_identity(criterion, small_table):
    t0 = time.perf_counter()
    rel = []
    for y, N in ((5, 10), (500, 1000), (2000, 2000)):
        lhs, rhs, gap = circle.i2_identity_check(y, N, small_table)
        rel.append(gap / abs(rhs))
    value = circle.i2_identity_check(5, 10, small_table)[1]
    elapsed = time.perf_counter() - t0
    ok = max(rel) <= 1e-8 and abs(value + 3.5157545) <= 1e-6 and elapsed < 5
    criterion(3, ok, f"relative gaps [{_fmt(rel)}] (<= 1e-8), I2(5,10) = {value:.7f} "
                     f"(-3.5157545 +- 1e-6), runtime {elapsed:.2f}s (< 5s)")


def test_criterion_04_quadrature(criterion):
    t0 = time.perf_counter()
    rel = []
    for N in (100, 1000):
        got = circle.inverse_z_square_mass(N).value
        exact = N / math.pi * math.atan(math.pi * N)
        rel.append(abs(got - exact) / exact)
    plan = panel_plan(-0.5, 0.5, bandwidth=40, cycles_per_panel=0.25)
    orth = 0.0
    for m in range(21):
        for n in range(21):
            v = quad(lambda a, d=m - n: np.exp(2j * np.pi * d * a), -0.5, 0.5, plan).value
            orth = max(orth, abs(v - (m == n)))
    elapsed = time.perf_counter() - t0
    ok = max(rel) <= 1e-6 and orth <= 1e-10 and elapsed < 5
    criterion(4, ok, f"arctan identity relative errors [{_fmt(rel)}] (<= 1e-6), orthogonality "
                     f"max error {orth:.2e} (<= 1e-10), runtime {elapsed:.2f}s (< 5s)")


def test_criterion_05_residue(criterion):
    t0 = time.perf_counter()
    checks = [circle.residue_check(n, 1000) for n in (1, 10, 100, 500, 1000)]
    elapsed = time.perf_counter() - t0
    gaps = [c.gap for c in checks]
    ok = max(gaps) <= 5 and all(c.converged for c in checks) and elapsed < 30
    criterion(5, ok, f"residue gaps [{_fmt(gaps)}] (<= 5), runtime {elapsed:.2f}s (< 30s)")


def test_criterion_06_mean_square(criterion, table):
    t0 = time.perf_counter()
    ratios = []
    for N in (10**3, 10**4):
        c = circle.mean_square_check(N, table)
        ratios.append(c.gap / (2 * N * math.sqrt(math.log(N))))
    p = circle.parseval_check(500, table)
    elapsed = time.perf_counter() - t0
    prel = p.gap / p.target
    ok = max(ratios) <= 1 and prel <= 1e-6 and elapsed < 120
    criterion(6, ok, f"mean-square gap / 2N sqrt(ln N) = [{_fmt(ratios)}] (<= 1), Parseval relative gap "
                     f"{prel:.2e} (<= 1e-6), runtime {elapsed:.1f}s (< 120s)")


def test_criterion_07_sum_integral(criterion, table, zt):
    t0 = time.perf_counter()
    gaps = [check_sum_integral(M, zt.height, table, zt)[2] for M in (10**3, 10**4, 10**5)]
    elapsed = time.perf_counter() - t0
    ok = zt.gammas.size == 100_000 and max(gaps) <= 2 and elapsed < 60
    criterion(7, ok, f"{zt.gammas.size} zeros to height {zt.height:.1f}; normalized gaps [{_fmt(gaps)}] "
                     f"(<= 2), runtime {elapsed:.2f}s (< 60s)")


def _theorem1(table, zt):
    return experiments.verify_theorem1([10**3, 10**4, 10**5, 10**6], table, zt, zt.height)


def test_criterion_08_theorem1(criterion, table, zt):
    t0 = time.perf_counter()
    rep = _theorem1(table, zt)
    abl = experiments.verify_theorem1([10**5, 10**6], table, zt, zt.height, include_zeros=False)
    elapsed = time.perf_counter() - t0
    norm = [r.normalized for r in rep.rows]
    flags = [r.flagged for r in rep.rows]
    abl_norm = [r.normalized for r in abl.rows]
    ok = max(norm) <= 1 and not any(flags) and min(abl_norm) > 1 and elapsed < 300
    criterion(8, ok, f"normalized [{_fmt(norm)}] (<= 1), flags clean {not any(flags)}, ablation at "
                     f"N = 1e5, 1e6 [{_fmt(abl_norm)}] (must exceed 1), runtime {elapsed:.1f}s (< 300s)")


def test_criterion_09_theorems_3_4(criterion, table, zt):
    t0 = time.perf_counter()
    r3 = experiments.verify_theorem3([10**3, 3 * 10**3, 10**4], 3, table, zt, zt.height)
    r4 = experiments.verify_theorem4(10**5, [10**2, 10**3, 10**4], table, zt, zt.height)
    elapsed = time.perf_counter() - t0
    n3 = [r.normalized for r in r3.rows]
    n4 = [r.normalized for r in r4.rows]
    flagged = any(r.flagged for r in r3.rows + r4.rows)
    ok = max(n3 + n4) <= 1 and not flagged and elapsed < 300
    criterion(9, ok, f"k=3 normalized [{_fmt(n3)}], short-interval normalized [{_fmt(n4)}] (<= 1), "
                     f"flags clean {not flagged}, runtime {elapsed:.1f}s (< 300s)")


def test_criterion_10_remark(criterion):
    t0 = time.perf_counter()
    a = circle.remark_counterexample(10**6, 10**3)
    b = circle.remark_counterexample(10**6, math.sqrt(10**6))
    elapsed = time.perf_counter() - t0
    ok = abs(a.integral - 2.0432e8) <= 1e3 and 0.05 <= b.ratio <= 0.15 and elapsed < 1
    criterion(10, ok, f"integral {a.integral:.2f} (2.0432e8 +- 1e3), ratio at y = sqrt(N) {b.ratio:.4f} "
                      f"(in [0.05, 0.15]), runtime {elapsed:.3f}s (< 1s)")


def test_criterion_11_determinism(criterion, table, zt, tmp_path):
    paths = []
    for workers in (1, 4):
        with scipy.fft.set_workers(workers):
            p = tmp_path / f"thm1_w{workers}.csv"
            experiments.emit_csv(_theorem1(table, zt), p)
            paths.append(p)
    same = paths[0].read_bytes() == paths[1].read_bytes()
    criterion(11, same, f"criterion 8 CSV with 1 and 4 FFT workers byte-identical: {same}")
