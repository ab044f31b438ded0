import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from goldbach_explicit import arith
from oracles import lambda_trial

LOG2, LOG3, LOG5, LOG7 = (math.log(p) for p in (2, 3, 5, 7))


def test_lambda_small_values(small_table):
    lam = small_table.lam
    assert lam[1] == 0.0
    assert lam[6] == 0.0
    assert lam[8] == pytest.approx(LOG2, abs=1e-15)
    assert lam[9] == pytest.approx(LOG3, abs=1e-15)
    assert lam[8] == pytest.approx(0.6931472, abs=1e-7)
    assert lam[9] == pytest.approx(1.0986123, abs=1e-7)


def test_lambda_matches_trial_division(small_table):
    expected = np.array([lambda_trial(n) for n in range(small_table.n_max + 1)])
    assert np.max(np.abs(small_table.lam - expected)) <= 1e-12


def test_positive_exactly_on_prime_powers(small_table):
    lam = small_table.lam
    pos = set(np.flatnonzero(lam > 0).tolist())
    primes = arith.prime_sieve(small_table.n_max).tolist()
    powers = set()
    for p in primes:
        q = p
        while q <= small_table.n_max:
            powers.add(q)
            q *= p
    assert pos == powers


def test_psi_values(small_table):
    assert arith.psi(1.9, small_table) == 0.0
    assert arith.psi(2, small_table) == pytest.approx(0.6931472, abs=1e-7)
    direct = 3 * LOG2 + 2 * LOG3 + LOG5 + LOG7
    assert arith.psi(10, small_table) == pytest.approx(direct, abs=1e-13)
    assert arith.psi(10, small_table) == pytest.approx(7.8320141, abs=1e-6)


def test_psi_range_error(small_table):
    with pytest.raises(IndexError):
        arith.psi(small_table.n_max + 1, small_table)


def test_psi0(small_table):
    assert arith.psi0(10, small_table) == arith.psi(10, small_table)
    assert arith.psi0(8, small_table) == pytest.approx(3 * LOG2 + LOG3 + LOG5 + LOG7 - LOG2 / 2, abs=1e-13)
    assert arith.psi0(8, small_table) == pytest.approx(6.3868282, abs=1e-6)
    assert arith.psi0(2.5, small_table) == pytest.approx(0.6931472, abs=1e-7)


def test_psi_iterated_values(small_table):
    assert arith.psi_iterated(0, 10, small_table) == arith.psi(10, small_table)
    assert arith.psi_iterated(1, 5, small_table) == pytest.approx(4 * LOG2 + 2 * LOG3, abs=1e-13)
    assert arith.psi_iterated(1, 5, small_table) == pytest.approx(4.9698133, abs=1e-7)
    assert arith.psi_iterated(2, 3, small_table) == pytest.approx(LOG2 / 2, abs=1e-13)


def test_psi_iterated_rejects_overflow(small_table):
    with pytest.raises(OverflowError):
        arith.psi_iterated(21, 10, small_table)
    with pytest.raises(OverflowError):
        arith.psi_iterated(20, 1e40, small_table)


@pytest.mark.parametrize("j", [0, 1, 2, 3, 5])
@pytest.mark.parametrize("t", [7, 50, 997, 5000])
def test_psi_iterated_increment_is_integral_of_previous(j, t, small_table):
    # on [t-1, t) psi_j is a polynomial of degree j, so Gauss-Legendre with j+1 nodes is exact
    x, w = np.polynomial.legendre.leggauss(j + 2)
    u = t - 0.5 + 0.5 * x
    integral = 0.5 * math.fsum(w * np.array([arith.psi_iterated(j, ui, small_table) for ui in u]))
    inc = arith.psi_iterated(j + 1, t, small_table) - arith.psi_iterated(j + 1, t - 1, small_table)
    assert inc == pytest.approx(integral, rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0, max_value=10**5 - 1))
def test_psi_prefix_consistency(small_table, x):
    exact = math.fsum(small_table.lam[: math.floor(x) + 1])
    assert abs(arith.psi(x, small_table) - exact) <= 4 * np.spacing(max(exact, 1.0))


def test_prefix_increments(small_table):
    pre, lam = small_table.psi_prefix, small_table.lam
    assert np.all(np.diff(pre) >= 0)
    assert np.all(np.abs(np.diff(pre) - lam[1:]) <= 4 * np.spacing(pre[1:]))


def test_pnt_band(table):
    x = np.arange(10**5, table.n_max + 1)
    ratio = table.psi_prefix[x] / x
    assert ratio.min() >= 0.9 and ratio.max() <= 1.1


def test_tables_are_read_only(small_table):
    with pytest.raises(ValueError):
        small_table.lam[3] = 1.0


def test_sieve_rejects_tiny():
    with pytest.raises(ValueError):
        arith.sieve_lambda(1)


def test_binary_cache_roundtrip(tmp_path, small_table):
    path = tmp_path / "t.lmb"
    arith.save_table(small_table, path)
    raw = path.read_bytes()
    assert raw[:4] == b"LMB1"
    assert int.from_bytes(raw[4:12], "little") == small_table.n_max
    assert len(raw) == 12 + 8 * (small_table.n_max + 1)
    loaded = arith.load_table(path)
    assert np.array_equal(loaded.lam, small_table.lam)
    assert np.array_equal(loaded.psi_prefix, small_table.psi_prefix)


def test_cache_bad_magic(tmp_path):
    path = tmp_path / "bad.lmb"
    path.write_bytes(b"XXXX" + bytes(16))
    with pytest.raises(ValueError, match="magic"):
        arith.load_table(path)


def test_cached_table_reuses_larger(tmp_path):
    big = arith.cached_table(1000, tmp_path)
    assert (tmp_path / "lambda_1000.lmb").exists()
    again = arith.cached_table(500, tmp_path)
    assert again.n_max == 1000
    assert np.array_equal(again.lam, big.lam)


def test_singular_series():
    assert arith.singular_series(3) == 0.0
    s4 = arith.singular_series(4)
    assert s4 == pytest.approx(2 * 0.66016181584686957, abs=2e-8)
    assert s4 == pytest.approx(1.3203236, abs=1e-7)
    assert arith.singular_series(6) == pytest.approx(2 * s4, rel=1e-15)
    assert arith.singular_series(6) == pytest.approx(2.6406472, abs=1e-7)


@pytest.mark.parametrize("m", [1, 2, 3, 6])
@pytest.mark.parametrize("k", [4, 6, 30, 2 * 3 * 5 * 7 * 11])
def test_singular_series_ignores_powers_of_two(k, m):
    assert arith.singular_series(k * 2**m) == arith.singular_series(k)


def test_singular_series_cutoff_below_factor():
    with pytest.raises(ValueError):
        arith.singular_series(2 * 1009, prime_cutoff=1000)
