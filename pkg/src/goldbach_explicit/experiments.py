"""Theorem-level pipelines: sieve-side sums against truncated zero sums.

Each ``verify_*`` returns an ``ExperimentReport`` whose rows carry the
sieve-side sum (``lhs``), the smooth main term, the zero sum, their
discrepancy ``delta`` and ``normalized = |delta| / envelope``.  Envelopes use
natural logarithms throughout.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import goldbach
from .arith import LambdaTable
from .goldbach import RTable
from .quadrature import quad
from .zeros import ZeroTable, zero_sum_interval, zero_sum_k

FIXED_COLUMNS = ("lhs", "main_term", "zero_sum", "delta", "normalized", "tail_bound", "flagged")


@dataclass
class ReportRow:
    params: dict
    lhs: float
    main_term: float
    zero_sum: float
    delta: float
    normalized: float
    tail_bound: float = 0.0
    flagged: bool = False
    extra: dict = field(default_factory=dict)


@dataclass
class ExperimentReport:
    name: str
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def max_normalized(self) -> float:
        return max((r.normalized for r in self.rows), default=0.0)

    def failing_rows(self, gate: float):
        return [r for r in self.rows if r.flagged or not r.normalized <= gate]


def _zero_metadata(zt: ZeroTable | None, Z) -> dict:
    if zt is None:
        return {}
    return {"zero_table": zt.source_id, "zero_table_height": f"{zt.height:.6f}", "trunc_height": f"{Z}"}


def _zero_term(x, k, Z, zt, include_zeros: bool):
    """Zero sum and tail at x; an ablation (or Z below the first zero) gives zero and an infinite tail."""
    if include_zeros and Z >= zt.gammas[0]:
        s = zero_sum_k(x, k, Z, zt)
        return s.value, s.tail_bound
    return 0.0, math.inf


def verify_theorem1(N_list, table: LambdaTable, zt: ZeroTable, Z: float, *,
                    include_zeros: bool = True, tail_fraction: float = 0.1) -> ExperimentReport:
    """delta(N) = sum_{n<=N} R(n) - N^2/2 + 2 * sum_rho N^(rho+1)/(rho(rho+1)), scaled by N log^3 N."""
    report = ExperimentReport("theorem1", metadata=_zero_metadata(zt, Z))
    for N in N_list:
        N = int(N)
        lhs = goldbach.sum_R(N, table)
        zs, tail = _zero_term(N, 2, Z, zt, include_zeros)
        main = 0.5 * N * N
        delta = lhs - main + 2.0 * zs
        env = N * math.log(N) ** 3
        report.rows.append(ReportRow({"N": N}, lhs, main, zs, delta, abs(delta) / env,
                                     tail, 2.0 * tail > tail_fraction * env))
    return report


def verify_theorem2(N: int, y_samples, table: LambdaTable, r: RTable | None = None) -> ExperimentReport:
    """|sum_{n<=y} [R(n) - (2 psi(n) - n)] e^{-n/N}| / (N log^3 N) for each sampled y.

    Rows with y <= sqrt(N) also carry ``trivial_ratio``, the same sum over
    y^2 log log y.
    """
    N = int(N)
    if r is None:
        r = goldbach.r_table(N, 2, table)
    env = N * math.log(N) ** 3
    report = ExperimentReport("theorem2", metadata={"N": str(N)})
    for y in y_samples:
        y = int(y)
        n = np.arange(1, y + 1, dtype=np.float64)
        w = np.exp(-n / N)
        lhs = math.fsum(r.values[1 : y + 1] * w)
        main = math.fsum((2.0 * table.psi_prefix[1 : y + 1] - n) * w)
        delta = goldbach.weighted_discrepancy(y, N, r, table)
        extra = {}
        if 3 <= y <= math.isqrt(N):
            extra["trivial_ratio"] = abs(delta) / (y * y * math.log(math.log(y)))
        report.rows.append(ReportRow({"N": N, "y": y}, lhs, main, 0.0, delta, abs(delta) / env, extra=extra))
    return report


def log_spaced_ints(lo: int, hi: int, count: int) -> list[int]:
    return sorted({int(round(v)) for v in np.geomspace(lo, hi, count)})


def verify_theorem3(N_list, k: int, table: LambdaTable, zt: ZeroTable, Z: float, *,
                    include_zeros: bool = True, tail_fraction: float = 0.1) -> ExperimentReport:
    """delta(N) = sum R_k - N^k/k! + k * sum_rho N^(rho+k-1)/(rho...(rho+k-1)), scaled by N^(k-1) log^k N.

    k = 2 is passed through to ``verify_theorem1``.
    """
    if k == 2:
        return verify_theorem1(N_list, table, zt, Z, include_zeros=include_zeros, tail_fraction=tail_fraction)
    report = ExperimentReport(f"theorem3_k{k}", metadata=_zero_metadata(zt, Z))
    for N in N_list:
        N = int(N)
        lhs = goldbach.sum_Rk(N, k, table)
        zs, tail = _zero_term(N, k, Z, zt, include_zeros)
        main = N**k / math.factorial(k)
        delta = lhs - main + k * zs
        env = N ** (k - 1) * math.log(N) ** k
        report.rows.append(ReportRow({"N": N, "k": k}, lhs, main, zs, delta, abs(delta) / env,
                                     tail, k * tail > tail_fraction * env))
    return report


def verify_theorem4(N: int, H_list, table: LambdaTable, zt: ZeroTable, Z: float, *,
                    r: RTable | None = None, include_zeros: bool = True,
                    tail_fraction: float = 0.1) -> ExperimentReport:
    """delta(N, H) = sum_{N<=n<=N+H} R(n) - (HN + H^2/2) + 2 * (interval zero sum), scaled by N log^2 N log H."""
    N = int(N)
    H_list = [int(h) for h in H_list]
    if r is None:
        r = goldbach.r_table(N + max(H_list), 2, table)
    report = ExperimentReport("theorem4", metadata=_zero_metadata(zt, Z))
    for H in H_list:
        lhs = goldbach.short_interval_sum(N, H, r)
        if include_zeros and Z >= zt.gammas[0]:
            s = zero_sum_interval(N, H, Z, zt)
            zs, tail = s.value, s.tail_bound
        else:
            zs, tail = 0.0, math.inf
        main = H * N + 0.5 * H * H
        delta = lhs - main + 2.0 * zs
        env = N * math.log(N) ** 2 * math.log(H)
        report.rows.append(ReportRow({"N": N, "H": H}, lhs, main, zs, delta, abs(delta) / env,
                                     tail, 2.0 * tail > tail_fraction * env))
    return report


def partial_summation_recover(N: int, table: LambdaTable, r: RTable) -> tuple[float, float]:
    """Recover sum_{n<=N} a_n from the weighted prefix W(y) = sum_{n<=y} a_n e^{-n/N}.

    a_n = R(n) - (2 psi(n) - n).  Uses
    sum a_n = e W(N) - (1/N) int_0^N W(y) e^{y/N} dy
    with the integral done by quadrature on unit panels (W is a step
    function).  Returns ``(recovered, direct)``.
    """
    n = np.arange(1, N + 1, dtype=np.float64)
    a = r.values[1 : N + 1] - (2.0 * table.psi_prefix[1 : N + 1] - n)
    W = np.concatenate([[0.0], np.cumsum(a * np.exp(-n / N))])

    def integrand(yv):
        return W[np.minimum(np.floor(yv).astype(np.int64), N)] * np.exp(yv / N)

    integral = quad(integrand, 0.0, float(N), np.arange(N + 1, dtype=np.float64), rtol=1e-12).value
    recovered = math.e * W[N] - integral / N
    return recovered, math.fsum(a)


def hardy_littlewood_mean(start: int, length: int, table: LambdaTable, r: RTable | None = None,
                          prime_cutoff: int = 10**6) -> float:
    """Mean of R(n) / (n S(n)) over even n in [start, start + length]."""
    from .arith import singular_series

    if r is None:
        r = goldbach.r_table(start + length, 2, table)
    evens = [n for n in range(start, start + length + 1) if n % 2 == 0]
    ratios = [r.values[n] / (n * singular_series(n, prime_cutoff)) for n in evens]
    return math.fsum(ratios) / len(ratios)


# ------------------------------------------------------------------------ CSV

def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".12g")


def report_columns(report: ExperimentReport) -> list[str]:
    params, extras = [], []
    for row in report.rows:
        params += [k for k in row.params if k not in params]
        extras += [k for k in row.extra if k not in extras]
    return params + list(FIXED_COLUMNS) + extras


def format_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    buf.write(f"# report = {report.name}\n")
    for key, value in report.metadata.items():
        buf.write(f"# {key} = {value}\n")
    cols = report_columns(report)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in report.rows:
        fixed = {c: getattr(row, c) for c in FIXED_COLUMNS}
        merged = {**row.params, **fixed, **row.extra}
        w.writerow([_fmt(merged[c]) if c in merged else "" for c in cols])
    return buf.getvalue()


def emit_csv(report: ExperimentReport, path) -> None:
    """Write UTF-8 CSV: '#' metadata lines, a header, one line per row (12 significant digits)."""
    path = Path(path)
    try:
        path.write_text(format_csv(report), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def read_csv(path) -> ExperimentReport:
    """Inverse of ``emit_csv``; parameters listed before ``lhs`` become ``params``."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    meta, body = {}, []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            meta[key.strip()] = value.strip()
        else:
            body.append(line)
    name = meta.pop("report", "")
    report = ExperimentReport(name, metadata=meta)
    if not body:
        return report
    reader = csv.reader(body)
    cols = next(reader)
    first = cols.index(FIXED_COLUMNS[0])
    last = cols.index(FIXED_COLUMNS[-1])
    for rec in reader:
        vals = dict(zip(cols, rec))

        def num(s):
            return int(s) if s.lstrip("-").isdigit() else float(s)

        params = {c: num(vals[c]) for c in cols[:first] if vals[c] != ""}
        extra = {c: float(vals[c]) for c in cols[last + 1 :] if vals[c] != ""}
        report.rows.append(ReportRow(
            params, *(float(vals[c]) for c in FIXED_COLUMNS[:-1]),
            flagged=vals["flagged"] == "1", extra=extra))
    return report
