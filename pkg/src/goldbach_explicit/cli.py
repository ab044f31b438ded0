"""Command-line entry point.

Exit status: 0 success with all gates passing, 2 a gate failed (failing
rows go to stderr), 1 usage or I/O error.  Results go to stdout, progress
to stderr.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from contextlib import nullcontext

import scipy.fft

from . import arith, circle, experiments, goldbach, zeros
from .constants import load_constants

EXIT_OK, EXIT_ERROR, EXIT_GATE = 0, 1, 2


class GateFailure(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(t)) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _table(args, n_max: int) -> arith.LambdaTable:
    cache = os.environ.get("GOLDBACH_CACHE") or args.cache
    _progress(f"sieving Lambda up to {n_max}" + (f" (cache {cache})" if cache else ""))
    return arith.cached_table(max(int(n_max), 2), cache)


def _zeros(args) -> zeros.ZeroTable:
    if not args.zeros:
        raise OSError("a zeros file is required (--zeros PATH, or builtin:100k)")
    zt = zeros.load_zeros(args.zeros)
    if args.height is not None and args.height > zt.height:
        raise ValueError(f"--height {args.height} exceeds zero-table height {zt.height}")
    c0 = zeros.fit_log_constant(arith.sieve_lambda(1001), zt)
    _progress(f"zero table {zt.source_id}: {zt.gammas.size} ordinates to height {zt.height:.6f}; "
              f"fitted constant {c0:.7f} (log 2pi = {zeros.LOG_2PI:.7f})")
    if abs(c0 - zeros.LOG_2PI) > 1e-3:
        _progress("warning: fitted constant departs from log 2pi by more than 1e-3; "
                  "the zero table may be too short or corrupt")
    return zt


def _height(args, zt) -> float:
    return zt.height if args.height is None else args.height


def _gate(ok: bool, message: str) -> None:
    if not ok:
        raise GateFailure(message)


def _print_report(report, args, gate: float, extra_gates=None) -> None:
    """Write the CSV; ``extra_gates`` maps an extra column to its upper limit."""
    text = experiments.format_csv(report)
    if args.out:
        experiments.emit_csv(report, args.out)
        _progress(f"wrote {args.out}")
    sys.stdout.write(text)
    bad = report.failing_rows(gate)
    for key, limit in (extra_gates or {}).items():
        bad += [r for r in report.rows if r not in bad and not r.extra.get(key, 0.0) <= limit]
    if bad:
        lines = "\n".join(f"  {r.params} normalized={r.normalized:.6g} flagged={r.flagged}" for r in bad)
        raise GateFailure(f"{report.name}: {len(bad)} row(s) exceed gate {gate:g} or are flagged:\n{lines}")


# ------------------------------------------------------------------ commands

def cmd_sieve(args, const):
    table = _table(args, args.n_max)
    print(f"n_max = {table.n_max}")
    print(f"psi(n_max) = {table.psi_prefix[-1]:.12g}")


def cmd_rsum(args, const):
    table = _table(args, args.n)
    value = goldbach.sum_Rk(args.n, args.k, table)
    print(f"{value:.10g}")


def cmd_zerosum(args, const):
    zt = _zeros(args)
    s = zeros.zero_sum_k(args.x, args.k, _height(args, zt), zt)
    print(f"value = {s.value:.12g}")
    print(f"tail_bound = {s.tail_bound:.6g}")
    print(f"trunc_height = {s.trunc_height:.6f}")


def cmd_verify(args, const):
    # theorem 2 has no zero sum
    zt = None if args.theorem == "thm2" else _zeros(args)
    Z = None if zt is None else _height(args, zt)
    frac = const["tail_flag_fraction"]
    extra_gates = None
    if args.theorem == "thm1":
        table = _table(args, max(args.n_list))
        rep = experiments.verify_theorem1(args.n_list, table, zt, Z, include_zeros=not args.no_zeros,
                                          tail_fraction=frac)
        gate = const["thm1_normalized_max"]
    elif args.theorem == "thm2":
        N = max(args.n_list)
        table = _table(args, N)
        ys = experiments.log_spaced_ints(2, N, args.y_count)
        rep = experiments.verify_theorem2(N, ys, table)
        gate = const["thm2_normalized_max"]
        extra_gates = {"trivial_ratio": const["thm2_trivial_envelope_max"]}
    elif args.theorem == "thm3":
        table = _table(args, max(args.n_list))
        rep = experiments.verify_theorem3(args.n_list, args.k, table, zt, Z, include_zeros=not args.no_zeros,
                                          tail_fraction=frac)
        gate = const["thm1_normalized_max" if args.k == 2 else "thm3_normalized_max"]
    else:
        if not args.h_list:
            raise ValueError("verify thm4 needs --h-list")
        N = args.n_list[0]
        table = _table(args, N + max(args.h_list))
        rep = experiments.verify_theorem4(N, args.h_list, table, zt, Z, include_zeros=not args.no_zeros,
                                          tail_fraction=frac)
        gate = const["thm4_normalized_max"]
    rep.metadata["constants_sha256"] = args.constants_hash
    _print_report(rep, args, gate, extra_gates)


def cmd_lemma(args, const):
    N = args.N
    name = args.lemma
    if name == "residue":
        ns = [args.n] if args.n else [1, 10, 100, N // 2, N]
        for n in ns:
            c = circle.residue_check(n, N)
            print(f"n={n} quad={c.value:.12g} target={c.target:.12g} gap={c.gap:.6g}")
            _gate(c.converged and c.gap <= const["residue_gap_max"], f"residue gap {c.gap:.6g} at n={n}")
    elif name == "meansq":
        table = _table(args, circle.DEFAULT_CONFIG.trunc_len(N))
        c = circle.mean_square_check(N, table)
        bound = const["meansq_gap_factor"] * N * math.sqrt(math.log(N))
        print(f"quad={c.value:.12g} target={c.target:.12g} gap={c.gap:.6g} bound={bound:.6g}")
        _gate(c.converged and c.gap <= bound, "mean-square gap exceeds bound")
    elif name == "lp":
        table = _table(args, circle.DEFAULT_CONFIG.trunc_len(N))
        xis = [1 / N, 10 / N, 1e-2, 1e-1, 0.5]
        rows = circle.lp_l2_profile(N, xis, table)
        for xi, val, ratio in rows:
            print(f"xi={xi:.6g} integral={val:.12g} ratio={ratio:.6g}")
        _gate(all(r[2] <= const["lp_ratio_max"] for r in rows), "local mean-square ratio exceeds gate")
    elif name == "i2":
        y = args.y or N
        table = _table(args, max(y, 2))
        lhs, rhs, gap = circle.i2_identity_check(y, N, table)
        print(f"lhs={lhs:.12g} rhs={rhs:.12g} gap={gap:.3g}")
        _gate(gap <= const["i2_identity_rtol"] * (1 + abs(rhs)), "I2 identity gap exceeds tolerance")
    elif name == "i3":
        y = args.y or N
        table = _table(args, circle.DEFAULT_CONFIG.trunc_len(N))
        total, profile = circle.i3_decomposition(y, N, table)
        for s in profile:
            print(f"[{s.lo:.6g}, {s.hi:.6g}] contribution={s.contribution:.6g} majorant={s.majorant:.6g}")
        ratio = total / (N * math.log(N) ** 2 * math.log(y))
        print(f"total={total:.12g} ratio={ratio:.6g}")
        _gate(ratio <= const["i3_ratio_max"], "I3 ratio exceeds gate")
    elif name == "pointwise":
        table = _table(args, circle.DEFAULT_CONFIG.trunc_len(N))
        worst, _ = circle.pointwise_bound_check(N, circle.default_alpha_grid(N), table)
        print(f"max_ratio={worst:.6g}")
        _gate(worst <= const["pointwise_ratio_max"], "pointwise ratio exceeds gate")
    elif name == "sumint":
        zt = _zeros(args)
        table = _table(args, N)
        lhs, rhs, gap = zeros.check_sum_integral(N, _height(args, zt), table, zt)
        print(f"lhs={lhs:.12g} rhs={rhs:.12g} normalized_gap={gap:.6g}")
        _gate(gap <= const["sumint_gap_max"], "normalized gap exceeds gate")


def cmd_remark(args, const):
    res = circle.remark_counterexample(args.N, args.y)
    print(f"integral={res.integral:.12g} ratio={res.ratio:.6g} "
          f"full_mean_square={res.full_mean_square:.12g} local_bound_holds={res.local_bound_holds}")


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache", help="directory for cached Lambda tables (GOLDBACH_CACHE overrides)")
    common.add_argument("--threads", type=int, help="cap on FFT worker threads")
    common.add_argument("--constants", help="constants file (default: shipped gates)")

    zeros_opts = argparse.ArgumentParser(add_help=False)
    zeros_opts.add_argument("--zeros", help="zero ordinates file, or builtin:100 / builtin:100k")
    zeros_opts.add_argument("--height", type=float, help="truncation height Z (default: table height)")

    p = argparse.ArgumentParser(prog="goldbach-explicit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sieve", parents=[common], help="build and cache the Lambda table")
    s.add_argument("--n-max", type=int, required=True)
    s.set_defaults(func=cmd_sieve)

    s = sub.add_parser("rsum", parents=[common], help="print sum_{n<=N} R_k(n)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, default=2)
    s.set_defaults(func=cmd_rsum)

    s = sub.add_parser("zerosum", parents=[common, zeros_opts], help="truncated zero sum at x")
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--k", type=int, default=2)
    s.set_defaults(func=cmd_zerosum)

    s = sub.add_parser("verify", parents=[common, zeros_opts], help="theorem-level pipelines")
    s.add_argument("theorem", choices=["thm1", "thm2", "thm3", "thm4"])
    s.add_argument("--n-list", type=_int_list, required=True)
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--h-list", type=_int_list)
    s.add_argument("--y-count", type=int, default=32)
    s.add_argument("--no-zeros", action="store_true", help="ablation: drop the zero sum")
    s.add_argument("--out", help="CSV output path")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("lemma", parents=[common, zeros_opts], help="circle-method and explicit-formula lemmas")
    s.add_argument("lemma", choices=["residue", "meansq", "lp", "i2", "i3", "pointwise", "sumint"])
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--y", type=int)
    s.add_argument("--n", type=int)
    s.set_defaults(func=cmd_lemma)

    s = sub.add_parser("remark", parents=[common], help="closed-form optimality example")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--y", type=float, required=True)
    s.set_defaults(func=cmd_remark)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        const, args.constants_hash = load_constants(args.constants)
        workers = scipy.fft.set_workers(args.threads) if args.threads else nullcontext()
        with workers:
            args.func(args, const)
    except GateFailure as exc:
        print(f"GATE FAILED: {exc}", file=sys.stderr)
        return EXIT_GATE
    except (OSError, ValueError, IndexError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
