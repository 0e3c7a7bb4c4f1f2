"""Command-line entry point: ``boolpred {cost,table1,bounds,sweep,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import boolfn, bounds, exact, optdp
from .numerics import LN2, as_fraction, binent, bindiv

SCHEMA = 1
CSV_HEADER = "# boolpred v1"
EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3

MAX_TABLE1_ARITY = 11
MAX_EXACT_DENSE_ARITY = 14


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


# --- formatting ---------------------------------------------------------------

def fmt_num(x):
    """JSON-ready value: Fractions as 'p/q' strings, floats at 12 significant digits."""
    if x is None:
        return None
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if not math.isfinite(x):
        return str(x)
    return float(f"{x:.12g}")


def fmt_cell(x) -> str:
    v = fmt_num(x)
    return "" if v is None else str(v)


def emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def to_json(obj) -> str:
    return json.dumps({"schema": SCHEMA, **obj}, indent=2) + "\n"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# --- argument parsing helpers ---------------------------------------------------

def parse_alpha(text: str, exact_mode: bool):
    try:
        value = as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse alpha {text!r}") from None
    if not 0 <= value <= Fraction(1, 2):
        raise DomainError(f"alpha must lie in [0, 1/2], got {text}")
    return value if exact_mode else float(value)


def parse_grid(text: str) -> list:
    """'lo:hi:count' (inclusive, evenly spaced) or a comma-separated list."""
    try:
        if ":" in text:
            lo, hi, count = text.split(":")
            return [float(v) for v in np.linspace(float(lo), float(hi), int(count))]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse alpha grid {text!r}") from None


def build_function(spec: str, n, tie_rule: str = "ones"):
    """Resolve ``--fn`` grammar: dictator[:i] | majority | maj_q:<q> | parity | constant0 | constant1."""
    if n is None:
        raise UsageError("--n is required with --fn")
    name, _, arg = spec.partition(":")
    try:
        if name == "dictator":
            return boolfn.dictator(n, int(arg) if arg else 1)
        if name == "majority" and not arg:
            return boolfn.majority(n, tie_rule)
        if name == "maj_q" and arg:
            return boolfn.maj_q(n, as_fraction(arg))
        if name == "parity" and not arg:
            return boolfn.parity(n)
        if name in ("constant0", "constant1") and not arg:
            return boolfn.SymmetricProfile(n, (int(name[-1]),) * (n + 1))
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    raise UsageError(f"unknown function spec {spec!r}")


def load_function(args):
    if args.fn_file:
        try:
            with open(args.fn_file) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.fn_file}: {exc}") from None
        try:
            f = boolfn.parse_function(text)
        except ValueError as exc:
            raise UsageError(f"{args.fn_file}: {exc}") from None
        if args.n is not None and args.n != f.n:
            raise UsageError(f"--n {args.n} disagrees with file arity {f.n}")
        return f
    if not args.fn:
        raise UsageError("one of --fn or --fn-file is required")
    return build_function(args.fn, args.n, args.tie_rule)


def thread_cap() -> int:
    raw = os.environ.get("BOOLPRED_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"BOOLPRED_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise DomainError(f"BOOLPRED_THREADS must be a positive integer, got {raw!r}")
    return value


# --- commands -------------------------------------------------------------------

def cmd_cost(args) -> int:
    f = load_function(args)
    exact_mode = args.mode == "exact"
    alpha = parse_alpha(args.alpha, exact_mode)
    loss = exact.loss_kind(args.loss)
    if exact_mode and loss != exact.QUADRATIC:
        raise DomainError("exact mode needs the quadratic loss (log-loss costs are irrational)")

    if isinstance(f, boolfn.TruthTable):
        prof = boolfn.detect_symmetric(f)
        f = prof if prof is not None else f
    if isinstance(f, boolfn.SymmetricProfile):
        path = "symmetric"
        report = exact.seq_cost_symmetric(f, alpha, loss, exact=exact_mode)
    elif exact_mode and alpha == 0:
        path = "noiseless"
        report = exact.seq_cost_noiseless(f, loss)
    elif exact_mode:
        if f.n > MAX_EXACT_DENSE_ARITY:
            raise DomainError(f"exact dense engine with alpha > 0 supports n <= {MAX_EXACT_DENSE_ARITY}")
        path = "dense"
        report = exact.seq_cost(f, alpha, loss, exact=True)
    else:
        path = "dense"
        report = exact.seq_cost(f, alpha, loss)

    label = args.fn or args.fn_file
    if args.format == "json":
        emit(to_json({
            "command": "cost", "function": label, "n": report.n, "alpha": fmt_num(alpha),
            "loss": loss, "mode": report.mode, "engine": path,
            "per_step": [fmt_num(c) for c in report.per_step],
            "total": fmt_num(report.total),
            "total_float": fmt_num(float(report.total)),
            "by_value": [fmt_num(c) for c in report.by_value],
            "prob_one": fmt_num(report.prob_one),
        }), args.out)
    else:
        rows = [[k, fmt_cell(c)] for k, c in enumerate(report.per_step, 1)]
        rows.append(["total", fmt_cell(report.total)])
        emit(to_csv(["step", "cost"], rows), args.out)
    return EXIT_OK


def table1_rows(n_max: int) -> list:
    """(n, majority SMSE, optimum, excess, lower bound) as exact values for odd n."""
    if n_max < 3 or n_max > MAX_TABLE1_ARITY:
        raise DomainError(f"n_max must lie in [3, {MAX_TABLE1_ARITY}]")
    table = optdp.dp_optimal(n_max)
    rows = []
    for n in range(3, n_max + 1, 2):
        maj = exact.seq_cost_noiseless(boolfn.majority(n).expand()).total
        _, best = table.optimum(n)
        rows.append((n, maj, best, maj - best, bounds.noiseless_lb(n)))
    return rows


def cmd_table1(args) -> int:
    rows = table1_rows(args.n_max)
    header = ["n", "smse_majority", "smse_optimal", "excess", "lower_bound_eq3"]
    if args.format == "json":
        emit(to_json({"command": "table1", "rows": [
            dict(zip(header, [n] + [f"{float(x):.4f}" for x in vals]), exact={
                "smse_majority": str(vals[0]), "smse_optimal": str(vals[1]), "excess": str(vals[2])})
            for n, *vals in rows]}), args.out)
    else:
        emit(to_csv(header, [[n] + [f"{float(x):.4f}" for x in vals] for n, *vals in rows]), args.out)
    return EXIT_OK


def dictator_cost(n: int, alpha: float) -> float:
    """Dictator SMSE from the dense engine on one coordinate plus n-1 free bits.

    Given x_1 the remaining outputs are i.i.d. uniform, each costing 1/4.
    """
    return exact.seq_cost(boolfn.dictator(1, 1), alpha).total + (n - 1) / 4.0


def sweep_row(n: int, alpha: float, tie_rule: str) -> dict:
    bs = bounds.bound_set(n, alpha)
    row = bs.as_dict()
    flags = row.pop("asymptotic_flags")
    row["maj_exact"] = exact.seq_cost_symmetric(boolfn.majority(n, tie_rule), alpha).total
    row["dic_exact"] = dictator_cost(n, alpha)
    row["asymptotic"] = ";".join(k for k, v in flags.items() if v)
    return row


def _emit_rows(command: str, rows: list, args):
    if args.format == "json":
        out = []
        for r in rows:
            r = dict(r)
            r["asymptotic"] = r["asymptotic"].split(";") if r["asymptotic"] else []
            out.append({k: (v if k == "asymptotic" else fmt_num(v)) for k, v in r.items()})
        emit(to_json({"command": command, "rows": out}), args.out)
    else:
        header = list(rows[0].keys())
        emit(to_csv(header, [[r[h] if h == "asymptotic" else fmt_cell(r[h]) for h in header]
                             for r in rows]), args.out)


def cmd_bounds(args) -> int:
    if args.n < 1:
        raise DomainError("n must be positive")
    alpha = parse_alpha(args.alpha, False)
    _emit_rows("bounds", [sweep_row(args.n, alpha, args.tie_rule)], args)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.n < 1:
        raise DomainError("n must be positive")
    grid = parse_grid(args.alphas)
    if not grid:
        raise UsageError("empty alpha grid")
    alphas = [parse_alpha(repr(a), False) for a in grid]
    with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
        rows = list(pool.map(lambda a: sweep_row(args.n, a, args.tie_rule), alphas))
    _emit_rows("sweep", rows, args)
    return EXIT_OK


def verify_report(n: int, alpha) -> list:
    """Run the exhaustive checks; returns (name, passed, detail) triples."""
    if not 1 <= n <= optdp.MAX_BRUTE_ARITY:
        raise DomainError(f"verify supports 1 <= n <= {optdp.MAX_BRUTE_ARITY}")
    alpha = exact.check_alpha(alpha, exact=True)
    a = float(alpha)
    results = []
    bits = optdp.all_truth_tables(n)

    noiseless = optdp.noiseless_costs_exact(bits)
    bf_min = min(noiseless)
    dp_min = optdp.dp_optimal(n).optimum()[1]
    results.append(("dp_vs_bruteforce", bf_min == dp_min, f"min={bf_min} dp={dp_min}"))

    lb3 = bounds.noiseless_lb(n)
    bad3 = sum(1 for c in noiseless if float(c) < lb3)
    results.append(("noiseless_lb_all_functions", bad3 == 0, f"{len(noiseless)} functions, {bad3} violations"))

    noisy = exact.seq_cost_batch(bits, a).sum(axis=1)
    lb6 = bounds.noisy_lb(n, a)
    bad6 = int((noisy < lb6 - 1e-12).sum())
    results.append(("noisy_lb_all_functions", bad6 == 0,
                    f"alpha={fmt_num(a)} min={fmt_num(noisy.min())} bound={fmt_num(lb6)} violations={bad6}"))

    mi = n - exact.seq_cost_batch(bits, a, "log").sum(axis=1)
    cap = 1.0 - binent(a)
    bad_mi = int((mi > cap + 1e-12).sum())
    best_f, best_mi = optdp.brute_force(n, "max_mi", alpha)
    results.append(("mi_cap_scan", bad_mi == 0,
                    f"max_mi={fmt_num(best_mi)} cap={fmt_num(cap)} argmax={boolfn.to_hex(best_f)} violations={bad_mi}"))

    balanced = [c for c, row in zip(noiseless, bits) if 2 * int(row.sum()) == 1 << n]
    top = max(balanced)
    dic = optdp.noiseless_costs_exact(np.stack([boolfn.dictator(n, i).bits for i in range(1, n + 1)]))
    ok = top == Fraction(n - 1, 4) and all(c == top for c in dic)
    results.append(("dictator_max_balanced", ok, f"max={top} dictators={[str(c) for c in dic]}"))

    grid_a = np.linspace(0.0, 1.0, 100)
    grid_b = np.linspace(0.0, 1.0, 100)[1:-1]
    worst = min(bindiv(x, y) - 4.0 / (2.0 * LN2) * (x - y) ** 2 for x in grid_a for y in grid_b)
    results.append(("pinsker_grid", worst >= -1e-12, f"min slack={fmt_num(worst)}"))
    return [(name, bool(ok), detail) for name, ok, detail in results]


def cmd_verify(args) -> int:
    results = verify_report(args.n, parse_alpha(args.alpha, True))
    passed = all(ok for _, ok, _ in results)
    if args.format == "json":
        emit(to_json({"command": "verify", "n": args.n, "alpha": args.alpha, "passed": passed,
                      "checks": [{"name": k, "passed": ok, "detail": d} for k, ok, d in results]}),
             args.out)
    else:
        lines = [f"{'PASS' if ok else 'FAIL'} {name}: {detail}" for name, ok, detail in results]
        lines.append("PASS" if passed else "FAIL")
        emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if passed else EXIT_VERIFY


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="boolpred", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_default, formats=("csv", "json")):
        p.add_argument("--format", choices=formats, default=fmt_default)
        p.add_argument("--out", help="write to this path instead of stdout")
        p.add_argument("--tie-rule", choices=("ones", "zeros"), default="ones",
                       help="value of even-n majority on weight n/2")

    p = sub.add_parser("cost", help="sequential prediction cost of one function")
    p.add_argument("--fn", help="dictator[:i] | majority | maj_q:<q> | parity | constant0 | constant1")
    p.add_argument("--fn-file", help="JSON truth table or symmetric profile")
    p.add_argument("--n", type=int)
    p.add_argument("--alpha", default="0")
    p.add_argument("--loss", choices=("quad", "quadratic", "log", "logarithmic"), default="quad")
    p.add_argument("--mode", choices=("exact", "float"), default="float")
    common(p, "json")
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("table1", help="majority vs optimal noiseless SMSE for odd n")
    p.add_argument("--n-max", type=int, default=11)
    common(p, "csv")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("bounds", help="all bounds at one (n, alpha)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", required=True)
    common(p, "csv")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep", help="bounds and exact costs over an alpha grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alphas", default="0:0.5:11", help="lo:hi:count or a comma list")
    common(p, "csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="exhaustive oracle checks for n <= 4")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", default="0")
    common(p, "text", ("text", "json"))
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"boolpred: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ValueError) as exc:
        print(f"boolpred: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
