"""Noiseless-SMSE-optimal Boolean functions under a weight constraint.

C(m, w) is the least noiseless SMSE over functions of arity m with exactly w
ones.  Splitting on x_1 into cofactors of weights (w0, w1),

    C(m, w) = min_{w0 + w1 = w} first_bit_cost(m, w0, w1) + (C(m-1, w0) + C(m-1, w1)) / 2

because, given X_1, the remaining prediction problem is the one posed by
the cofactor on uniform inputs.  The recursion only holds at alpha = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .boolfn import TruthTable, from_encoding
from .exact import check_alpha, loss_kind, seq_cost_batch
from .numerics import binent

MAX_DP_ARITY = 11
MAX_BRUTE_ARITY = 4

# float screening window before the exact comparison; float error is ~1e-15
_SCREEN = 1e-9


def first_bit_cost(n: int, w0: int, w1: int) -> Fraction:
    """M(X_1 | b(X^n)) for any b whose x_1-cofactors have weights (w0, w1)."""
    half = 1 << (n - 1)
    if not (0 <= w0 <= half and 0 <= w1 <= half):
        raise ValueError(f"cofactor weights must lie in [0, {half}], got ({w0}, {w1})")
    size, w = 2 * half, w0 + w1
    cost = Fraction(0)
    if w > 0:
        cost += Fraction(w0 * w1, size * w)
    if w < size:
        cost += Fraction((half - w0) * (half - w1), size * (size - w))
    return cost


def _first_bit_cost_float(m: int, w0: np.ndarray, w1: np.ndarray) -> np.ndarray:
    half = 1 << (m - 1)
    size, w = 2 * half, w0 + w1
    ones = np.where(w > 0, w0 * w1 / (size * np.maximum(w, 1)), 0.0)
    zeros = np.where(w < size, (half - w0) * (half - w1) / (size * np.maximum(size - w, 1)), 0.0)
    return ones + zeros


@dataclass(frozen=True)
class DpTable:
    """``cost[m][w]`` = C(m, w); ``split[m][w]`` = the chosen (w0, w1)."""

    n: int
    cost: tuple
    split: tuple

    def optimum(self, m: int = None):
        """(w, C(m, w)) minimising over w; ties go to the smallest w."""
        m = self.n if m is None else m
        row = self.cost[m]
        best = min(range(len(row)), key=lambda w: (row[w], w))
        return best, row[best]


def dp_optimal(n: int) -> DpTable:
    """Fill C(m, w) for m = 1..n in exact rationals.

    Each cell screens all splits in floating point and then compares the
    near-minimal candidates exactly; ties go to the smaller w0.
    """
    if not 1 <= n <= MAX_DP_ARITY:
        raise ValueError(f"dp_optimal supports 1 <= n <= {MAX_DP_ARITY}, got {n}")
    cost = [None, (Fraction(1, 4), Fraction(0), Fraction(1, 4))]
    split = [None, ((0, 0), (0, 1), (1, 1))]
    for m in range(2, n + 1):
        half = 1 << (m - 1)
        prev = cost[m - 1]
        prev_f = np.array([float(c) for c in prev])
        row, choice = [], []
        for w in range(2 * half + 1):
            w0 = np.arange(max(0, w - half), min(w, half) + 1)
            w1 = w - w0
            approx = _first_bit_cost_float(m, w0, w1) + 0.5 * (prev_f[w0] + prev_f[w1])
            cands = w0[approx <= approx.min() + _SCREEN].tolist()
            best = None
            for a in cands:
                c = first_bit_cost(m, a, w - a) + (prev[a] + prev[w - a]) / 2
                if best is None or c < best[0]:
                    best = (c, a)
            row.append(best[0])
            choice.append((best[1], w - best[1]))
        cost.append(tuple(row))
        split.append(tuple(choice))
    return DpTable(n, tuple(cost), tuple(split))


def reconstruct(table: DpTable, w: int, m: int = None) -> TruthTable:
    """A weight-w function of arity m (default ``table.n``) achieving C(m, w)."""
    m = table.n if m is None else m
    if not 0 <= w <= 1 << m:
        raise ValueError(f"weight must lie in [0, {1 << m}], got {w}")
    return TruthTable(m, _expand(table, m, w))


def _expand(table: DpTable, m: int, w: int) -> np.ndarray:
    if m == 1:
        return np.array([0, 1] if w == 1 else [w // 2, w // 2], dtype=np.uint8)
    w0, w1 = table.split[m][w]
    return np.concatenate([_expand(table, m - 1, w0), _expand(table, m - 1, w1)])


# --- exhaustive oracle --------------------------------------------------------

def all_truth_tables(n: int) -> np.ndarray:
    """Every function of arity n as rows of bits, row index = integer encoding."""
    if not 1 <= n <= MAX_BRUTE_ARITY:
        raise ValueError(f"exhaustive enumeration supports n <= {MAX_BRUTE_ARITY}, got {n}")
    codes = np.arange(1 << (1 << n), dtype=np.int64)
    return ((codes[:, None] >> np.arange(1 << n)) & 1).astype(np.uint8)


def noiseless_costs_exact(bits: np.ndarray) -> list:
    """Exact noiseless SMSE for each row of ``bits`` (shape (F, 2**n)).

    Works with integer arithmetic over the common denominator
    2**n * lcm(1..2**n): with N(x^k) the completion count of a prefix in the
    preimage of v, the cost is 2**-n * sum over v, k, prefixes of N0*N1/N.
    """
    bits = np.asarray(bits, dtype=np.int64)
    size = bits.shape[-1]
    n = size.bit_length() - 1
    lcm = reduce(math.lcm, range(1, size + 1), 1)
    if n > MAX_BRUTE_ARITY:
        raise ValueError("integer oracle is limited to n <= 4")
    scale = np.array([lcm // d if d else 0 for d in range(size + 1)], dtype=np.int64)
    acc = np.zeros(bits.shape[0], dtype=np.int64)
    for v in (0, 1):
        level = (bits == v).astype(np.int64)
        for _ in range(n):
            n0, n1 = level[:, 0::2], level[:, 1::2]
            level = n0 + n1
            acc += (n0 * n1 * scale[level]).sum(axis=1)
    denom = size * lcm
    return [Fraction(int(a), denom) for a in acc]


OBJECTIVES = ("min_smse", "max_smse", "max_mi")


def _objective_values(n: int, objective: str, alpha, weight=None):
    bits = all_truth_tables(n)
    codes = np.arange(bits.shape[0])
    if weight is not None:
        keep = bits.sum(axis=1) == weight
        bits, codes = bits[keep], codes[keep]
    if objective in ("min_smse", "max_smse"):
        if alpha == 0:
            values = noiseless_costs_exact(bits)
        else:
            values = seq_cost_batch(bits, float(alpha)).sum(axis=1).tolist()
    elif objective == "max_mi":
        values = (n - seq_cost_batch(bits, float(alpha), loss_kind("log")).sum(axis=1)).tolist()
    else:
        raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    return codes.tolist(), values


def brute_force(n: int, objective: str = "min_smse", alpha=0, weight: int = None):
    """Exhaustive optimum over all 2**(2**n) functions (or those of a given weight).

    Returns ``(table, value)``; ties go to the smallest integer encoding.
    Values are exact at alpha = 0 for the SMSE objectives, floats otherwise.
    """
    alpha = check_alpha(alpha, exact=True)
    codes, values = _objective_values(n, objective, alpha, weight)
    if not codes:
        raise ValueError(f"no function of arity {n} has weight {weight}")
    sign = 1 if objective == "min_smse" else -1
    if isinstance(values[0], float):
        # float objectives: values equal to 12 significant digits count as ties
        ranked = [float(f"{sign * v:.12g}") for v in values]
    else:
        ranked = [sign * v for v in values]
    best = min(range(len(codes)), key=lambda i: (ranked[i], codes[i]))
    return from_encoding(n, codes[best]), values[best]


def brute_force_optimal_set(n: int, objective: str = "min_smse", alpha=0, weight: int = None,
                            tol: float = 0.0) -> list:
    """Every function attaining the optimum (within ``tol`` for float objectives)."""
    alpha = check_alpha(alpha, exact=True)
    codes, values = _objective_values(n, objective, alpha, weight)
    best = min(values) if objective == "min_smse" else max(values)
    return [from_encoding(n, c) for c, v in zip(codes, values) if abs(v - best) <= tol]


def dictator_mi(alpha: float) -> float:
    return 1.0 - binent(float(alpha))
