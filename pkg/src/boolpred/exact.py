"""Sequential prediction cost of BSC outputs given a one-bit quantizer.

Three engines share one value contract:

* the dense engine works on explicit truth tables, pushing the conditional
  input law through the channel one coordinate at a time and reading the
  predictor Q_k off the level-k prefix marginals;
* the noiseless engine counts preimage completions per prefix and returns
  exact rationals;
* the symmetric engine collapses the state space to Hamming weights and
  handles permutation-invariant functions of large arity.

Costs are in bits for the logarithmic loss.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .boolfn import SymmetricProfile, TruthTable, as_truth_table
from .numerics import as_fraction, binom_pmf_half, fsum

QUADRATIC = "quadratic"
LOGARITHMIC = "logarithmic"
LOSSES = (QUADRATIC, LOGARITHMIC)

_LOSS_ALIASES = {
    "quadratic": QUADRATIC, "quad": QUADRATIC, "brier": QUADRATIC,
    "logarithmic": LOGARITHMIC, "log": LOGARITHMIC,
}


class EmptyPreimageError(ValueError):
    """Conditioning on a value the function never takes."""


def loss_kind(name: str) -> str:
    try:
        return _LOSS_ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown loss {name!r}; expected one of {sorted(_LOSS_ALIASES)}") from None


def loss_value(kind: str, outcome: int, q: float) -> float:
    """l(b, q) for outcome b and probability assignment q = P[next bit is 1]."""
    kind = loss_kind(kind)
    if kind == QUADRATIC:
        return (outcome - q) ** 2
    p = 1 - q - outcome * (1 - 2 * q)
    return math.inf if p <= 0 else -math.log2(p)


def check_alpha(alpha, exact: bool = False):
    """Validate a crossover probability; returns a Fraction when ``exact``."""
    if exact:
        a = as_fraction(alpha)
        if not 0 <= a <= Fraction(1, 2):
            raise ValueError(f"alpha must lie in [0, 1/2], got {alpha}")
        return a
    a = float(alpha)
    if not 0.0 <= a <= 0.5:
        raise ValueError(f"alpha must lie in [0, 1/2], got {alpha}")
    return a


@dataclass(frozen=True)
class CostReport:
    """Per-step costs M(Y_k | Y^{k-1}, b) and their value-conditioned totals.

    ``by_value[v]`` is None when b never takes the value v.
    """

    per_step: tuple
    by_value: tuple
    prob_one: object
    loss: str
    mode: str

    @property
    def n(self) -> int:
        return len(self.per_step)

    @property
    def total(self):
        if self.mode == "exact":
            return sum(self.per_step, Fraction(0))
        return fsum(self.per_step)


# --- dense engine ----------------------------------------------------------

def apply_channel(dist: np.ndarray, alpha, n: int) -> np.ndarray:
    """Push a law on {0,1}^n (last axis, x_1 MSB) through a BSC(alpha).

    Leading axes are treated as a batch.  Works for float and object
    (Fraction) arrays alike.
    """
    if alpha == 0:
        return dist
    batch = dist.shape[:-1]
    cube = dist.reshape(batch + (2,) * n)
    keep = 1 - alpha
    for axis in range(len(batch), len(batch) + n):
        cube = keep * cube + alpha * np.flip(cube, axis=axis)
    return cube.reshape(dist.shape)


def prefix_levels(dist: np.ndarray, n: int) -> list:
    """Marginals of y^k for k = 0..n; ``levels[k]`` has 2**k entries."""
    levels = [None] * (n + 1)
    levels[n] = dist
    for k in range(n, 0, -1):
        cur = levels[k]
        levels[k - 1] = cur.reshape(cur.shape[:-1] + (-1, 2)).sum(axis=-1)
    return levels


def _float_terms(p0: np.ndarray, p1: np.ndarray, loss: str) -> np.ndarray:
    """Joint-probability-weighted loss of the Bayes predictor, per prefix."""
    s = p0 + p1
    with np.errstate(divide="ignore", invalid="ignore"):
        if loss == QUADRATIC:
            return np.where(s > 0, p0 * p1 / s, 0.0)
        t0 = np.where(p0 > 0, -p0 * np.log2(p0 / s), 0.0)
        t1 = np.where(p1 > 0, -p1 * np.log2(p1 / s), 0.0)
    return t0 + t1


def _exact_terms(p0: np.ndarray, p1: np.ndarray) -> list:
    return [a * b / (a + b) for a, b in zip(p0.tolist(), p1.tolist()) if a + b]


def sequential_cost(dist: np.ndarray, n: int, loss: str = QUADRATIC, exact: bool = False) -> list:
    """Per-step sequential prediction cost of a single law on {0,1}^n."""
    loss = loss_kind(loss)
    if exact and loss != QUADRATIC:
        raise ValueError("exact arithmetic is only available for the quadratic loss")
    levels = prefix_levels(dist, n)
    steps = []
    for k in range(1, n + 1):
        lev = levels[k]
        p0, p1 = lev[0::2], lev[1::2]
        if exact:
            steps.append(sum(_exact_terms(p0, p1), Fraction(0)))
        else:
            steps.append(fsum(_float_terms(p0, p1, loss)))
    return steps


def _conditional_input(bits: np.ndarray, v: int, exact: bool):
    mask = bits == v
    count = int(mask.sum())
    if count == 0:
        raise EmptyPreimageError(f"b never takes the value {v}")
    if exact:
        dist = np.empty(bits.shape, dtype=object)
        dist[:] = Fraction(0)
        dist[mask] = Fraction(1, count)
        return dist, count
    return mask / count, count


def output_distribution(b, v: int, alpha=0.0, exact: bool = False) -> np.ndarray:
    """P[Y^n = y | b(X^n) = v] for all y, indexed with y_1 as MSB."""
    b = as_truth_table(b)
    alpha = check_alpha(alpha, exact)
    dist, _ = _conditional_input(b.bits, v, exact)
    return apply_channel(dist, alpha, b.n)


def seq_cost(b, alpha=0.0, loss: str = QUADRATIC, exact: bool = False) -> CostReport:
    """Dense-engine sequential cost of predicting Y^n given b(X^n).

    With ``exact`` the channel is applied in rational arithmetic, which is
    only practical for small n and only defined for the quadratic loss.
    """
    b = as_truth_table(b)
    loss = loss_kind(loss)
    alpha = check_alpha(alpha, exact)
    n, size = b.n, 1 << b.n
    per_value = [None, None]
    probs = [0, 0]
    for v in (0, 1):
        try:
            dist, count = _conditional_input(b.bits, v, exact)
        except EmptyPreimageError:
            continue
        probs[v] = Fraction(count, size) if exact else count / size
        per_value[v] = sequential_cost(apply_channel(dist, alpha, n), n, loss, exact)
    return _combine(per_value, probs, n, loss, exact)


def _combine(per_value, probs, n, loss, exact) -> CostReport:
    if exact:
        per_step = tuple(
            sum((probs[v] * per_value[v][k] for v in (0, 1) if per_value[v] is not None), Fraction(0))
            for k in range(n)
        )
        by_value = tuple(None if s is None else sum(s, Fraction(0)) for s in per_value)
        return CostReport(per_step, by_value, probs[1], loss, "exact")
    per_step = tuple(
        fsum([probs[v] * per_value[v][k] for v in (0, 1) if per_value[v] is not None])
        for k in range(n)
    )
    by_value = tuple(None if s is None else fsum(s) for s in per_value)
    return CostReport(per_step, by_value, float(probs[1]), loss, "float")


def seq_cost_batch(bits: np.ndarray, alpha: float, loss: str = QUADRATIC) -> np.ndarray:
    """Per-step costs for many truth tables at once.

    ``bits`` has shape (F, 2**n); returns an (F, n) float array.  Uses plain
    pairwise summation, so results may differ from :func:`seq_cost` in the
    last few ulps.
    """
    bits = np.asarray(bits)
    loss = loss_kind(loss)
    alpha = check_alpha(alpha)
    n = int(bits.shape[-1]).bit_length() - 1
    out = np.zeros(bits.shape[:-1] + (n,))
    for v in (0, 1):
        mask = (bits == v)
        count = mask.sum(axis=-1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            dist = np.where(count > 0, mask / np.maximum(count, 1), 0.0)
        levels = prefix_levels(apply_channel(dist, alpha, n), n)
        weight = count / (1 << n)
        for k in range(1, n + 1):
            lev = levels[k]
            out[..., k - 1] += weight[..., 0] * _float_terms(lev[..., 0::2], lev[..., 1::2], loss).sum(-1)
    return out


# --- noiseless exact engine -------------------------------------------------

def seq_cost_noiseless(b, loss: str = QUADRATIC) -> CostReport:
    """Exact cost at alpha = 0 from preimage completion counts.

    Conditioned on b = v, X^n is uniform on the preimage S_v, so with N(x^k)
    the number of completions of a prefix, the quadratic step cost is
    sum over x^{k-1} of N0*N1 / (N * |S_v|).  Quadratic costs are exact
    rationals; logarithmic costs are floats computed from the same counts.
    """
    b = as_truth_table(b)
    loss = loss_kind(loss)
    n, size = b.n, 1 << b.n
    if n > 20:
        raise ValueError(f"noiseless exact engine supports n <= 20, got {n}")
    exact = loss == QUADRATIC
    per_value = [None, None]
    probs = [Fraction(0), Fraction(0)]
    for v in (0, 1):
        counts = (b.bits == v).astype(np.int64)
        total = int(counts.sum())
        if total == 0:
            continue
        probs[v] = Fraction(total, size)
        steps = [None] * n
        level = counts
        for k in range(n, 0, -1):
            pairs = level.reshape(-1, 2)
            n0, n1 = pairs[:, 0], pairs[:, 1]
            level = n0 + n1
            if exact:
                steps[k - 1] = _grouped_ratio_sum(n0 * n1, level) / total
            else:
                p0, p1 = n0 / total, n1 / total
                steps[k - 1] = fsum(_float_terms(p0, p1, LOGARITHMIC))
        per_value[v] = steps
    if not exact:
        probs = [float(p) for p in probs]
    return _combine(per_value, probs, n, loss, exact)


def _grouped_ratio_sum(num: np.ndarray, den: np.ndarray) -> Fraction:
    """Exact sum of num[i]/den[i] over den > 0, grouping equal denominators."""
    keep = den > 0
    num, den = num[keep], den[keep]
    if den.size == 0:
        return Fraction(0)
    uniq, inv = np.unique(den, return_inverse=True)
    sums = np.zeros(uniq.size, dtype=np.int64)
    np.add.at(sums, inv, num)
    return sum((Fraction(int(s), int(d)) for s, d in zip(sums, uniq)), Fraction(0))


# --- symmetric engine -------------------------------------------------------

def symmetric_joint(s: SymmetricProfile, alpha, exact: bool = False) -> dict:
    """Weight-collapsed joint law of (Y^k, b) for every k.

    Returns ``{v: [f_0, ..., f_n]}`` where ``f_k[j] = 2**k * P[Y^k = y, b = v]``
    for any fixed y of Hamming weight j.  These satisfy the marginalisation
    identity ``f_{k-1}[j] = (f_k[j] + f_k[j+1]) / 2`` and ``f_0[0] = P[b = v]``.
    """
    n = s.n
    alpha = check_alpha(alpha, exact)
    one, half = (Fraction(1), Fraction(1, 2)) if exact else (1.0, 0.5)
    dtype = object if exact else float
    keep = one - alpha

    # tails[v][k][m] = P[b = v | x^k has weight m], by averaging the last bit out
    tails = {}
    for v in (0, 1):
        t = np.array([one if o == v else 0 * one for o in s.out], dtype=dtype)
        per_k = [None] * (n + 1)
        per_k[n] = t
        for k in range(n, 0, -1):
            t = (t[:-1] + t[1:]) * half
            per_k[k - 1] = t
        tails[v] = per_k

    # rows of mix: law of the input weight of x^k given an output prefix of weight j
    mix = np.array([[one]], dtype=dtype)
    joint = {0: [None] * (n + 1), 1: [None] * (n + 1)}
    for v in (0, 1):
        joint[v][0] = mix @ tails[v][0]
    for k in range(1, n + 1):
        nxt = np.zeros((k + 1, k + 1), dtype=dtype)
        if exact:
            nxt[:] = Fraction(0)
        nxt[:k, :k] += keep * mix
        nxt[:k, 1:] += alpha * mix
        nxt[k, :k] += alpha * mix[k - 1]
        nxt[k, 1:] += keep * mix[k - 1]
        mix = nxt
        for v in (0, 1):
            joint[v][k] = mix @ tails[v][k]
    return joint


def _class_weights(k: int, exact: bool):
    if exact:
        return [Fraction(math.comb(k, j), 1 << k) for j in range(k + 1)]
    return binom_pmf_half(k)


def seq_cost_symmetric(s: SymmetricProfile, alpha=0.0, loss: str = QUADRATIC,
                       exact: bool = False) -> CostReport:
    """Sequential cost of a permutation-invariant function in O(n^3) time."""
    loss = loss_kind(loss)
    if exact and loss != QUADRATIC:
        raise ValueError("exact arithmetic is only available for the quadratic loss")
    joint = symmetric_joint(s, alpha, exact)
    n = s.n
    per_value = [None, None]
    probs = [0, 0]
    for v in (0, 1):
        f = joint[v]
        pv = f[0][0]
        if pv == 0:
            continue
        probs[v] = pv
        steps = []
        for k in range(1, n + 1):
            w = _class_weights(k - 1, exact)
            p0, p1 = f[k][:-1], f[k][1:]
            if exact:
                terms = [wj * (a / 2) * (b / 2) / ((a + b) / 2)
                         for wj, a, b in zip(w, p0.tolist(), p1.tolist()) if a + b]
                steps.append(sum(terms, Fraction(0)) / pv)
            else:
                steps.append(fsum(w * _float_terms(p0 / 2, p1 / 2, loss)) / pv)
        per_value[v] = steps
    return _combine(per_value, probs, n, loss, exact)


def seq_cost_auto(f, alpha=0.0, loss: str = QUADRATIC, exact: bool = False) -> CostReport:
    """Dispatch to the symmetric engine when f is permutation invariant."""
    from .boolfn import detect_symmetric

    if isinstance(f, TruthTable):
        prof = detect_symmetric(f)
        if prof is None:
            if exact and check_alpha(alpha, True) == 0:
                return seq_cost_noiseless(f, loss)
            return seq_cost(f, alpha, loss, exact)
        f = prof
    return seq_cost_symmetric(f, alpha, loss, exact)


# --- entropies ---------------------------------------------------------------

def _entropy_bits(p: np.ndarray) -> float:
    p = p[p > 0]
    return fsum(-p * np.log2(p))


def cond_entropy(b, alpha=0.0) -> float:
    """H(Y^n | b(X^n)) in bits, from the full conditional output laws."""
    b = as_truth_table(b)
    alpha = check_alpha(alpha)
    size = 1 << b.n
    parts = []
    for v in (0, 1):
        count = int((b.bits == v).sum())
        if count:
            parts.append(count / size * _entropy_bits(output_distribution(b, v, alpha)))
    return fsum(parts)


def mutual_information(b, alpha=0.0) -> float:
    """I(b(X^n); Y^n) = n - H(Y^n | b(X^n)) since Y^n is uniform."""
    b = as_truth_table(b)
    return max(0.0, b.n - cond_entropy(b, alpha))


def cond_entropy_symmetric(s: SymmetricProfile, alpha) -> float:
    """H(Y^n | b) for a symmetric b, from the weight-collapsed joint law."""
    joint = symmetric_joint(s, alpha)
    n = s.n
    w = binom_pmf_half(n)
    parts = []
    for v in (0, 1):
        pv = joint[v][0][0]
        if pv <= 0:
            continue
        f = joint[v][n]
        pos = f > 0
        # -log2 P[y | v] = n - log2 f + log2 P[v]
        parts.append(fsum(w[pos] * f[pos] * (n - np.log2(f[pos]) + math.log2(pv))))
    return fsum(parts)


def h_maj_given_y(n: int, alpha) -> float:
    """H(maj(X^n) | Y^n) = 1 + H(Y^n | maj) - n for odd n."""
    from .boolfn import majority

    if n < 1 or n % 2 == 0:
        raise ValueError(f"n must be odd and positive, got {n}")
    alpha = check_alpha(alpha)
    return min(1.0, max(0.0, 1.0 + cond_entropy_symmetric(majority(n), alpha) - n))


# --- channel composition and t-majority --------------------------------------

def smse_channel_compose_check(dist: Sequence[float], alpha) -> tuple:
    """(M(W^n), alpha(1-alpha) n + (1-2alpha)^2 M(V^n)) for W^n = V^n through BSC(alpha).

    The first entry is never smaller than the second, with equality for
    product laws.
    """
    dist = np.asarray(dist, dtype=float)
    alpha = check_alpha(alpha)
    size = dist.size
    n = size.bit_length() - 1
    if dist.ndim != 1 or size != 1 << n or n < 1:
        raise ValueError("distribution must have 2**n entries, n >= 1")
    if (dist < 0).any() or abs(dist.sum() - 1.0) > 1e-9:
        raise ValueError("distribution must be nonnegative and sum to 1")
    m_in = fsum(sequential_cost(dist, n))
    m_out = fsum(sequential_cost(apply_channel(dist, alpha, n), n))
    return m_out, alpha * (1 - alpha) * n + (1 - 2 * alpha) ** 2 * m_in


def tmaj_marginal(n: int, t) -> Fraction:
    """P[V_k = 1] for V^n uniform on vectors of weight >= t*n (exact)."""
    t = as_fraction(t)
    if n < 1 or not 0 <= t <= 1:
        raise ValueError(f"need n >= 1 and 0 <= t <= 1, got n={n}, t={t}")
    first = math.ceil(t * n)
    if first > n:
        raise ValueError("empty support")
    ones = sum(math.comb(n, m) * m for m in range(first, n + 1))
    size = sum(math.comb(n, m) for m in range(first, n + 1))
    return Fraction(ones, n * size)
