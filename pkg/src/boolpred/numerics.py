"""Exact and floating-point kernels shared by the engines.

Probabilities that must be exact are carried as :class:`fractions.Fraction`;
everything else is double precision with correctly rounded summation
(:func:`math.fsum`).
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np
from scipy import integrate
from scipy.special import gammaln, logsumexp
from scipy.stats import binom

LN2 = math.log(2.0)

# Truncation of the Gaussian expectation; 2*Q(12) < 4e-33.
GAUSS_TRUNCATION = 12.0


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested accuracy."""


class BracketError(ValueError):
    """Root bracket does not contain a sign change."""


def _check_prob(p, name="p"):
    if not 0.0 <= p <= 1.0 or p != p:
        raise ValueError(f"{name} must lie in [0, 1], got {p!r}")


def binent(p: float) -> float:
    """Binary entropy in bits, with h(0) = h(1) = 0."""
    _check_prob(p)
    if p == 0 or p == 1:
        return 0.0
    q = 1.0 - p
    # evaluate in a fixed order on (min, max) so h(p) == h(1-p) bitwise
    a, b = (p, q) if p <= q else (q, p)
    return -(a * math.log2(a) + b * math.log2(b))


def binent_array(p: np.ndarray) -> np.ndarray:
    """Vectorised :func:`binent`; entries outside (0, 1) map to 0."""
    p = np.asarray(p, dtype=float)
    a = np.minimum(p, 1.0 - p)
    b = 1.0 - a
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -(np.where(a > 0, a * np.log2(a), 0.0) + np.where(b > 0, b * np.log2(b), 0.0))
    return np.where((p <= 0) | (p >= 1), 0.0, out)


def bindiv(a: float, b: float) -> float:
    """Binary KL divergence D(a || b) in bits."""
    _check_prob(a, "a")
    _check_prob(b, "b")
    if b in (0.0, 1.0):
        if a == b:
            return 0.0
        raise ValueError(f"bindiv undefined for b={b} and a={a}")
    out = 0.0
    if a > 0:
        out += a * math.log2(a / b)
    if a < 1:
        out += (1.0 - a) * math.log2((1.0 - a) / (1.0 - b))
    return out


def q_function(t: float) -> float:
    """Standard normal upper tail P[G > t]."""
    return 0.5 * math.erfc(t / math.sqrt(2.0))


def binom_tail(n: int, k0: int) -> int:
    """Exact sum of C(n, m) for m = k0..n."""
    if n < 0 or not 0 <= k0 <= n + 1:
        raise ValueError(f"need 0 <= k0 <= n+1, got n={n}, k0={k0}")
    return sum(math.comb(n, m) for m in range(k0, n + 1))


def log_binom_tail(n: int, k0: int) -> float:
    """Natural log of :func:`binom_tail`, accumulated in the log domain."""
    if n < 0 or not 0 <= k0 <= n + 1:
        raise ValueError(f"need 0 <= k0 <= n+1, got n={n}, k0={k0}")
    if k0 == n + 1:
        return -math.inf
    m = np.arange(k0, n + 1)
    terms = gammaln(n + 1) - gammaln(m + 1) - gammaln(n - m + 1)
    return float(logsumexp(terms))


def binom_pmf_half(n: int) -> np.ndarray:
    """C(n, j) / 2**n for j = 0..n, without overflow.

    scipy's saddle-point pmf keeps the row sum within a few ulps of 1, which
    the plain gammaln formula does not for n in the hundreds.
    """
    return binom.pmf(np.arange(n + 1), n, 0.5)


def fsum(values: Iterable[float]) -> float:
    """Correctly rounded float sum; order independent, hence deterministic."""
    if isinstance(values, np.ndarray):
        values = values.ravel().tolist()
    return math.fsum(values)


def gaussian_expectation(
    f: Callable[[float], float],
    *,
    truncation: float = GAUSS_TRUNCATION,
    epsabs: float = 1e-13,
    epsrel: float = 1e-12,
    limit: int = 200,
) -> float:
    """E[f(G)] for G ~ N(0, 1) by adaptive Gauss-Kronrod quadrature.

    The integral is truncated to [-truncation, truncation]; for |f| <= B the
    dropped tail is at most 2*B*Q(truncation).  The origin is passed as a
    breakpoint since integrands of the form f(|g|) have a kink there.
    """
    norm = 1.0 / math.sqrt(2.0 * math.pi)

    def integrand(g):
        return f(g) * norm * math.exp(-0.5 * g * g)

    res = integrate.quad(
        integrand, -truncation, truncation, points=[0.0], epsabs=epsabs,
        epsrel=epsrel, limit=limit, full_output=1,
    )
    # a fourth element is only present when QUADPACK reports a problem
    if len(res) > 3:
        raise QuadratureError(f"quadrature did not converge: {res[3]}")
    return float(res[0])


def find_root(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12,
              max_iter: int = 200) -> float:
    """Bisection; returns the midpoint of the final bracket."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketError(f"f({lo})={flo} and f({hi})={fhi} have the same sign")
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def as_fraction(x) -> Fraction:
    """Exact conversion of ints, Fractions, floats and decimal strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)
