"""Closed-form SMSE bounds, the majority stability exponent and crossovers.

Entries marked asymptotic drop unspecified o(1) or O((1-2a)^4) terms; they
are reference curves, never finite-n guarantees.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from .boolfn import majority
from .exact import check_alpha, seq_cost_symmetric
from .numerics import LN2, binent, find_root, gaussian_expectation, q_function

ASYMPTOTIC_FIELDS = (
    "maj_noiseless_ub_leading",
    "maj_noisy_ub_leading",
    "maj_noisy_lb_leading",
    "h_maj_quadratic_lb",
)


def mu(alpha: float) -> float:
    """binent(arccos(1 - 2a) / pi), the exponent in majority's noise stability."""
    alpha = check_alpha(alpha)
    return binent(math.acos(1.0 - 2.0 * alpha) / math.pi)


def noiseless_lb(n: int) -> float:
    return (n - 2.0 * LN2) / 4.0


def noisy_lb(n: int, alpha: float) -> float:
    return (n - 2.0 * LN2 * (1.0 - 2.0 * alpha) ** 2) / 4.0


def dictator_noisy(n: int, alpha: float) -> float:
    return (n - (1.0 - 2.0 * alpha) ** 2) / 4.0


def maj_noisy_ub_leading(n: int, alpha: float) -> float:
    return (n - 2.0 * LN2 * (1.0 - 2.0 * alpha) ** 2 * (1.0 - mu(alpha))) / 4.0


def maj_noisy_lb_leading(n: int, alpha: float) -> Optional[float]:
    if alpha == 0:
        return None
    return (n - (1.0 - 2.0 * alpha) ** 2 / (2.0 * math.pi * alpha * (1.0 - alpha))) / 4.0


def maj_q_noiseless_leading(n: int, q: float) -> float:
    """Leading-term noiseless SMSE of unbalanced majority (asymptotic)."""
    return (n - 2.0 * LN2 * binent(q)) / 4.0


def gaussian_entropy_approx(alpha: float) -> float:
    """E[binent(Q(|G| (1-2a) / sqrt(4a(1-a))))] for standard normal G."""
    alpha = check_alpha(alpha)
    if alpha == 0:
        raise ValueError("the Gaussian approximation is singular at alpha = 0")
    scale = (1.0 - 2.0 * alpha) / math.sqrt(4.0 * alpha * (1.0 - alpha))
    if scale == 0:
        return 1.0
    return gaussian_expectation(lambda g: binent(q_function(abs(g) * scale)))


def h_maj_quadratic_lb(alpha: float) -> float:
    """Two-term expansion of H(maj | Y^n) near alpha = 1/2 (asymptotic)."""
    alpha = check_alpha(alpha)
    if alpha == 0:
        raise ValueError("the expansion is singular at alpha = 0")
    return 1.0 - (1.0 - 2.0 * alpha) ** 2 / (4.0 * alpha * (1.0 - alpha)) / (math.pi * LN2)


@dataclass(frozen=True)
class BoundSet:
    n: int
    alpha: float
    noiseless_lb: float
    maj_noiseless_ub_leading: float
    dic_noiseless: float
    noisy_lb: float
    maj_noisy_ub_leading: float
    maj_noisy_lb_leading: Optional[float]
    dic_noisy: float
    mu_alpha: float
    h_maj_gaussian: Optional[float]
    h_maj_quadratic_lb: Optional[float]
    asymptotic_flags: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def bound_set(n: int, alpha: float) -> BoundSet:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    alpha = check_alpha(alpha)
    positive = alpha > 0
    return BoundSet(
        n=n,
        alpha=alpha,
        noiseless_lb=noiseless_lb(n),
        maj_noiseless_ub_leading=noiseless_lb(n),
        dic_noiseless=(n - 1) / 4.0,
        noisy_lb=noisy_lb(n, alpha),
        maj_noisy_ub_leading=maj_noisy_ub_leading(n, alpha),
        maj_noisy_lb_leading=maj_noisy_lb_leading(n, alpha),
        dic_noisy=dictator_noisy(n, alpha),
        mu_alpha=mu(alpha),
        h_maj_gaussian=gaussian_entropy_approx(alpha) if positive else None,
        h_maj_quadratic_lb=h_maj_quadratic_lb(alpha) if positive else None,
        asymptotic_flags={name: name in ASYMPTOTIC_FIELDS or name == "h_maj_gaussian"
                          for name in ("noiseless_lb", "maj_noiseless_ub_leading", "dic_noiseless",
                                       "noisy_lb", "maj_noisy_ub_leading", "maj_noisy_lb_leading",
                                       "dic_noisy", "mu_alpha", "h_maj_gaussian",
                                       "h_maj_quadratic_lb")},
    )


def crossover_alpha_lower(tol: float = 1e-10) -> float:
    """Noise level where majority's leading upper bound meets dictator's cost.

    Comparing the (1-2a)^2 coefficients of the two expressions gives
    2 ln2 (1 - mu(a)) = 1.
    """
    return find_root(lambda a: 2.0 * LN2 * (1.0 - mu(a)) - 1.0, 1e-6, 0.1, tol)


def majority_minus_dictator(n: int, alpha: float) -> float:
    """Exact SMSE of majority(n) minus the dictator's (n - (1-2a)^2) / 4."""
    return seq_cost_symmetric(majority(n), alpha).total - dictator_noisy(n, alpha)


def crossover_empirical(n: int, alphas: Sequence[float], tol: float = 1e-10) -> Optional[float]:
    """First grid-bracketed alpha where majority(n) stops beating dictator.

    The bracket is refined by bisection on the exact cost difference.
    Returns None when the difference keeps its sign over the grid.
    """
    if n < 1 or n % 2 == 0:
        raise ValueError(f"n must be odd, got {n}")
    grid = sorted(check_alpha(a) for a in alphas)
    diffs = [majority_minus_dictator(n, a) for a in grid]
    for (a0, d0), (a1, d1) in zip(zip(grid, diffs), zip(grid[1:], diffs[1:])):
        if d0 == 0:
            return a0
        if (d0 < 0) != (d1 < 0) and d1 != 0:
            return find_root(lambda a: majority_minus_dictator(n, a), a0, a1, tol)
    return None
