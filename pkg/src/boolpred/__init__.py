"""Exact sequential prediction costs of BSC outputs given a Boolean quantizer."""
from .boolfn import (
    SymmetricProfile,
    TruthTable,
    cofactor,
    detect_symmetric,
    dictator,
    majority,
    maj_q,
    parity,
    parse_truth_table,
    serialize,
)
from .bounds import (
    BoundSet,
    bound_set,
    crossover_alpha_lower,
    crossover_empirical,
    gaussian_entropy_approx,
    h_maj_quadratic_lb,
    mu,
)
from .exact import (
    CostReport,
    cond_entropy,
    h_maj_given_y,
    mutual_information,
    output_distribution,
    seq_cost,
    seq_cost_noiseless,
    seq_cost_symmetric,
    smse_channel_compose_check,
    tmaj_marginal,
)
from .optdp import DpTable, brute_force, dp_optimal, first_bit_cost, reconstruct

__all__ = [
    "SymmetricProfile",
    "TruthTable",
    "cofactor",
    "detect_symmetric",
    "dictator",
    "majority",
    "maj_q",
    "parity",
    "parse_truth_table",
    "serialize",
    "BoundSet",
    "bound_set",
    "crossover_alpha_lower",
    "crossover_empirical",
    "gaussian_entropy_approx",
    "h_maj_quadratic_lb",
    "mu",
    "CostReport",
    "cond_entropy",
    "h_maj_given_y",
    "mutual_information",
    "output_distribution",
    "seq_cost",
    "seq_cost_noiseless",
    "seq_cost_symmetric",
    "smse_channel_compose_check",
    "tmaj_marginal",
    "DpTable",
    "brute_force",
    "dp_optimal",
    "first_bit_cost",
    "reconstruct",
]

__version__ = "0.1.0"
