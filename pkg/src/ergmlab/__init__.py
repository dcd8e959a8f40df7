"""Exponential random graph models: mean-field analysis, MCMC samplers,
conditional moment formulas and verification experiments."""

from .errors import ConfigError, DegenerateParameters, ErgmError, PreconditionError, UnsupportedSize
from .graph import (DenseGraph, RunningCounts, count_statistics, flip_edge, hamiltonian, hom_count,
                    hom_count_rooted, partial_hamiltonian)
from .model import (EDGE, TRIANGLE, TWO_STAR, ErgmParams, Region, RegionReport, SubgraphSpec, big_phi,
                    big_phi_prime, load_config, small_phi, small_phi_prime, solve_fixed_point)
from .sampler import (ChainConfig, ChainResult, conditional_swap_step, exact_conditional, exact_distribution,
                      glauber_step, glauber_transition_matrix, run_chain, run_chains, swap_transition_matrix)
from .stats import (Pmf, batch_means, dkw_epsilon, fit_rate, kolmogorov_distance, local_distance,
                    pearson_correlation, smoothing_bound_check, smoothness_D, standardized_sample_tests)
from .theory import (MomentSet, c_star, discretized_normal_pmf, edge_clt_parameters, edge_count_variance,
                     general_subgraph_moments, two_star_moments)

__version__ = "0.1.0"

__all__ = [
    "ChainConfig",
    "ChainResult",
    "ConfigError",
    "DegenerateParameters",
    "DenseGraph",
    "EDGE",
    "ErgmError",
    "ErgmParams",
    "MomentSet",
    "Pmf",
    "PreconditionError",
    "Region",
    "RegionReport",
    "RunningCounts",
    "SubgraphSpec",
    "TRIANGLE",
    "TWO_STAR",
    "UnsupportedSize",
    "batch_means",
    "big_phi",
    "big_phi_prime",
    "c_star",
    "conditional_swap_step",
    "count_statistics",
    "discretized_normal_pmf",
    "dkw_epsilon",
    "edge_clt_parameters",
    "edge_count_variance",
    "exact_conditional",
    "exact_distribution",
    "fit_rate",
    "flip_edge",
    "general_subgraph_moments",
    "glauber_step",
    "glauber_transition_matrix",
    "hamiltonian",
    "hom_count",
    "hom_count_rooted",
    "kolmogorov_distance",
    "load_config",
    "local_distance",
    "partial_hamiltonian",
    "pearson_correlation",
    "run_chain",
    "run_chains",
    "small_phi",
    "small_phi_prime",
    "smoothing_bound_check",
    "smoothness_D",
    "solve_fixed_point",
    "standardized_sample_tests",
    "swap_transition_matrix",
    "two_star_moments",
]
