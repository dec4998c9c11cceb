"""Long-range percolation on Z^d: kernels, samplers, graph distances and estimators."""

from ._core import (
    __version__,
    block_kernel_sum,
    connection_prob,
    connection_prob_derivative,
    corner_distance,
    count_cut_points,
    cutpoint_mean_exact,
    estimate_corner_distance,
    exact_distance_expectation,
    expected_degree,
    graph_distance,
    kernel_integral,
    lambda_small_beta_derivative,
    run_experiment,
    sample,
    theta_inf,
    theta_slope,
    verify_russo,
)

__all__ = [
    "__version__",
    "block_kernel_sum",
    "connection_prob",
    "connection_prob_derivative",
    "corner_distance",
    "count_cut_points",
    "cutpoint_mean_exact",
    "estimate_corner_distance",
    "exact_distance_expectation",
    "expected_degree",
    "graph_distance",
    "kernel_integral",
    "lambda_small_beta_derivative",
    "run_experiment",
    "sample",
    "theta_inf",
    "theta_slope",
    "verify_russo",
]
