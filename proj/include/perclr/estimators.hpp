#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perclr/sampling.hpp"

namespace perclr {

enum class PairPolicy { corner, full_max };
std::string to_string(PairPolicy p);
PairPolicy pair_policy_from_string(const std::string& s);

/// Estimate of Λ(n,β) = max_{u,v} E[D(u,v)] + 1 (or its corner proxy).
struct LambdaEstimate {
    Coord n = 0;
    int dim = 1;
    MeasureSpec measure;
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t replicas = 0;
    PairPolicy pair_policy = PairPolicy::corner;
    std::uint64_t seed = 0;
    std::vector<double> samples;  // per-replica D + 1 at the reported pair
};

enum class ThetaMethod { inf_formula, ols_slope };
std::string to_string(ThetaMethod m);

struct ThetaEstimate {
    double beta = 0.0;
    ThetaMethod method = ThetaMethod::ols_slope;
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double std_error = 0.0;  // bootstrap standard deviation
    std::vector<Coord> sizes_used;
};

struct TelescopeTerm {
    int k = 0;
    double log_ratio = 0.0;  // log E_{≤k}[D] - log E_{≤k-1}[D]
    double std_error = 0.0;
};

struct TelescopeResult {
    double beta = 0.0;
    double eps = 0.0;
    int levels = 0;                  // N, box side 2^N
    std::int64_t replicas = 0;
    std::uint64_t seed = 0;
    std::vector<TelescopeTerm> terms;  // k = 2..N
    std::vector<double> level_means;   // index k = 1..N (index 0 unused)
    double telescoped_sum = 0.0;
    double telescoped_stderr = 0.0;
    // Independently sampled endpoints log E_β[D] - log E_{β+ε}[D].
    double direct_log_diff = 0.0;
    double direct_stderr = 0.0;
};

struct SweepResult {
    std::vector<double> betas;
    std::vector<LambdaEstimate> estimates;
    // Paired differences mean(D_{i} - D_{i+1}) with their standard errors.
    std::vector<double> diff_mean;
    std::vector<double> diff_stderr;
    std::int64_t pathwise_violations = 0;
};

inline constexpr int kBootstrapResamples = 1000;

LambdaEstimate estimate_corner_distance(const MeasureSpec& spec, Coord n, int dim,
                                        std::int64_t replicas, std::uint64_t seed, int workers = 0);

/// Max over all pairs of the per-pair mean distance, + 1. Needs n^d ≤ 256.
LambdaEstimate estimate_lambda_full(double beta, Coord n, int dim, std::int64_t replicas,
                                    std::uint64_t seed, int workers = 0);

ThetaEstimate theta_inf(const std::vector<LambdaEstimate>& estimates,
                        int resamples = kBootstrapResamples, std::uint64_t seed = 1);
ThetaEstimate theta_slope(const std::vector<LambdaEstimate>& estimates,
                          int resamples = kBootstrapResamples, std::uint64_t seed = 1);

/// Coupled corner-distance estimates along ascending betas; throws
/// InvariantViolation if any replica's distance increases with β.
SweepResult monotone_sweep(const std::vector<double>& betas, Coord n, int dim,
                           std::int64_t replicas, std::uint64_t seed, int workers = 0);

/// Per-level log ratios of E[D(0,(2^N-1)1)] under the mixed measures
/// P_{β≤k}^{β+ε>k}, chained by chi_augment (d = 1).
TelescopeResult continuity_telescope(double beta, double eps, int levels, std::int64_t replicas,
                                     std::uint64_t seed, int workers = 0);

}  // namespace perclr
