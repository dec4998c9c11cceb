#include "perclr/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "perclr/errors.hpp"
#include "perclr/graphs.hpp"
#include "perclr/parallel.hpp"
#include "perclr/rng.hpp"

namespace perclr {

namespace {

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
};

Moments moments(const std::vector<double>& x) {
    Moments m;
    if (x.empty()) return m;
    long double s = 0.0L;
    for (double v : x) s += v;
    m.mean = static_cast<double>(s / static_cast<long double>(x.size()));
    if (x.size() < 2) return m;
    long double ss = 0.0L;
    for (double v : x) ss += (v - m.mean) * (v - m.mean);
    m.sd = std::sqrt(static_cast<double>(ss / static_cast<long double>(x.size() - 1)));
    return m;
}

void fill_stats(LambdaEstimate& e) {
    const auto m = moments(e.samples);
    e.mean = m.mean;
    e.std_error = m.sd / std::sqrt(static_cast<double>(e.samples.size()));
    e.replicas = static_cast<std::int64_t>(e.samples.size());
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

void check_theta_inputs(const std::vector<LambdaEstimate>& est, std::size_t min_sizes) {
    if (est.size() < min_sizes)
        throw InvalidInput("theta estimator needs at least " + std::to_string(min_sizes) + " sizes");
    std::vector<Coord> sizes;
    for (const auto& e : est) {
        if (e.measure.beta != est.front().measure.beta || e.measure.kind != est.front().measure.kind)
            throw InvalidInput("theta estimator: estimates mix different beta values");
        if (e.n < 2) throw InvalidInput("theta estimator: sizes must be >= 2");
        if (!(e.mean > 0.0)) throw InvalidInput("theta estimator: non-positive Lambda estimate");
        sizes.push_back(e.n);
    }
    std::sort(sizes.begin(), sizes.end());
    if (std::adjacent_find(sizes.begin(), sizes.end()) != sizes.end())
        throw InvalidInput("theta estimator: sizes must be distinct");
}

template <class Statistic>
ThetaEstimate bootstrap_theta(const std::vector<LambdaEstimate>& est, ThetaMethod method, int resamples,
                              std::uint64_t seed, Statistic&& stat) {
    ThetaEstimate t;
    t.beta = est.front().measure.beta;
    t.method = method;
    for (const auto& e : est) t.sizes_used.push_back(e.n);
    std::vector<double> means;
    for (const auto& e : est) means.push_back(e.mean);
    t.value = stat(means);

    std::vector<double> boot;
    boot.reserve(static_cast<std::size_t>(std::max(resamples, 0)));
    auto rng = make_engine(seed, kStreamBootstrap);
    for (int b = 0; b < resamples; ++b) {
        std::vector<double> m(est.size());
        for (std::size_t i = 0; i < est.size(); ++i) {
            const auto& s = est[i].samples;
            if (s.empty()) {
                m[i] = est[i].mean;
                continue;
            }
            std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
            long double acc = 0.0L;
            for (std::size_t j = 0; j < s.size(); ++j) acc += s[pick(rng)];
            m[i] = static_cast<double>(acc / static_cast<long double>(s.size()));
        }
        boot.push_back(stat(m));
    }
    if (boot.empty()) {
        t.ci_low = t.ci_high = t.value;
        return t;
    }
    std::sort(boot.begin(), boot.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(boot.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, boot.size() - 1);
        return boot[lo] + (pos - static_cast<double>(lo)) * (boot[hi] - boot[lo]);
    };
    // Percentile interval, widened to contain the point estimate.
    t.ci_low = std::min(quantile(0.025), t.value);
    t.ci_high = std::max(quantile(0.975), t.value);
    t.std_error = moments(boot).sd;
    return t;
}

}  // namespace

std::string to_string(PairPolicy p) { return p == PairPolicy::corner ? "corner" : "full_max"; }

PairPolicy pair_policy_from_string(const std::string& s) {
    if (s == "corner") return PairPolicy::corner;
    if (s == "full_max") return PairPolicy::full_max;
    throw InvalidInput("unknown pair policy: " + s);
}

std::string to_string(ThetaMethod m) { return m == ThetaMethod::inf_formula ? "inf_formula" : "ols_slope"; }

LambdaEstimate estimate_corner_distance(const MeasureSpec& spec, Coord n, int dim, std::int64_t replicas,
                                        std::uint64_t seed, int workers) {
    if (replicas < 2) throw InvalidInput("estimate_corner_distance needs at least 2 replicas");
    spec.validate();
    LambdaEstimate e;
    e.n = n;
    e.dim = dim;
    e.measure = spec;
    e.seed = seed;
    e.pair_policy = PairPolicy::corner;
    e.samples.assign(static_cast<std::size_t>(replicas), 0.0);
    parallel_for(e.samples.size(), workers, [&](std::size_t r) {
        const auto c = sample(spec, n, dim, seed, r);
        e.samples[r] = static_cast<double>(corner_distance(BoxGraph(c))) + 1.0;
    });
    fill_stats(e);
    return e;
}

LambdaEstimate estimate_lambda_full(double beta, Coord n, int dim, std::int64_t replicas, std::uint64_t seed,
                                    int workers) {
    if (replicas < 2) throw InvalidInput("estimate_lambda_full needs at least 2 replicas");
    const Box box(n, dim);
    if (box.volume() > 256) throw CapacityError("estimate_lambda_full: n^d must be <= 256");
    const auto spec = MeasureSpec::plain(beta);
    const std::size_t v = box.volume();

    // Integer distance sums per pair: exact, so chunking never changes the result.
    const std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(replicas), 64);
    std::vector<std::vector<std::int64_t>> sums(chunks, std::vector<std::int64_t>(v * v, 0));
    parallel_for(chunks, workers, [&](std::size_t c) {
        for (auto r = static_cast<std::int64_t>(c); r < replicas; r += static_cast<std::int64_t>(chunks)) {
            const BoxGraph g(sample_fast(spec, n, dim, seed, static_cast<std::uint64_t>(r)));
            for (VertexId s = 0; s < v; ++s) {
                const auto f = bfs_distance(g, s);
                for (VertexId t = 0; t < v; ++t) sums[c][s * v + t] += f.dist[t];
            }
        }
    });
    std::vector<std::int64_t> total(v * v, 0);
    for (const auto& s : sums)
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += s[i];
    VertexId best_s = 0, best_t = 0;
    for (VertexId s = 0; s < v; ++s)
        for (VertexId t = s + 1; t < v; ++t)
            if (total[s * v + t] > total[best_s * v + best_t]) {
                best_s = s;
                best_t = t;
            }

    LambdaEstimate e;
    e.n = n;
    e.dim = dim;
    e.measure = spec;
    e.seed = seed;
    e.pair_policy = PairPolicy::full_max;
    e.samples.assign(static_cast<std::size_t>(replicas), 0.0);
    parallel_for(e.samples.size(), workers, [&](std::size_t r) {
        const BoxGraph g(sample_fast(spec, n, dim, seed, r));
        e.samples[r] = static_cast<double>(graph_distance(g, best_s, best_t)) + 1.0;
    });
    fill_stats(e);
    // The pair maximising the mean fixes `samples`; the mean itself is exact.
    e.mean = static_cast<double>(total[best_s * v + best_t]) / static_cast<double>(replicas) + 1.0;
    return e;
}

ThetaEstimate theta_inf(const std::vector<LambdaEstimate>& estimates, int resamples, std::uint64_t seed) {
    check_theta_inputs(estimates, 1);
    std::vector<double> logn;
    for (const auto& e : estimates) logn.push_back(std::log(static_cast<double>(e.n)));
    return bootstrap_theta(estimates, ThetaMethod::inf_formula, resamples, seed, [&](const std::vector<double>& m) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m.size(); ++i) best = std::min(best, std::log(m[i]) / logn[i]);
        return best;
    });
}

ThetaEstimate theta_slope(const std::vector<LambdaEstimate>& estimates, int resamples, std::uint64_t seed) {
    check_theta_inputs(estimates, 3);
    std::vector<double> logn;
    for (const auto& e : estimates) logn.push_back(std::log(static_cast<double>(e.n)));
    return bootstrap_theta(estimates, ThetaMethod::ols_slope, resamples, seed, [&](const std::vector<double>& m) {
        std::vector<double> y(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) y[i] = std::log(m[i]);
        return ols_slope(logn, y);
    });
}

SweepResult monotone_sweep(const std::vector<double>& betas, Coord n, int dim, std::int64_t replicas,
                           std::uint64_t seed, int workers) {
    if (replicas < 2) throw InvalidInput("monotone_sweep needs at least 2 replicas");
    if (betas.empty()) throw InvalidInput("monotone_sweep: empty beta list");
    for (std::size_t i = 1; i < betas.size(); ++i)
        if (betas[i] < betas[i - 1]) throw InvalidInput("monotone_sweep: betas must be ascending");

    const std::size_t nb = betas.size();
    std::vector<std::vector<std::int64_t>> dist(static_cast<std::size_t>(replicas), std::vector<std::int64_t>(nb));
    parallel_for(dist.size(), workers, [&](std::size_t r) {
        const auto configs = coupled_sweep(betas, n, dim, seed, r);
        for (std::size_t i = 0; i < nb; ++i) dist[r][i] = corner_distance(BoxGraph(configs[i]));
    });

    SweepResult out;
    out.betas = betas;
    for (const auto& row : dist)
        for (std::size_t i = 0; i + 1 < nb; ++i)
            if (row[i + 1] > row[i]) ++out.pathwise_violations;
    if (out.pathwise_violations > 0)
        throw InvariantViolation("Harris monotonicity violated on " + std::to_string(out.pathwise_violations) +
                                 " replica transitions");

    for (std::size_t i = 0; i < nb; ++i) {
        LambdaEstimate e;
        e.n = n;
        e.dim = dim;
        e.measure = MeasureSpec::plain(betas[i]);
        e.seed = seed;
        for (const auto& row : dist) e.samples.push_back(static_cast<double>(row[i]) + 1.0);
        fill_stats(e);
        out.estimates.push_back(std::move(e));
    }
    for (std::size_t i = 0; i + 1 < nb; ++i) {
        std::vector<double> diff;
        for (const auto& row : dist) diff.push_back(static_cast<double>(row[i] - row[i + 1]));
        const auto m = moments(diff);
        out.diff_mean.push_back(m.mean);
        out.diff_stderr.push_back(m.sd / std::sqrt(static_cast<double>(diff.size())));
    }
    return out;
}

TelescopeResult continuity_telescope(double beta, double eps, int levels, std::int64_t replicas, std::uint64_t seed,
                                     int workers) {
    if (levels < 2 || levels > 14) throw InvalidInput("continuity_telescope: N must be in 2..14");
    if (!(eps >= 0.0) || eps > 1.0) throw InvalidInput("continuity_telescope: eps must be in [0,1]");
    if (!(beta >= 0.0)) throw InvalidInput("continuity_telescope: beta must be non-negative");
    if (replicas < 2) throw InvalidInput("continuity_telescope needs at least 2 replicas");

    const Coord side = Coord{1} << levels;
    const auto nl = static_cast<std::size_t>(levels);
    const std::uint64_t chi_seed = mix(seed, kStreamChi);
    // dist[r][k] for k = 1..N under P_{β≤k}^{β+ε>k}
    std::vector<std::vector<double>> dist(static_cast<std::size_t>(replicas), std::vector<double>(nl + 1, 0.0));
    std::vector<double> direct_lo(dist.size()), direct_hi(dist.size());
    const std::uint64_t seed_lo = mix(seed, 0x656e646c6fULL);
    const std::uint64_t seed_hi = mix(seed, 0x656e646869ULL);
    parallel_for(dist.size(), workers, [&](std::size_t r) {
        Configuration omega = sample_fast(MeasureSpec::mixed(beta, beta + eps, levels), side, 1, seed, r);
        dist[r][nl] = static_cast<double>(corner_distance(BoxGraph(omega)));
        for (int k = levels; k >= 2; --k) {
            omega = chi_augment(omega, eps, k, chi_seed);
            dist[r][static_cast<std::size_t>(k - 1)] = static_cast<double>(corner_distance(BoxGraph(omega)));
        }
        direct_lo[r] = static_cast<double>(
            corner_distance(BoxGraph(sample_fast(MeasureSpec::plain(beta), side, 1, seed_lo, r))));
        direct_hi[r] = static_cast<double>(
            corner_distance(BoxGraph(sample_fast(MeasureSpec::plain(beta + eps), side, 1, seed_hi, r))));
    });

    TelescopeResult out;
    out.beta = beta;
    out.eps = eps;
    out.levels = levels;
    out.replicas = replicas;
    out.seed = seed;
    out.level_means.assign(nl + 1, 0.0);
    for (std::size_t k = 1; k <= nl; ++k) {
        long double s = 0.0L;
        for (const auto& row : dist) s += row[k];
        out.level_means[k] = static_cast<double>(s / static_cast<long double>(dist.size()));
    }
    const double rn = static_cast<double>(replicas);
    // Delta-method stderr of log(mean a) - log(mean b) on paired samples.
    auto paired_stderr = [&](std::size_t ka, std::size_t kb) {
        std::vector<double> z;
        z.reserve(dist.size());
        for (const auto& row : dist) z.push_back(row[ka] / out.level_means[ka] - row[kb] / out.level_means[kb]);
        return moments(z).sd / std::sqrt(rn);
    };
    for (int k = 2; k <= levels; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        TelescopeTerm t;
        t.k = k;
        t.log_ratio = std::log(out.level_means[ku]) - std::log(out.level_means[ku - 1]);
        t.std_error = paired_stderr(ku, ku - 1);
        out.terms.push_back(t);
    }
    out.telescoped_sum = 0.0;
    for (const auto& t : out.terms) out.telescoped_sum += t.log_ratio;
    out.telescoped_stderr = paired_stderr(nl, 1);

    const auto mlo = moments(direct_lo);
    const auto mhi = moments(direct_hi);
    out.direct_log_diff = std::log(mlo.mean) - std::log(mhi.mean);
    out.direct_stderr = std::sqrt((mlo.sd * mlo.sd) / (rn * mlo.mean * mlo.mean) +
                                  (mhi.sd * mhi.sd) / (rn * mhi.mean * mhi.mean));
    return out;
}

}  // namespace perclr
