#include "perclr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "perclr/errors.hpp"
#include "perclr/kernel.hpp"
#include "perclr/rng.hpp"

namespace perclr {

namespace {

// Counter-style generator, cheap to key per edge.
class SplitMixEngine {
public:
    using result_type = std::uint64_t;
    explicit SplitMixEngine(std::uint64_t state) : state_(state) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return splitmix64(state_);
    }

private:
    std::uint64_t state_;
};

std::uint64_t point_hash(std::uint64_t h, std::span<const Coord> c) {
    h = mix(h, c.size());
    for (Coord x : c) h = mix(h, static_cast<std::uint64_t>(x));
    return h;
}

std::uint64_t edge_hash(std::uint64_t seed, std::span<const Coord> u, std::span<const Coord> v) {
    const bool swap = std::lexicographical_compare(v.begin(), v.end(), u.begin(), u.end());
    const auto& lo = swap ? v : u;
    const auto& hi = swap ? u : v;
    return point_hash(point_hash(splitmix64(seed), lo), hi);
}

// Number of failures before the next success of a Bernoulli(p) sequence.
std::uint64_t geometric_skip(double p, std::mt19937_64& rng) {
    const double u = 1.0 - to_unit(rng());  // (0,1]
    const double s = std::floor(std::log(u) / std::log1p(-p));
    if (!(s < 1.8e19)) return ~std::uint64_t{0};
    return static_cast<std::uint64_t>(s);
}

// Calls prob(len, J) for each displacement class with ∞-length in
// [min_len, max_len] and adds the realised edges via geometric skipping.
template <class Prob>
void sample_classes(const Box& box, Coord min_len, Coord max_len, Prob&& prob, std::mt19937_64& rng,
                    std::vector<Edge>& out) {
    const Coord n = box.side();
    min_len = std::max<Coord>(min_len, 2);
    max_len = std::min<Coord>(max_len, n - 1);
    if (min_len > max_len) return;

    if (box.dim() == 1) {
        for (Coord k = min_len; k <= max_len; ++k) {
            const double p = prob(k, kernel_1d(k));
            if (p <= 0.0) continue;
            const auto count = static_cast<std::uint64_t>(n - k);
            if (p >= 1.0) {
                for (std::uint64_t x = 0; x < count; ++x) out.emplace_back(x, x + static_cast<VertexId>(k));
                continue;
            }
            std::uint64_t pos = 0;
            for (;;) {
                const std::uint64_t skip = geometric_skip(p, rng);
                if (skip >= count - pos) break;
                pos += skip;
                out.emplace_back(pos, pos + static_cast<VertexId>(k));
                if (++pos >= count) break;
            }
        }
        return;
    }

    const auto d = static_cast<std::size_t>(box.dim());
    std::vector<Coord> delta(d, -(n - 1));
    std::vector<Coord> x(d), lo(d), ext(d);
    for (;;) {
        // Half space: first non-zero coordinate positive.
        bool positive = false;
        for (Coord c : delta) {
            if (c != 0) {
                positive = c > 0;
                break;
            }
        }
        const Coord len = inf_norm(delta);
        if (positive && len >= min_len && len <= max_len) {
            const double p = prob(len, kernel_at(delta).value);
            if (p > 0.0) {
                std::uint64_t count = 1;
                for (std::size_t i = 0; i < d; ++i) {
                    lo[i] = std::max<Coord>(0, -delta[i]);
                    ext[i] = n - (delta[i] < 0 ? -delta[i] : delta[i]);
                    count *= static_cast<std::uint64_t>(ext[i]);
                }
                auto emit = [&](std::uint64_t flat) {
                    VertexId a = 0, b = 0;
                    std::uint64_t f = flat;
                    for (std::size_t i = 0; i < d; ++i) {
                        x[i] = lo[i] + static_cast<Coord>(f % static_cast<std::uint64_t>(ext[i]));
                        f /= static_cast<std::uint64_t>(ext[i]);
                    }
                    for (std::size_t i = d; i-- > 0;) {
                        a = a * static_cast<VertexId>(n) + static_cast<VertexId>(x[i]);
                        b = b * static_cast<VertexId>(n) + static_cast<VertexId>(x[i] + delta[i]);
                    }
                    out.emplace_back(a, b);
                };
                if (p >= 1.0) {
                    for (std::uint64_t f = 0; f < count; ++f) emit(f);
                } else {
                    std::uint64_t pos = 0;
                    for (;;) {
                        const std::uint64_t skip = geometric_skip(p, rng);
                        if (skip >= count - pos) break;
                        pos += skip;
                        emit(pos);
                        if (++pos >= count) break;
                    }
                }
            }
        }
        std::size_t i = 0;
        while (i < d && ++delta[i] == n) delta[i++] = -(n - 1);
        if (i == d) break;
    }
}

void finalize(std::vector<Edge>& edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

std::uint64_t pair_count(const Box& box) {
    const auto v = static_cast<long double>(box.volume());
    const long double pairs = v * (v - 1.0L) / 2.0L;
    return pairs > 1.8e19L ? ~std::uint64_t{0} : static_cast<std::uint64_t>(pairs);
}

template <class Fn>
void for_each_long_pair(const Box& box, Fn&& fn) {
    const auto d = static_cast<std::size_t>(box.dim());
    std::vector<Coord> ca(d), cb(d), delta(d);
    for (VertexId a = 0; a < box.volume(); ++a) {
        box.coords(a, ca);
        for (VertexId b = a + 1; b < box.volume(); ++b) {
            box.coords(b, cb);
            for (std::size_t i = 0; i < d; ++i) delta[i] = cb[i] - ca[i];
            if (inf_norm(delta) < 2) continue;
            fn(Edge(a, b), std::span<const Coord>(ca), std::span<const Coord>(cb), std::span<const Coord>(delta));
        }
    }
}

}  // namespace

std::string to_string(MeasureKind kind) {
    switch (kind) {
        case MeasureKind::plain: return "plain";
        case MeasureKind::mixed: return "mixed";
        case MeasureKind::continuum: return "continuum";
    }
    return "plain";
}

MeasureKind measure_kind_from_string(const std::string& s) {
    if (s == "plain") return MeasureKind::plain;
    if (s == "mixed") return MeasureKind::mixed;
    if (s == "continuum") return MeasureKind::continuum;
    throw InvalidInput("unknown measure kind: " + s);
}

MeasureSpec MeasureSpec::plain(double beta) {
    MeasureSpec m{MeasureKind::plain, beta, beta, 0};
    m.validate();
    return m;
}

MeasureSpec MeasureSpec::mixed(double beta_short, double beta_long, int k) {
    MeasureSpec m{MeasureKind::mixed, beta_short, beta_long, k};
    m.validate();
    return m;
}

MeasureSpec MeasureSpec::continuum(double beta) {
    MeasureSpec m{MeasureKind::continuum, beta, beta, 0};
    m.validate();
    return m;
}

void MeasureSpec::validate() const {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidInput("beta must be finite and non-negative");
    if (!(beta2 >= 0.0) || !std::isfinite(beta2)) throw InvalidInput("beta2 must be finite and non-negative");
    if (k_threshold < 0 || k_threshold > 62) throw InvalidInput("k_threshold must be in 0..62");
}

double MeasureSpec::beta_for_length(Coord length) const {
    if (kind != MeasureKind::mixed) return beta;
    const Coord short_max = (Coord{1} << k_threshold) - 1;
    return length <= short_max ? beta : beta2;
}

double MeasureSpec::max_beta() const {
    return kind == MeasureKind::mixed ? std::max(beta, beta2) : beta;
}

bool Configuration::contains(const Edge& e) const {
    return std::binary_search(long_edges.begin(), long_edges.end(), e);
}

double edge_uniform(std::uint64_t seed, const LatticePoint& u, const LatticePoint& v) {
    if (u.dim() != v.dim()) throw InvalidInput("edge endpoints of different dimension");
    if (u == v) throw InvalidInput("edge endpoints must differ");
    return to_unit(edge_hash(seed, u.coords, v.coords));
}

double edge_uniform(std::uint64_t seed, const Box& box, const Edge& e) {
    Coord a[8], b[8];
    const auto d = static_cast<std::size_t>(box.dim());
    box.coords(e.a, std::span<Coord>(a, d));
    box.coords(e.b, std::span<Coord>(b, d));
    return to_unit(edge_hash(seed, std::span<const Coord>(a, d), std::span<const Coord>(b, d)));
}

Configuration sample_direct(const MeasureSpec& spec, Coord n, int dim, std::uint64_t seed, std::uint64_t replica) {
    spec.validate();
    Configuration c{Box(n, dim), {}, spec, seed, replica};
    if (pair_count(c.box) > kMaxDirectPairs)
        throw CapacityError("sample_direct: box has more than 1e8 pairs; use sample_fast");
    const std::uint64_t key = replica_key(seed, replica);
    for_each_long_pair(c.box, [&](const Edge& e, auto ca, auto cb, auto delta) {
        const double p = connection_prob(spec.beta_for_length(inf_norm(delta)), kernel_at(delta).value);
        if (p > 0.0 && to_unit(edge_hash(key, ca, cb)) < p) c.long_edges.push_back(e);
    });
    finalize(c.long_edges);
    return c;
}

Configuration sample_fast(const MeasureSpec& spec, Coord n, int dim, std::uint64_t seed, std::uint64_t replica) {
    spec.validate();
    Configuration c{Box(n, dim), {}, spec, seed, replica};
    if (spec.max_beta() == 0.0) return c;
    auto rng = make_engine(replica_key(seed, replica), kStreamFast);
    sample_classes(
        c.box, 2, n - 1, [&](Coord len, double j) { return connection_prob(spec.beta_for_length(len), j); }, rng,
        c.long_edges);
    finalize(c.long_edges);
    return c;
}

PoissonPairCounts continuum_pair_counts(double beta, const LatticePoint& u, const LatticePoint& v, std::uint64_t seed,
                                        std::uint64_t replica) {
    if (!(beta >= 0.0)) throw InvalidInput("beta must be non-negative");
    const auto kv = kernel_integral(u, v);
    if (kv.infinite()) throw InvalidInput("Poisson count is infinite on touching boxes");
    const double mean = 0.5 * beta * kv.value;
    if (mean == 0.0) return {};
    SplitMixEngine eng(mix(edge_hash(replica_key(seed, replica), u.coords, v.coords), kStreamContinuum));
    std::poisson_distribution<std::uint64_t> pois(mean);
    // First draw belongs to the lexicographically smaller endpoint's ordered pair.
    const std::uint64_t first = pois(eng);
    const std::uint64_t second = pois(eng);
    return u < v ? PoissonPairCounts{first, second} : PoissonPairCounts{second, first};
}

Configuration sample_continuum(double beta, Coord n, int dim, std::uint64_t seed, std::uint64_t replica) {
    if (!(beta >= 0.0)) throw InvalidInput("beta must be non-negative");
    Configuration c{Box(n, dim), {}, MeasureSpec::continuum(beta), seed, replica};
    if (beta == 0.0) return c;
    if (pair_count(c.box) > kMaxDirectPairs) throw CapacityError("sample_continuum: box has more than 1e8 pairs");
    const std::uint64_t key = replica_key(seed, replica);
    for_each_long_pair(c.box, [&](const Edge& e, auto ca, auto cb, auto delta) {
        const double mean = 0.5 * beta * kernel_at(delta).value;
        SplitMixEngine eng(mix(edge_hash(key, ca, cb), kStreamContinuum));
        std::poisson_distribution<std::uint64_t> pois(mean);
        const auto first = pois(eng);
        const auto second = pois(eng);
        if (first + second > 0) c.long_edges.push_back(e);
    });
    finalize(c.long_edges);
    return c;
}

Configuration sample(const MeasureSpec& spec, Coord n, int dim, std::uint64_t seed, std::uint64_t replica) {
    if (spec.kind == MeasureKind::continuum) return sample_continuum(spec.beta, n, dim, seed, replica);
    return sample_fast(spec, n, dim, seed, replica);
}

std::vector<Configuration> coupled_sweep(const std::vector<double>& betas, Coord n, int dim, std::uint64_t seed,
                                         std::uint64_t replica) {
    if (betas.empty()) throw InvalidInput("coupled_sweep: empty beta list");
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] >= 0.0)) throw InvalidInput("coupled_sweep: betas must be non-negative");
        if (i > 0 && betas[i] < betas[i - 1]) throw InvalidInput("coupled_sweep: betas must be ascending");
    }
    const double beta_max = betas.back();
    const Configuration top = sample_fast(MeasureSpec::plain(beta_max), n, dim, seed, replica);
    const std::uint64_t key = mix(replica_key(seed, replica), kStreamHarris);

    std::vector<Configuration> out;
    out.reserve(betas.size());
    for (double b : betas) out.push_back(Configuration{top.box, {}, MeasureSpec::plain(b), seed, replica});

    const auto d = static_cast<std::size_t>(dim);
    std::vector<Coord> ca(d), cb(d), delta(d);
    for (const Edge& e : top.long_edges) {
        top.box.coords(e.a, ca);
        top.box.coords(e.b, cb);
        for (std::size_t i = 0; i < d; ++i) delta[i] = cb[i] - ca[i];
        const double j = kernel_at(delta).value;
        // U conditioned on U < p(β_max) is uniform on [0, p(β_max)).
        const double u = connection_prob(beta_max, j) * to_unit(edge_hash(key, ca, cb));
        for (std::size_t i = 0; i < betas.size(); ++i) {
            if (u < connection_prob(betas[i], j)) out[i].long_edges.push_back(e);
        }
    }
    return out;
}

std::vector<Edge> chi_edges(const Box& box, double eps, int k, std::uint64_t seed, std::uint64_t replica) {
    if (!(eps >= 0.0)) throw InvalidInput("chi: eps must be non-negative");
    if (k < 1 || k > 62) throw InvalidInput("chi: k must be in 1..62");
    std::vector<Edge> out;
    if (eps == 0.0) return out;
    auto rng = make_engine(mix(replica_key(seed, replica), static_cast<std::uint64_t>(k)), kStreamChi);
    const Coord lo = Coord{1} << (k - 1);
    const Coord hi = (Coord{1} << k) - 1;
    sample_classes(box, lo, hi, [&](Coord, double j) { return connection_prob(eps, j); }, rng, out);
    finalize(out);
    return out;
}

Configuration chi_augment(const Configuration& omega, double eps, int k, std::uint64_t seed) {
    if (!(eps >= 0.0)) throw InvalidInput("chi_augment: eps must be non-negative");
    const auto& m = omega.measure;
    if (m.kind != MeasureKind::mixed || m.k_threshold != k)
        throw InvalidInput("chi_augment: omega must be sampled under the mixed measure at level k");
    if (std::abs(m.beta2 - m.beta - eps) > 1e-12 * std::max(1.0, m.beta2))
        throw InvalidInput("chi_augment: omega's long-edge parameter must equal beta + eps");
    if (k < 1) throw InvalidInput("chi_augment: k must be positive");

    Configuration out{omega.box, {}, MeasureSpec::mixed(m.beta, m.beta2, k - 1), omega.seed, omega.replica};
    const auto chi = chi_edges(omega.box, eps, k, seed, omega.replica);
    out.long_edges.reserve(omega.long_edges.size() + chi.size());
    std::set_union(omega.long_edges.begin(), omega.long_edges.end(), chi.begin(), chi.end(),
                   std::back_inserter(out.long_edges));
    return out;
}

}  // namespace perclr
