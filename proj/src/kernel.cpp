#include "perclr/kernel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <queue>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include "perclr/errors.hpp"

namespace perclr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Nodes and weights on [-1,1] by Newton iteration on P_m.
GaussRule gauss_legendre(int m) {
    GaussRule r{std::vector<double>(static_cast<std::size_t>(m)), std::vector<double>(static_cast<std::size_t>(m))};
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= m; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = m * (x * p1 - p0) / (x * x - 1.0);
        r.nodes[static_cast<std::size_t>(i)] = x;
        r.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

const GaussRule& rule_low() {
    static const GaussRule r = gauss_legendre(7);
    return r;
}
const GaussRule& rule_high() {
    static const GaussRule r = gauss_legendre(15);
    return r;
}

struct Cell {
    std::vector<double> lo, hi;
    double estimate = 0.0;
    double error = 0.0;
    int depth = 0;
    bool operator<(const Cell& o) const { return error < o.error; }
};

class TentIntegrand {
public:
    explicit TentIntegrand(std::span<const Coord> delta)
        : delta_(delta.begin(), delta.end()), dim_(static_cast<int>(delta.size())) {}

    double operator()(std::span<const double> z) const {
        double weight = 1.0;
        double r2 = 0.0;
        for (int i = 0; i < dim_; ++i) {
            weight *= 1.0 - std::abs(z[static_cast<std::size_t>(i)]);
            const double x = static_cast<double>(delta_[static_cast<std::size_t>(i)]) + z[static_cast<std::size_t>(i)];
            r2 += x * x;
        }
        return weight / std::pow(r2, dim_);
    }

    int dim() const { return dim_; }

private:
    std::vector<Coord> delta_;
    int dim_;
};

double tensor_rule(const TentIntegrand& f, const Cell& c, const GaussRule& rule) {
    const int d = f.dim();
    const auto m = rule.nodes.size();
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> z(static_cast<std::size_t>(d));
    double half_vol = 1.0;
    for (int i = 0; i < d; ++i) half_vol *= 0.5 * (c.hi[static_cast<std::size_t>(i)] - c.lo[static_cast<std::size_t>(i)]);
    double sum = 0.0;
    for (;;) {
        double w = 1.0;
        for (int i = 0; i < d; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            const double mid = 0.5 * (c.lo[ii] + c.hi[ii]);
            const double half = 0.5 * (c.hi[ii] - c.lo[ii]);
            z[ii] = mid + half * rule.nodes[idx[ii]];
            w *= rule.weights[idx[ii]];
        }
        sum += w * f(z);
        int i = 0;
        while (i < d && ++idx[static_cast<std::size_t>(i)] == m) idx[static_cast<std::size_t>(i++)] = 0;
        if (i == d) break;
    }
    return sum * half_vol;
}

void evaluate(const TentIntegrand& f, Cell& c) {
    const double lo = tensor_rule(f, c, rule_low());
    c.estimate = tensor_rule(f, c, rule_high());
    c.error = std::abs(c.estimate - lo);
}

// ---- cache --------------------------------------------------------------

struct VecHash {
    std::size_t operator()(const std::vector<Coord>& v) const noexcept {
        std::size_t h = v.size();
        for (Coord c : v) h = h * 1000003u ^ std::hash<Coord>{}(c);
        return h;
    }
};

struct KernelCache {
    std::shared_mutex mutex;
    std::unordered_map<std::vector<Coord>, KernelValue, VecHash> map;
    std::atomic<std::size_t> hits{0};
    std::atomic<std::size_t> misses{0};
};

KernelCache& cache() {
    static KernelCache c;
    return c;
}

}  // namespace

double kernel_1d(Coord k) {
    k = k < 0 ? -k : k;
    if (k < 2) throw InvalidInput("closed-form kernel needs |k| >= 2");
    const double k2 = static_cast<double>(k) * static_cast<double>(k);
    return std::log1p(1.0 / (k2 - 1.0));
}

KernelValue kernel_quadrature(std::span<const Coord> delta, double abs_tol) {
    if (delta.empty()) throw InvalidInput("empty displacement");
    if (inf_norm(delta) < 2) throw InvalidInput("quadrature needs ||delta||_inf >= 2");
    const TentIntegrand f(delta);
    const int d = f.dim();

    // Orthant split keeps the tent weight polynomial on every cell.
    std::priority_queue<Cell> cells;
    double total = 0.0, total_err = 0.0;
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
        Cell c;
        for (int i = 0; i < d; ++i) {
            const bool pos = (mask >> i) & 1u;
            c.lo.push_back(pos ? 0.0 : -1.0);
            c.hi.push_back(pos ? 1.0 : 0.0);
        }
        evaluate(f, c);
        total += c.estimate;
        total_err += c.error;
        cells.push(std::move(c));
    }

    constexpr std::size_t kMaxCells = 200000;
    while (total_err > abs_tol) {
        if (cells.size() > kMaxCells) {
            throw NumericError("kernel quadrature did not converge", total, total_err);
        }
        Cell worst = cells.top();
        cells.pop();
        total -= worst.estimate;
        total_err -= worst.error;
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            Cell c;
            c.depth = worst.depth + 1;
            for (int i = 0; i < d; ++i) {
                const auto ii = static_cast<std::size_t>(i);
                const double mid = 0.5 * (worst.lo[ii] + worst.hi[ii]);
                const bool upper = (mask >> i) & 1u;
                c.lo.push_back(upper ? mid : worst.lo[ii]);
                c.hi.push_back(upper ? worst.hi[ii] : mid);
            }
            evaluate(f, c);
            total += c.estimate;
            total_err += c.error;
            cells.push(std::move(c));
        }
    }
    // Final sums from the cells themselves, free of add/subtract drift.
    total = 0.0;
    total_err = 0.0;
    while (!cells.empty()) {
        total += cells.top().estimate;
        total_err += cells.top().error;
        cells.pop();
    }
    return KernelValue{total, false, std::max(total_err, 0.0)};
}

KernelValue kernel_at(std::span<const Coord> delta) {
    if (delta.empty()) throw InvalidInput("empty displacement");
    const Coord m = inf_norm(delta);
    if (m == 0) throw InvalidInput("kernel of a vertex with itself (u == v)");
    if (m == 1) return KernelValue{kInf, true, 0.0};
    if (delta.size() == 1) return KernelValue{kernel_1d(delta[0]), true, 0.0};

    auto key = Displacement::of(delta).delta;
    auto& c = cache();
    {
        std::shared_lock lock(c.mutex);
        if (auto it = c.map.find(key); it != c.map.end()) {
            c.hits.fetch_add(1, std::memory_order_relaxed);
            return it->second;
        }
    }
    c.misses.fetch_add(1, std::memory_order_relaxed);
    // Computed outside the lock; concurrent writers produce identical values.
    const KernelValue v = kernel_quadrature(key);
    std::unique_lock lock(c.mutex);
    return c.map.try_emplace(std::move(key), v).first->second;
}

KernelValue kernel_integral(const LatticePoint& u, const LatticePoint& v) {
    if (u.dim() == 0) throw InvalidInput("zero-dimensional lattice point");
    if (u == v) throw InvalidInput("kernel_integral requires u != v");
    const auto d = displacement(u, v);
    return kernel_at(d);
}

double connection_prob(double beta, double kernel) {
    if (!(beta >= 0.0)) throw InvalidInput("beta must be non-negative");
    if (kernel == kInf) return 1.0;
    if (beta == 0.0) return 0.0;
    return -std::expm1(-beta * kernel);
}

double connection_prob(double beta, const LatticePoint& u, const LatticePoint& v) {
    return connection_prob(beta, kernel_integral(u, v).value);
}

double connection_prob_derivative(double beta, double kernel) {
    if (!(beta >= 0.0)) throw InvalidInput("beta must be non-negative");
    if (kernel == kInf) throw InvalidInput("derivative undefined on nearest-neighbour edges");
    return kernel * std::exp(-beta * kernel);
}

double connection_prob_derivative(double beta, const LatticePoint& u, const LatticePoint& v) {
    return connection_prob_derivative(beta, kernel_integral(u, v).value);
}

double block_kernel_sum(const LatticePoint& u, const LatticePoint& v, Coord n) {
    if (n < 1) throw InvalidInput("block side must be positive");
    const auto base = displacement(u, v);
    if (base.empty()) throw InvalidInput("zero-dimensional lattice point");
    if (inf_norm(base) < 2) throw InvalidInput("blocks must be non-adjacent (||u-v||_inf >= 2)");
    const auto d = base.size();

    // Group the n^{2d} pairs by inner offset o = y_off - x_off, which occurs
    // Π(n - |o_i|) times.
    std::vector<Coord> o(d, -(n - 1));
    std::vector<Coord> delta(d);
    long double sum = 0.0L;
    for (;;) {
        long double mult = 1.0L;
        for (std::size_t i = 0; i < d; ++i) {
            delta[i] = n * base[i] + o[i];
            mult *= static_cast<long double>(n - (o[i] < 0 ? -o[i] : o[i]));
        }
        sum += mult * static_cast<long double>(kernel_at(delta).value);
        std::size_t i = 0;
        while (i < d && ++o[i] == n) o[i++] = -(n - 1);
        if (i == d) break;
    }
    return static_cast<double>(sum);
}

namespace {

// Signed-permutation multiplicity of a sorted non-negative displacement.
double orbit_size(const std::vector<Coord>& c) {
    double perms = 1.0;
    for (std::size_t i = 2; i <= c.size(); ++i) perms *= static_cast<double>(i);
    std::size_t run = 1;
    for (std::size_t i = 1; i <= c.size(); ++i) {
        if (i < c.size() && c[i] == c[i - 1]) {
            ++run;
        } else {
            for (std::size_t r = 2; r <= run; ++r) perms /= static_cast<double>(r);
            run = 1;
        }
    }
    for (Coord x : c)
        if (x != 0) perms *= 2.0;
    return perms;
}

}  // namespace

DegreeEstimate expected_degree(double beta, int dim, Coord radius) {
    if (!(beta >= 0.0)) throw InvalidInput("beta must be non-negative");
    if (dim < 1) throw InvalidInput("dimension must be positive");
    DegreeEstimate out;
    out.value = std::pow(3.0, dim) - 1.0;
    if (dim == 1) {
        out.radius = radius > 0 ? radius : 1'000'000;
        long double s = 0.0L;
        for (Coord k = out.radius; k >= 2; --k) s += connection_prob(beta, kernel_1d(k));
        out.value += static_cast<double>(2.0L * s);
        out.tail_bound = 2.0 * beta / static_cast<double>(out.radius - 1);
        return out;
    }

    out.radius = radius > 0 ? radius : (dim == 2 ? 256 : 32);
    out.tail_bound = 2.0 * std::pow(3.0, dim - 1) * std::pow(4.0, dim) * beta / std::pow(static_cast<double>(out.radius), dim);
    if (beta == 0.0) return out;

    // Sorted non-negative displacements c_0 ≤ ... ≤ c_{d-1}, max in [2,R].
    const auto d = static_cast<std::size_t>(dim);
    std::vector<Coord> c(d, 0);
    long double s = 0.0L;
    double qerr = 0.0;
    for (;;) {
        if (c[d - 1] >= 2) {
            const auto kv = kernel_at(c);
            const double w = orbit_size(c);
            s += w * connection_prob(beta, kv.value);
            qerr += w * beta * kv.quad_error;
        }
        // next non-decreasing tuple
        std::size_t i = 0;
        while (i < d) {
            const Coord cap = (i + 1 < d) ? c[i + 1] : out.radius;
            if (c[i] < cap) {
                ++c[i];
                for (std::size_t j = 0; j < i; ++j) c[j] = 0;
                break;
            }
            ++i;
        }
        if (i == d) break;
    }
    out.value += static_cast<double>(s);
    out.quad_error = qerr;
    return out;
}

KernelCacheStats kernel_cache_stats() {
    auto& c = cache();
    std::shared_lock lock(c.mutex);
    return {c.map.size(), c.hits.load(), c.misses.load()};
}

void kernel_cache_clear() {
    auto& c = cache();
    std::unique_lock lock(c.mutex);
    c.map.clear();
    c.hits = 0;
    c.misses = 0;
}

void kernel_cache_save(const std::filesystem::path& path) {
    auto& c = cache();
    std::vector<std::pair<std::vector<Coord>, KernelValue>> rows;
    {
        std::shared_lock lock(c.mutex);
        rows.assign(c.map.begin(), c.map.end());
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open kernel cache file for writing: " + path.string());
    out << "dim,delta,value,quad_error\n";
    char buf[64];
    for (const auto& [key, kv] : rows) {
        out << key.size() << ',';
        for (std::size_t i = 0; i < key.size(); ++i) out << (i ? " " : "") << key[i];
        std::snprintf(buf, sizeof buf, ",%.17g", kv.value);
        out << buf;
        std::snprintf(buf, sizeof buf, ",%.17g\n", kv.quad_error);
        out << buf;
    }
}

std::size_t kernel_cache_load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open kernel cache file: " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "dim,delta,value,quad_error") throw InvalidInput("kernel cache: unexpected header");
    std::size_t loaded = 0;
    auto& c = cache();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string dim_s, delta_s, value_s, err_s;
        if (!std::getline(row, dim_s, ',') || !std::getline(row, delta_s, ',') || !std::getline(row, value_s, ',') ||
            !std::getline(row, err_s))
            throw InvalidInput("kernel cache: malformed row: " + line);
        std::vector<Coord> key;
        std::stringstream ds(delta_s);
        Coord x;
        while (ds >> x) key.push_back(x);
        if (key.size() != std::stoul(dim_s)) throw InvalidInput("kernel cache: dimension mismatch: " + line);
        auto canon = Displacement::of(key).delta;
        if (canon != key) throw InvalidInput("kernel cache: non-canonical displacement: " + line);
        std::unique_lock lock(c.mutex);
        c.map.insert_or_assign(std::move(key), KernelValue{std::stod(value_s), false, std::stod(err_s)});
        ++loaded;
    }
    return loaded;
}

}  // namespace perclr
