#include "perclr/enumeration.hpp"

#include <algorithm>
#include <cmath>

#include "perclr/errors.hpp"
#include "perclr/graphs.hpp"
#include "perclr/kernel.hpp"

namespace perclr {

namespace {

double edge_kernel(const Box& box, const Edge& e) {
    return kernel_integral(box.point(e.a), box.point(e.b)).value;
}

// w(mask) = WL[mask & low] * WH[mask >> low_bits]
class WeightTable {
public:
    WeightTable(const FiniteModel& m, double beta) {
        const std::size_t size = m.size();
        low_bits_ = std::min<std::size_t>(size, 12);
        const std::size_t high_bits = size - low_bits_;
        low_.assign(std::size_t{1} << low_bits_, 1.0);
        high_.assign(std::size_t{1} << high_bits, 1.0);
        std::vector<double> p(size);
        for (std::size_t i = 0; i < size; ++i) p[i] = m.prob(i, beta);
        for (std::size_t mask = 0; mask < low_.size(); ++mask)
            for (std::size_t i = 0; i < low_bits_; ++i) low_[mask] *= ((mask >> i) & 1u) ? p[i] : 1.0 - p[i];
        for (std::size_t mask = 0; mask < high_.size(); ++mask)
            for (std::size_t i = 0; i < high_bits; ++i)
                high_[mask] *= ((mask >> i) & 1u) ? p[low_bits_ + i] : 1.0 - p[low_bits_ + i];
        low_mask_ = (std::uint32_t{1} << low_bits_) - 1u;
    }

    double operator()(std::uint32_t mask) const { return low_[mask & low_mask_] * high_[mask >> low_bits_]; }

private:
    std::size_t low_bits_ = 0;
    std::uint32_t low_mask_ = 0;
    std::vector<double> low_, high_;
};

Functional graph_functional(std::string name, std::function<double(const BoxGraph&)> g) {
    return Functional{std::move(name), [g = std::move(g)](const FiniteModel& m, std::uint32_t mask) {
                          const Configuration c = m.realize(mask);
                          return g(BoxGraph(c));
                      }};
}

}  // namespace

FiniteModel FiniteModel::full_box(Coord n, int dim) {
    FiniteModel m;
    m.box = Box(n, dim);
    for (VertexId a = 0; a < m.box.volume(); ++a)
        for (VertexId b = a + 1; b < m.box.volume(); ++b)
            if (m.box.inf_distance(a, b) >= 2) m.optional_edges.push_back({Edge(a, b), edge_kernel(m.box, Edge(a, b))});
    return m;
}

FiniteModel FiniteModel::with_edges(Coord n, int dim, const std::vector<Edge>& optional) {
    FiniteModel m;
    m.box = Box(n, dim);
    for (const Edge& e : optional) {
        if (e.b >= m.box.volume()) throw InvalidInput("optional edge outside box");
        if (m.box.inf_distance(e.a, e.b) < 2) throw InvalidInput("optional edges must have length >= 2");
        m.optional_edges.push_back({e, edge_kernel(m.box, e)});
    }
    return m;
}

std::vector<LatticePoint> FiniteModel::vertices() const {
    std::vector<LatticePoint> out;
    out.reserve(box.volume());
    for (VertexId v = 0; v < box.volume(); ++v) out.push_back(box.point(v));
    return out;
}

double FiniteModel::prob(std::size_t i, double beta) const {
    return connection_prob(beta, optional_edges.at(i).kernel);
}

double FiniteModel::prob_derivative(std::size_t i, double beta) const {
    return connection_prob_derivative(beta, optional_edges.at(i).kernel);
}

Configuration FiniteModel::realize(std::uint32_t mask) const {
    Configuration c;
    c.box = box;
    c.long_edges = forced_edges;
    for (std::size_t i = 0; i < optional_edges.size(); ++i)
        if ((mask >> i) & 1u) c.long_edges.push_back(optional_edges[i].edge);
    std::sort(c.long_edges.begin(), c.long_edges.end());
    c.long_edges.erase(std::unique(c.long_edges.begin(), c.long_edges.end()), c.long_edges.end());
    return c;
}

void FiniteModel::validate() const {
    if (optional_edges.size() > kMaxOptionalEdges)
        throw CapacityError("finite model has more than 24 optional edges");
    for (const auto& oe : optional_edges) {
        if (!std::isfinite(oe.kernel) || oe.kernel < 0.0)
            throw InvalidInput("optional edge kernel must be finite and non-negative");
    }
}

Functional distance_functional(VertexId a, VertexId b) {
    return graph_functional("D(" + std::to_string(a) + "," + std::to_string(b) + ")",
                            [a, b](const BoxGraph& g) { return static_cast<double>(graph_distance(g, a, b)); });
}

Functional neg_distance_functional(VertexId a, VertexId b) {
    return graph_functional("-D(" + std::to_string(a) + "," + std::to_string(b) + ")",
                            [a, b](const BoxGraph& g) { return -static_cast<double>(graph_distance(g, a, b)); });
}

Functional diameter_functional() {
    return graph_functional("diameter", [](const BoxGraph& g) { return static_cast<double>(diameter(g)); });
}

Functional cut_points_functional() {
    return graph_functional("cut_points", [](const BoxGraph& g) { return static_cast<double>(count_cut_points(g)); });
}

Functional constant_functional(double c) {
    return Functional{"const", [c](const FiniteModel&, std::uint32_t) { return c; }};
}

Functional edge_indicator_product(std::vector<std::size_t> edges) {
    return Functional{"edge_product", [edges = std::move(edges)](const FiniteModel&, std::uint32_t mask) {
                          for (std::size_t i : edges)
                              if (!((mask >> i) & 1u)) return 0.0;
                          return 1.0;
                      }};
}

Functional distance_at_most(VertexId a, VertexId b, std::int64_t r) {
    return graph_functional("1{D<=r}",
                            [a, b, r](const BoxGraph& g) { return graph_distance(g, a, b) <= r ? 1.0 : 0.0; });
}

FunctionalTable::FunctionalTable(const FiniteModel& model, const Functional& f) : model_(&model) {
    model.validate();
    const std::size_t states = std::size_t{1} << model.size();
    values_.resize(states);
    for (std::size_t mask = 0; mask < states; ++mask) values_[mask] = f.eval(model, static_cast<std::uint32_t>(mask));
}

double FunctionalTable::expectation(double beta) const {
    const WeightTable w(*model_, beta);
    long double s = 0.0L;
    for (std::size_t mask = 0; mask < values_.size(); ++mask) {
        s += static_cast<long double>(w(static_cast<std::uint32_t>(mask))) * values_[mask];
    }
    return static_cast<double>(s);
}

double FunctionalTable::russo_derivative(double beta) const {
    const WeightTable w(*model_, beta);
    long double total = 0.0L;
    for (std::size_t e = 0; e < model_->size(); ++e) {
        const std::uint32_t bit = std::uint32_t{1} << e;
        // Weight of the other edges' state: w(mask) + w(mask | e).
        long double inner = 0.0L;
        for (std::uint32_t mask = 0; mask < values_.size(); ++mask) {
            if (mask & bit) continue;
            const long double others = static_cast<long double>(w(mask)) + w(mask | bit);
            inner += others * (values_[mask | bit] - values_[mask]);
        }
        total += static_cast<long double>(model_->prob_derivative(e, beta)) * inner;
    }
    return static_cast<double>(total);
}

double exact_expectation(const FiniteModel& model, const Functional& f, double beta) {
    return FunctionalTable(model, f).expectation(beta);
}

double russo_derivative(const FiniteModel& model, const Functional& f, double beta) {
    return FunctionalTable(model, f).russo_derivative(beta);
}

RussoReport verify_russo(const FiniteModel& model, const Functional& f, double beta, double h) {
    if (!(beta >= 0.0)) throw InvalidInput("beta must be non-negative");
    if (!(h > 0.0)) throw InvalidInput("finite-difference step must be positive");
    const FunctionalTable table(model, f);
    RussoReport r;
    r.beta = beta;
    r.h = h;
    r.analytic = table.russo_derivative(beta);
    if (beta >= h) {
        r.finite_diff = (table.expectation(beta + h) - table.expectation(beta - h)) / (2.0 * h);
    } else {
        r.one_sided = true;
        r.finite_diff =
            (-3.0 * table.expectation(beta) + 4.0 * table.expectation(beta + h) - table.expectation(beta + 2.0 * h)) /
            (2.0 * h);
    }
    r.abs_error = std::abs(r.analytic - r.finite_diff);
    return r;
}

double lambda_small_beta_derivative(Coord n) {
    if (n < 3) throw InvalidInput("lambda_small_beta_derivative needs n >= 3");
    long double s = 0.0L;
    for (Coord k = n - 1; k >= 2; --k) {
        s += static_cast<long double>(n - k) * kernel_1d(k) * static_cast<long double>(k - 1);
    }
    return -static_cast<double>(s);
}

}  // namespace perclr
