#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "perclr/enumeration.hpp"
#include "perclr/errors.hpp"
#include "perclr/estimators.hpp"
#include "perclr/experiments.hpp"
#include "perclr/graphs.hpp"
#include "perclr/kernel.hpp"
#include "perclr/sampling.hpp"

namespace py = pybind11;
using namespace perclr;

namespace {

using Edges = std::vector<std::pair<VertexId, VertexId>>;

struct ConfigView {
    Coord n;
    int dim;
    std::string measure;
    double beta;
    std::uint64_t seed;
    std::uint64_t replica;
    Edges edges;
};

ConfigView wrap(const Configuration& c) {
    ConfigView p{c.box.side(), c.box.dim(), to_string(c.measure.kind), c.measure.beta, c.seed, c.replica, {}};
    for (const Edge& e : c.long_edges) p.edges.emplace_back(e.a, e.b);
    return p;
}

BoxGraph graph_of(Coord n, int dim, const Edges& edges) {
    std::vector<Edge> es;
    for (auto [a, b] : edges) es.emplace_back(a, b);
    return BoxGraph(Box(n, dim), es);
}

std::vector<LambdaEstimate> ladder_from(const std::vector<Coord>& sizes, const std::vector<double>& means, double beta) {
    if (sizes.size() != means.size()) throw InvalidInput("sizes and means differ in length");
    std::vector<LambdaEstimate> out;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        LambdaEstimate e;
        e.n = sizes[i];
        e.measure = MeasureSpec::plain(beta);
        e.mean = means[i];
        e.replicas = 1;
        out.push_back(e);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Long-range percolation core";
    m.attr("__version__") = PERCLR_VERSION;

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_MemoryError);
    py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

    py::class_<ConfigView>(m, "Configuration")
        .def_readonly("n", &ConfigView::n)
        .def_readonly("dim", &ConfigView::dim)
        .def_readonly("measure", &ConfigView::measure)
        .def_readonly("beta", &ConfigView::beta)
        .def_readonly("seed", &ConfigView::seed)
        .def_readonly("replica", &ConfigView::replica)
        .def_readonly("edges", &ConfigView::edges);

    m.def(
        "kernel_integral",
        [](const std::vector<Coord>& u, const std::vector<Coord>& v) { return kernel_integral(LatticePoint(u), LatticePoint(v)).value; },
        py::arg("u"), py::arg("v"));
    m.def(
        "connection_prob",
        [](double beta, const std::vector<Coord>& u, const std::vector<Coord>& v) {
            return connection_prob(beta, LatticePoint(u), LatticePoint(v));
        },
        py::arg("beta"), py::arg("u"), py::arg("v"));
    m.def(
        "connection_prob_derivative",
        [](double beta, const std::vector<Coord>& u, const std::vector<Coord>& v) {
            return connection_prob_derivative(beta, LatticePoint(u), LatticePoint(v));
        },
        py::arg("beta"), py::arg("u"), py::arg("v"));
    m.def(
        "block_kernel_sum",
        [](const std::vector<Coord>& u, const std::vector<Coord>& v, Coord n) {
            return block_kernel_sum(LatticePoint(u), LatticePoint(v), n);
        },
        py::arg("u"), py::arg("v"), py::arg("n"));
    m.def(
        "expected_degree", [](double beta, int dim) { return expected_degree(beta, dim).value; }, py::arg("beta"),
        py::arg("dim"));

    m.def(
        "sample",
        [](double beta, Coord n, int dim, std::uint64_t seed, std::uint64_t replica, const std::string& sampler) {
            if (sampler == "direct") return wrap(sample_direct(MeasureSpec::plain(beta), n, dim, seed, replica));
            if (sampler == "continuum") return wrap(sample_continuum(beta, n, dim, seed, replica));
            if (sampler == "fast") return wrap(sample_fast(MeasureSpec::plain(beta), n, dim, seed, replica));
            throw InvalidInput("unknown sampler: " + sampler);
        },
        py::arg("beta"), py::arg("n"), py::arg("dim") = 1, py::arg("seed") = 1, py::arg("replica") = 0,
        py::arg("sampler") = "fast");

    m.def(
        "graph_distance",
        [](const ConfigView& c, VertexId s, VertexId t) { return graph_distance(graph_of(c.n, c.dim, c.edges), s, t); },
        py::arg("config"), py::arg("s"), py::arg("t"));
    m.def(
        "corner_distance", [](const ConfigView& c) { return corner_distance(graph_of(c.n, c.dim, c.edges)); },
        py::arg("config"));
    m.def(
        "count_cut_points", [](const ConfigView& c) { return count_cut_points(graph_of(c.n, c.dim, c.edges)); },
        py::arg("config"));
    m.def("cutpoint_mean_exact", &cutpoint_mean_exact, py::arg("n"), py::arg("beta"));
    m.def("lambda_small_beta_derivative", &lambda_small_beta_derivative, py::arg("n"));

    m.def(
        "exact_distance_expectation",
        [](Coord n, double beta) {
            return exact_expectation(FiniteModel::full_box(n, 1), distance_functional(0, static_cast<VertexId>(n - 1)), beta);
        },
        py::arg("n"), py::arg("beta"));
    m.def(
        "verify_russo",
        [](Coord n, double beta, double h) {
            const auto r = verify_russo(FiniteModel::full_box(n, 1), distance_functional(0, static_cast<VertexId>(n - 1)),
                                        beta, h);
            return py::dict(py::arg("analytic") = r.analytic, py::arg("finite_diff") = r.finite_diff,
                            py::arg("abs_error") = r.abs_error, py::arg("one_sided") = r.one_sided);
        },
        py::arg("n"), py::arg("beta"), py::arg("h") = kRussoStep);

    m.def(
        "estimate_corner_distance",
        [](double beta, Coord n, int dim, std::int64_t replicas, std::uint64_t seed) {
            py::gil_scoped_release release;
            const auto e = estimate_corner_distance(MeasureSpec::plain(beta), n, dim, replicas, seed);
            return std::pair{e.mean, e.std_error};
        },
        py::arg("beta"), py::arg("n"), py::arg("dim") = 1, py::arg("replicas") = 200, py::arg("seed") = 1);
    m.def(
        "theta_inf",
        [](const std::vector<Coord>& sizes, const std::vector<double>& means, double beta) {
            return theta_inf(ladder_from(sizes, means, beta), 0).value;
        },
        py::arg("sizes"), py::arg("means"), py::arg("beta") = 0.0);
    m.def(
        "theta_slope",
        [](const std::vector<Coord>& sizes, const std::vector<double>& means, double beta) {
            return theta_slope(ladder_from(sizes, means, beta), 0).value;
        },
        py::arg("sizes"), py::arg("means"), py::arg("beta") = 0.0);

    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            ExperimentConfig c;
            from_json(nlohmann::json::parse(config_json), c);
            RunManifest manifest;
            {
                py::gil_scoped_release release;
                manifest = run(c);
            }
            return to_json(manifest).dump();
        },
        py::arg("config_json"));
}
