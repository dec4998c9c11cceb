#include "perclr/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "perclr/errors.hpp"
#include "perclr/graphs.hpp"
#include "perclr/kernel.hpp"
#include "perclr/parallel.hpp"
#include "perclr/rng.hpp"

#ifndef PERCLR_VERSION
#define PERCLR_VERSION "0.0.0"
#endif

namespace perclr {

using nlohmann::json;

namespace {

const std::map<Experiment, std::string>& experiment_names() {
    static const std::map<Experiment, std::string> names = {
        {Experiment::theta_curve, "theta_curve"},       {Experiment::small_beta_slope, "small_beta_slope"},
        {Experiment::monotone_sweep, "monotone_sweep"}, {Experiment::continuity, "continuity"},
        {Experiment::russo_verify, "russo_verify"},     {Experiment::self_similarity, "self_similarity"},
        {Experiment::cutpoints, "cutpoints"},           {Experiment::estimate, "estimate"},
        {Experiment::sample, "sample"}};
    return names;
}

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

bool is_power_of_two(Coord n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_exact(Coord n) {
    int k = 0;
    while ((Coord{1} << k) < n) ++k;
    return k;
}

/// Collects outputs and task seeds for one run.
class RunContext {
public:
    explicit RunContext(const ExperimentConfig& c) : start_(std::chrono::steady_clock::now()) {
        manifest_.config = c;
        manifest_.version = PERCLR_VERSION;
        dir_ = c.output_path;
        std::filesystem::create_directories(dir_);
    }

    std::uint64_t seed_for(const std::string& task) {
        const auto s = task_seed(manifest_.config.seed, task);
        manifest_.task_seeds.emplace_back(task, s);
        return s;
    }

    void write(const std::string& name, const std::string& content) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw InvalidInput("cannot write output file " + (dir_ / name).string());
        out << content;
        manifest_.outputs.push_back({name, fnv1a64_hex(content)});
    }

    RunManifest finish() {
        manifest_.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::ofstream out(dir_ / "manifest.json");
        out << to_json(manifest_).dump(2) << '\n';
        return manifest_;
    }

private:
    RunManifest manifest_;
    std::filesystem::path dir_;
    std::chrono::steady_clock::time_point start_;
};

void require_valid(const ExperimentConfig& c) {
    auto problems = validate(c);
    if (!problems.empty()) throw ConfigError(std::move(problems));
}

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<Coord> sorted_unique(std::vector<Coord> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Coupled corner-distance estimates est[beta][size] sharing Harris uniforms
// across betas for each replica.
std::vector<std::vector<LambdaEstimate>> coupled_ladder(const ExperimentConfig& c, const std::vector<double>& betas,
                                                        const std::vector<Coord>& sizes, RunContext& ctx) {
    std::vector<std::vector<LambdaEstimate>> est(betas.size(), std::vector<LambdaEstimate>(sizes.size()));
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const Coord n = sizes[si];
        const auto seed = ctx.seed_for("ladder/n=" + std::to_string(n));
        std::vector<std::vector<double>> d(static_cast<std::size_t>(c.replicas), std::vector<double>(betas.size()));
        parallel_for(d.size(), c.workers, [&](std::size_t r) {
            const auto configs = coupled_sweep(betas, n, c.dim, seed, r);
            for (std::size_t b = 0; b < betas.size(); ++b)
                d[r][b] = static_cast<double>(corner_distance(BoxGraph(configs[b]))) + 1.0;
        });
        for (std::size_t b = 0; b < betas.size(); ++b) {
            auto& e = est[b][si];
            e.n = n;
            e.dim = c.dim;
            e.measure = MeasureSpec::plain(betas[b]);
            e.seed = seed;
            e.pair_policy = PairPolicy::corner;
            for (const auto& row : d) e.samples.push_back(row[b]);
            long double s = 0.0L;
            for (double v : e.samples) s += v;
            e.mean = static_cast<double>(s / static_cast<long double>(e.samples.size()));
            long double ss = 0.0L;
            for (double v : e.samples) ss += (v - e.mean) * (v - e.mean);
            e.std_error = std::sqrt(static_cast<double>(ss / static_cast<long double>(e.samples.size() - 1)) /
                                    static_cast<double>(e.samples.size()));
            e.replicas = c.replicas;
        }
    }
    return est;
}

}  // namespace

std::string to_string(Experiment e) { return experiment_names().at(e); }

Experiment experiment_from_string(const std::string& s) {
    for (const auto& [k, v] : experiment_names())
        if (v == s) return k;
    throw InvalidInput("unknown experiment: " + s);
}

std::uint64_t default_seed(Experiment e) {
    switch (e) {
        case Experiment::theta_curve: return 20230101;
        case Experiment::small_beta_slope: return 20230102;
        case Experiment::monotone_sweep: return 20230103;
        case Experiment::continuity: return 20230104;
        case Experiment::russo_verify: return 20230105;
        case Experiment::self_similarity: return 20230106;
        case Experiment::cutpoints: return 20230107;
        case Experiment::estimate: return 20230108;
        case Experiment::sample: return 20230109;
    }
    return 1;
}

void to_json(json& j, const ExperimentConfig& c) {
    j = json{{"experiment", to_string(c.experiment)},
             {"dim", c.dim},
             {"sizes", c.sizes},
             {"betas", c.betas},
             {"replicas", c.replicas},
             {"seed", c.seed},
             {"output_path", c.output_path},
             {"workers", c.workers},
             {"suite", c.suite},
             {"sampler", c.sampler},
             {"pair_policy", to_string(c.pair_policy)}};
    j["eps"] = c.eps ? json(*c.eps) : json(nullptr);
}

void from_json(const json& j, ExperimentConfig& c) {
    std::vector<std::string> problems;
    if (!j.is_object()) throw ConfigError({"config: must be a JSON object"});
    ExperimentConfig out;
    auto field = [&](const char* key, auto& dst) {
        if (!j.contains(key)) return;
        try {
            j.at(key).get_to(dst);
        } catch (const json::exception& e) {
            problems.push_back(std::string(key) + ": " + e.what());
        }
    };
    std::string experiment;
    if (!j.contains("experiment")) {
        problems.push_back("experiment: missing");
    } else {
        field("experiment", experiment);
        try {
            out.experiment = experiment_from_string(experiment);
        } catch (const InvalidInput& e) {
            problems.push_back(std::string("experiment: ") + e.what());
        }
    }
    out.seed = default_seed(out.experiment);
    field("dim", out.dim);
    field("sizes", out.sizes);
    field("betas", out.betas);
    if (j.contains("eps") && !j.at("eps").is_null()) {
        std::vector<double> eps;
        if (j.at("eps").is_number()) {
            eps.push_back(j.at("eps").get<double>());
        } else {
            field("eps", eps);
        }
        out.eps = eps;
    }
    field("replicas", out.replicas);
    field("seed", out.seed);
    field("output_path", out.output_path);
    field("workers", out.workers);
    field("suite", out.suite);
    field("sampler", out.sampler);
    if (j.contains("pair_policy")) {
        std::string pp;
        field("pair_policy", pp);
        try {
            if (!pp.empty()) out.pair_policy = pair_policy_from_string(pp);
        } catch (const InvalidInput& e) {
            problems.push_back(std::string("pair_policy: ") + e.what());
        }
    }
    static const std::set<std::string> known = {"experiment", "dim",     "sizes",   "betas",      "eps",
                                                "replicas",   "seed",    "workers", "output_path", "suite",
                                                "sampler",    "pair_policy"};
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) problems.push_back(k + ": unknown field");
    if (!problems.empty()) throw ConfigError(std::move(problems));
    c = std::move(out);
}

std::vector<std::string> validate(const ExperimentConfig& c) {
    std::vector<std::string> p;
    const auto e = c.experiment;
    const bool needs_sizes = e != Experiment::russo_verify;
    const bool needs_betas = e != Experiment::russo_verify;
    const bool d1_only = e == Experiment::small_beta_slope || e == Experiment::continuity || e == Experiment::cutpoints;

    if (c.dim < 1 || c.dim > 3) p.push_back("dim: must be in 1..3");
    if (d1_only && c.dim != 1) p.push_back("dim: " + to_string(e) + " requires dim = 1");
    if (e == Experiment::self_similarity && c.dim > 2) p.push_back("dim: self_similarity supports dim <= 2");
    if (c.replicas < 2) p.push_back("replicas: must be >= 2");
    if (c.output_path.empty()) p.push_back("output_path: must not be empty");
    if (c.workers < 0) p.push_back("workers: must be >= 0");

    if (needs_sizes && c.sizes.empty()) p.push_back("sizes: must not be empty");
    for (std::size_t i = 0; i < c.sizes.size(); ++i) {
        const std::string f = "sizes[" + std::to_string(i) + "]: ";
        const Coord n = c.sizes[i];
        const Coord min_n = e == Experiment::self_similarity ? 1 : (e == Experiment::cutpoints ? 3 : 2);
        if (n < min_n) {
            p.push_back(f + "must be >= " + std::to_string(min_n));
            continue;
        }
        const long double vol = std::pow(static_cast<long double>(n), c.dim);
        switch (e) {
            case Experiment::continuity:
                if (!is_power_of_two(n) || n < 4 || n > (Coord{1} << 14))
                    p.push_back(f + "continuity box side must be a power of two in [4, 2^14]");
                break;
            case Experiment::small_beta_slope:
                if (n < 3) p.push_back(f + "must be >= 3");
                [[fallthrough]];
            case Experiment::theta_curve:
            case Experiment::monotone_sweep:
            case Experiment::cutpoints:
                if (vol > (1LL << 24)) p.push_back(f + "box exceeds 2^24 vertices");
                break;
            case Experiment::estimate:
                if (c.pair_policy == PairPolicy::full_max && vol > 256)
                    p.push_back(f + "full_max pair policy needs n^dim <= 256");
                if (vol > (1LL << 24)) p.push_back(f + "box exceeds 2^24 vertices");
                break;
            case Experiment::sample:
                if (c.sampler != "fast" && vol * vol / 2 > static_cast<long double>(kMaxDirectPairs))
                    p.push_back(f + "box too large for the " + c.sampler + " sampler (> 1e8 pairs)");
                if (vol > (1LL << 24)) p.push_back(f + "box exceeds 2^24 vertices");
                break;
            case Experiment::self_similarity:
                if (n > 8) p.push_back(f + "block side must be <= 8");
                break;
            case Experiment::russo_verify: break;
        }
    }
    if (e == Experiment::small_beta_slope || e == Experiment::theta_curve) {
        const auto uniq = sorted_unique(c.sizes);
        if (uniq.size() != c.sizes.size()) p.push_back("sizes: must be distinct");
        if (e == Experiment::small_beta_slope && uniq.size() < 3) p.push_back("sizes: slope fit needs >= 3 sizes");
    }

    if (needs_betas && c.betas.empty()) p.push_back("betas: must not be empty");
    for (std::size_t i = 0; i < c.betas.size(); ++i) {
        const std::string f = "betas[" + std::to_string(i) + "]: ";
        const double b = c.betas[i];
        if (!std::isfinite(b) || b < 0.0) {
            p.push_back(f + "must be finite and >= 0");
            continue;
        }
        if (e == Experiment::small_beta_slope && (b <= 0.0 || b > 0.3)) p.push_back(f + "must be in (0, 0.3]");
        if (e == Experiment::monotone_sweep && i > 0 && b < c.betas[i - 1]) p.push_back(f + "betas must be ascending");
    }

    if (e == Experiment::continuity) {
        if (!c.eps || c.eps->empty()) p.push_back("eps: continuity needs a non-empty eps grid");
    }
    if (c.eps) {
        for (std::size_t i = 0; i < c.eps->size(); ++i) {
            const double x = (*c.eps)[i];
            if (!std::isfinite(x) || x < 0.0 || x > 1.0)
                p.push_back("eps[" + std::to_string(i) + "]: must be in [0, 1]");
        }
    }
    if (e == Experiment::russo_verify && c.suite != "default" && c.suite != "quick")
        p.push_back("suite: must be 'default' or 'quick'");
    if (e == Experiment::sample && c.sampler != "direct" && c.sampler != "fast" && c.sampler != "continuum")
        p.push_back("sampler: must be direct, fast or continuum");
    return p;
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid experiment config"), problems_(std::move(problems)) {}

json to_json(const RunManifest& m) {
    json seeds = json::array();
    for (const auto& [task, s] : m.task_seeds) seeds.push_back({{"task", task}, {"seed", s}});
    json outputs = json::array();
    for (const auto& o : m.outputs) outputs.push_back({{"file", o.name}, {"fnv1a64", o.digest}});
    json cfg;
    to_json(cfg, m.config);
    return json{{"config", cfg},
                {"version", m.version},
                {"wall_seconds", m.wall_seconds},
                {"task_seeds", seeds},
                {"outputs", outputs}};
}

std::uint64_t task_seed(std::uint64_t seed, const std::string& task) { return mix(seed, fnv1a64(task)); }

std::string fnv1a64_hex(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string estimates_csv_row(const LambdaEstimate& e) {
    std::ostringstream s;
    s << num(e.measure.beta) << ',' << e.n << ',' << e.dim << ',' << to_string(e.measure.kind) << ','
      << e.measure.k_threshold << ',' << num(e.mean) << ',' << num(e.std_error) << ',' << e.replicas << ','
      << to_string(e.pair_policy) << ',' << e.seed;
    return s.str();
}

std::string theta_csv_row(const ThetaEstimate& t, std::uint64_t seed, std::int64_t replicas) {
    std::ostringstream s;
    s << num(t.beta) << ',' << to_string(t.method) << ',' << num(t.value) << ',' << num(t.ci_low) << ','
      << num(t.ci_high) << ',';
    for (std::size_t i = 0; i < t.sizes_used.size(); ++i) s << (i ? ";" : "") << t.sizes_used[i];
    s << ',' << seed << ',' << replicas;
    return s.str();
}

json configuration_json(const Configuration& c) {
    json edges = json::array();
    for (const Edge& e : c.long_edges) edges.push_back({c.box.point(e.a).coords, c.box.point(e.b).coords});
    json measure{{"kind", to_string(c.measure.kind)}, {"beta", c.measure.beta}};
    if (c.measure.kind == MeasureKind::mixed) {
        measure["beta2"] = c.measure.beta2;
        measure["k_threshold"] = c.measure.k_threshold;
    }
    return json{{"measure", measure}, {"n", c.box.side()}, {"dim", c.box.dim()}, {"seed", c.seed},
                {"replica", c.replica}, {"edges", edges}};
}

// ---- recipes -------------------------------------------------------------

RunManifest run_theta_curve(const ExperimentConfig& c) {
    require_valid(c);
    RunContext ctx(c);
    const auto betas = sorted_unique(c.betas);
    const auto sizes = sorted_unique(c.sizes);
    const auto est = coupled_ladder(c, betas, sizes, ctx);
    const auto boot_seed = ctx.seed_for("bootstrap");

    std::string estimates = std::string(kEstimatesHeader) + "\n";
    std::string theta = std::string(kThetaHeader) + "\n";
    for (std::size_t b = 0; b < betas.size(); ++b) {
        for (const auto& e : est[b]) estimates += estimates_csv_row(e) + "\n";
        theta += theta_csv_row(theta_inf(est[b], kBootstrapResamples, boot_seed), c.seed, c.replicas) + "\n";
        if (sizes.size() >= 3)
            theta += theta_csv_row(theta_slope(est[b], kBootstrapResamples, boot_seed), c.seed, c.replicas) + "\n";
    }
    ctx.write("estimates.csv", estimates);
    ctx.write("theta.csv", theta);
    return ctx.finish();
}

RunManifest run_small_beta(const ExperimentConfig& c) {
    require_valid(c);
    RunContext ctx(c);
    const auto betas = sorted_unique(c.betas);
    const auto sizes = sorted_unique(c.sizes);
    const auto est = coupled_ladder(c, betas, sizes, ctx);
    const auto boot_seed = ctx.seed_for("bootstrap");

    std::string estimates = std::string(kEstimatesHeader) + "\n";
    std::string theta = std::string(kThetaHeader) + "\n";
    std::string small = "beta,theta_slope,ci_low,ci_high,stderr,deficit_ratio,seed,replicas\n";
    for (std::size_t b = 0; b < betas.size(); ++b) {
        for (const auto& e : est[b]) estimates += estimates_csv_row(e) + "\n";
        const auto t = theta_slope(est[b], kBootstrapResamples, boot_seed);
        theta += theta_csv_row(t, c.seed, c.replicas) + "\n";
        small += num(betas[b]) + "," + num(t.value) + "," + num(t.ci_low) + "," + num(t.ci_high) + "," +
                 num(t.std_error) + "," + num((1.0 - t.value) / betas[b]) + "," + std::to_string(c.seed) + "," +
                 std::to_string(c.replicas) + "\n";
    }
    std::string exact = "n,derivative,normalized\n";
    for (Coord n : sizes) {
        const double d = lambda_small_beta_derivative(n);
        exact += std::to_string(n) + "," + num(d) + "," +
                 num(d / (static_cast<double>(n) * std::log(static_cast<double>(n)))) + "\n";
    }
    ctx.write("estimates.csv", estimates);
    ctx.write("theta.csv", theta);
    ctx.write("small_beta.csv", small);
    ctx.write("exact_derivative.csv", exact);
    return ctx.finish();
}

RunManifest run_monotone_sweep(const ExperimentConfig& c) {
    require_valid(c);
    RunContext ctx(c);
    std::string estimates = std::string(kEstimatesHeader) + "\n";
    std::string sweep = "beta_lo,beta_hi,n,diff_mean,diff_stderr,z,seed,replicas\n";
    for (Coord n : c.sizes) {
        const auto seed = ctx.seed_for("sweep/n=" + std::to_string(n));
        const auto res = monotone_sweep(c.betas, n, c.dim, c.replicas, seed, c.workers);
        for (const auto& e : res.estimates) estimates += estimates_csv_row(e) + "\n";
        for (std::size_t i = 0; i < res.diff_mean.size(); ++i) {
            const double z = res.diff_stderr[i] > 0 ? res.diff_mean[i] / res.diff_stderr[i] : 0.0;
            sweep += num(c.betas[i]) + "," + num(c.betas[i + 1]) + "," + std::to_string(n) + "," +
                     num(res.diff_mean[i]) + "," + num(res.diff_stderr[i]) + "," + num(z) + "," +
                     std::to_string(seed) + "," + std::to_string(c.replicas) + "\n";
        }
    }
    ctx.write("estimates.csv", estimates);
    ctx.write("sweep.csv", sweep);
    return ctx.finish();
}

RunManifest run_continuity(const ExperimentConfig& c) {
    require_valid(c);
    RunContext ctx(c);
    std::string terms = std::string(kTelescopeHeader) + "\n";
    std::string summary =
        "beta,eps,N,telescoped_sum,telescoped_stderr,direct_log_diff,direct_stderr,z,identity_ok,seed,replicas\n";
    for (double beta : c.betas) {
        for (double eps : *c.eps) {
            for (Coord side : c.sizes) {
                const int levels = log2_exact(side);
                const auto seed =
                    ctx.seed_for("continuity/beta=" + num(beta) + "/eps=" + num(eps) + "/N=" + std::to_string(levels));
                const auto r = continuity_telescope(beta, eps, levels, c.replicas, seed, c.workers);
                for (const auto& t : r.terms) {
                    terms += num(beta) + "," + num(eps) + "," + std::to_string(levels) + "," + std::to_string(t.k) +
                             "," + num(t.log_ratio) + "," + num(t.std_error) + "," + std::to_string(c.replicas) +
                             "," + std::to_string(seed) + "\n";
                }
                const double se = std::hypot(r.telescoped_stderr, r.direct_stderr);
                const double z = se > 0 ? (r.telescoped_sum - r.direct_log_diff) / se : 0.0;
                summary += num(beta) + "," + num(eps) + "," + std::to_string(levels) + "," + num(r.telescoped_sum) +
                           "," + num(r.telescoped_stderr) + "," + num(r.direct_log_diff) + "," +
                           num(r.direct_stderr) + "," + num(z) + "," + (std::abs(z) <= 3.0 ? "1" : "0") + "," +
                           std::to_string(seed) + "," + std::to_string(c.replicas) + "\n";
            }
        }
    }
    ctx.write("telescope.csv", terms);
    ctx.write("telescope_summary.csv", summary);
    return ctx.finish();
}

std::vector<RussoCase> russo_suite(const std::string& name, std::uint64_t seed) {
    std::vector<RussoCase> cases;
    cases.push_back({"path3+{0,2}:D(0,2)", FiniteModel::with_edges(3, 1, {Edge(0, 2)}), distance_functional(0, 2)});
    cases.push_back({"box4:D(0,3)", FiniteModel::full_box(4, 1), distance_functional(0, 3)});
    cases.push_back({"box5:diameter", FiniteModel::full_box(5, 1), diameter_functional()});
    cases.push_back({"box5:cut_points", FiniteModel::full_box(5, 1), cut_points_functional()});
    cases.push_back({"box5:1{D(0,4)<=2}", FiniteModel::full_box(5, 1), distance_at_most(0, 4, 2)});
    if (name == "quick") return cases;

    auto rng = make_engine(seed, 0x7275736fULL);
    for (int i = 0; i < 50; ++i) {
        const Coord n = std::uniform_int_distribution<Coord>(3, 8)(rng);
        std::vector<Edge> pairs;
        for (VertexId a = 0; a < static_cast<VertexId>(n); ++a)
            for (VertexId b = a + 2; b < static_cast<VertexId>(n); ++b) pairs.emplace_back(a, b);
        std::shuffle(pairs.begin(), pairs.end(), rng);
        const auto m = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(8, pairs.size()))(rng);
        std::vector<Edge> optional(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(m));
        auto model = FiniteModel::with_edges(n, 1, optional);
        // Occasionally force one of the remaining long edges open.
        if (pairs.size() > m && std::uniform_int_distribution<int>(0, 2)(rng) == 0)
            model.forced_edges.push_back(pairs[m]);

        Functional f;
        switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
            case 0: {
                VertexId a = std::uniform_int_distribution<VertexId>(0, static_cast<VertexId>(n - 2))(rng);
                VertexId b = std::uniform_int_distribution<VertexId>(a + 1, static_cast<VertexId>(n - 1))(rng);
                f = distance_functional(a, b);
                break;
            }
            case 1: f = diameter_functional(); break;
            default: f = cut_points_functional(); break;
        }
        cases.push_back({"rand" + std::to_string(i) + ":n=" + std::to_string(n) + ":m=" + std::to_string(m) + ":" +
                             f.name,
                         std::move(model), std::move(f)});
    }
    return cases;
}

RunManifest run_russo_verify(const ExperimentConfig& c) {
    require_valid(c);
    RunContext ctx(c);
    const auto suite = russo_suite(c.suite, ctx.seed_for("russo/suite"));
    const auto betas = c.betas.empty() ? kRussoBetas : c.betas;
    json reports = json::array();
    for (const auto& rc : suite) {
        for (double beta : betas) {
            const auto r = verify_russo(rc.model, rc.functional, beta, kRussoStep);
            reports.push_back({{"model_id", rc.model_id},
                               {"beta", beta},
                               {"analytic", r.analytic},
                               {"finite_diff", r.finite_diff},
                               {"abs_error", r.abs_error},
                               {"pass", r.abs_error < kRussoTolerance}});
        }
    }
    ctx.write("report.json", reports.dump(2) + "\n");
    return ctx.finish();
}

RunManifest run_self_similarity(const ExperimentConfig& c) {
    require_valid(c);
    RunContext ctx(c);
    json analytic = json::array();
    std::vector<std::vector<Coord>> targets;
    if (c.dim == 1) {
        targets = {{2}, {3}, {5}, {10}};
    } else {
        targets = {{2, 0}, {2, 1}, {3, 3}};
    }
    const LatticePoint origin(std::vector<Coord>(static_cast<std::size_t>(c.dim), 0));
    bool all_ok = true;
    for (const auto& t : targets) {
        const LatticePoint v(t);
        const double j = kernel_integral(origin, v).value;
        for (Coord n : c.sizes) {
            const double s = block_kernel_sum(origin, v, n);
            const double err = std::abs(s - j);
            const bool ok = err <= 1e-10 * (c.dim == 1 ? 1.0 : 10.0);
            all_ok = all_ok && ok;
            analytic.push_back({{"v", t}, {"n", n}, {"block_sum", s}, {"kernel", j}, {"abs_error", err}, {"pass", ok}});
        }
    }

    json monte_carlo = json::array();
    const Coord block = 2;
    std::vector<Coord> vcoords(static_cast<std::size_t>(c.dim), 0);
    vcoords[0] = 3;
    const Coord side = block * (vcoords[0] + 1);
    const Box box(side, c.dim);
    for (double beta : c.betas) {
        const auto seed = ctx.seed_for("selfsim/beta=" + num(beta));
        std::vector<std::uint8_t> hit(static_cast<std::size_t>(c.replicas), 0);
        parallel_for(hit.size(), c.workers, [&](std::size_t r) {
            const auto cfg = sample_direct(MeasureSpec::plain(beta), side, c.dim, seed, r);
            for (const Edge& e : cfg.long_edges) {
                const auto a = box.point(e.a), b = box.point(e.b);
                auto block_of = [&](const LatticePoint& p) {
                    std::vector<Coord> q(p.coords.size());
                    for (std::size_t i = 0; i < q.size(); ++i) q[i] = p.coords[i] / block;
                    return q;
                };
                const auto ba = block_of(a), bb = block_of(b);
                const auto zero = std::vector<Coord>(static_cast<std::size_t>(c.dim), 0);
                if ((ba == zero && bb == vcoords) || (ba == vcoords && bb == zero)) {
                    hit[r] = 1;
                    return;
                }
            }
        });
        double freq = 0.0;
        for (auto h : hit) freq += h;
        freq /= static_cast<double>(hit.size());
        const double p = connection_prob(beta, origin, LatticePoint(vcoords));
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(hit.size()));
        const bool ok = std::abs(freq - p) <= 3.0 * sigma + 1e-15;
        monte_carlo.push_back({{"beta", beta},
                               {"u", std::vector<Coord>(static_cast<std::size_t>(c.dim), 0)},
                               {"v", vcoords},
                               {"n", block},
                               {"frequency", freq},
                               {"probability", p},
                               {"sigma", sigma},
                               {"pass", ok}});
    }
    json report{{"dim", c.dim}, {"analytic", analytic}, {"analytic_pass", all_ok}, {"monte_carlo", monte_carlo}};
    ctx.write("report.json", report.dump(2) + "\n");
    return ctx.finish();
}

RunManifest run_cutpoints(const ExperimentConfig& c) {
    require_valid(c);
    RunContext ctx(c);
    std::string csv = "n,beta,mc_mean,mc_stderr,exact_mean,z,min_slack,seed,replicas\n";
    for (double beta : c.betas) {
        for (Coord n : c.sizes) {
            const auto seed = ctx.seed_for("cutpoints/beta=" + num(beta) + "/n=" + std::to_string(n));
            std::vector<double> cuts(static_cast<std::size_t>(c.replicas));
            std::vector<std::int64_t> slack(cuts.size());
            parallel_for(cuts.size(), c.workers, [&](std::size_t r) {
                const BoxGraph g(sample_fast(MeasureSpec::plain(beta), n, 1, seed, r));
                const auto k = count_cut_points(g);
                cuts[r] = static_cast<double>(k);
                slack[r] = corner_distance(g) - k;
            });
            const auto min_slack = *std::min_element(slack.begin(), slack.end());
            if (min_slack < 0)
                throw InvariantViolation("cut-point count exceeded D(0,n-1) for n=" + std::to_string(n));
            long double s = 0.0L;
            for (double v : cuts) s += v;
            const double mean = static_cast<double>(s / static_cast<long double>(cuts.size()));
            long double ss = 0.0L;
            for (double v : cuts) ss += (v - mean) * (v - mean);
            const double se = std::sqrt(static_cast<double>(ss / static_cast<long double>(cuts.size() - 1)) /
                                        static_cast<double>(cuts.size()));
            const double exact = cutpoint_mean_exact(n, beta);
            const double z = se > 0 ? (mean - exact) / se : 0.0;
            csv += std::to_string(n) + "," + num(beta) + "," + num(mean) + "," + num(se) + "," + num(exact) + "," +
                   num(z) + "," + std::to_string(min_slack) + "," + std::to_string(seed) + "," +
                   std::to_string(c.replicas) + "\n";
        }
    }
    ctx.write("cutpoints.csv", csv);
    return ctx.finish();
}

RunManifest run_estimate(const ExperimentConfig& c) {
    require_valid(c);
    RunContext ctx(c);
    std::string csv = std::string(kEstimatesHeader) + "\n";
    for (double beta : c.betas) {
        for (Coord n : c.sizes) {
            const auto seed = ctx.seed_for("estimate/beta=" + num(beta) + "/n=" + std::to_string(n));
            const auto e = c.pair_policy == PairPolicy::corner
                               ? estimate_corner_distance(MeasureSpec::plain(beta), n, c.dim, c.replicas, seed, c.workers)
                               : estimate_lambda_full(beta, n, c.dim, c.replicas, seed, c.workers);
            csv += estimates_csv_row(e) + "\n";
        }
    }
    ctx.write("estimates.csv", csv);
    return ctx.finish();
}

RunManifest run_sample(const ExperimentConfig& c) {
    require_valid(c);
    RunContext ctx(c);
    std::string jsonl;
    for (double beta : c.betas) {
        for (Coord n : c.sizes) {
            const auto seed = ctx.seed_for("sample/beta=" + num(beta) + "/n=" + std::to_string(n));
            for (std::int64_t r = 0; r < c.replicas; ++r) {
                const auto rr = static_cast<std::uint64_t>(r);
                Configuration cfg;
                if (c.sampler == "direct") {
                    cfg = sample_direct(MeasureSpec::plain(beta), n, c.dim, seed, rr);
                } else if (c.sampler == "continuum") {
                    cfg = sample_continuum(beta, n, c.dim, seed, rr);
                } else {
                    cfg = sample_fast(MeasureSpec::plain(beta), n, c.dim, seed, rr);
                }
                jsonl += configuration_json(cfg).dump() + "\n";
            }
        }
    }
    ctx.write("configurations.jsonl", jsonl);
    return ctx.finish();
}

RunManifest run(const ExperimentConfig& c) {
    switch (c.experiment) {
        case Experiment::theta_curve: return run_theta_curve(c);
        case Experiment::small_beta_slope: return run_small_beta(c);
        case Experiment::monotone_sweep: return run_monotone_sweep(c);
        case Experiment::continuity: return run_continuity(c);
        case Experiment::russo_verify: return run_russo_verify(c);
        case Experiment::self_similarity: return run_self_similarity(c);
        case Experiment::cutpoints: return run_cutpoints(c);
        case Experiment::estimate: return run_estimate(c);
        case Experiment::sample: return run_sample(c);
    }
    throw InvalidInput("unknown experiment");
}

}  // namespace perclr
