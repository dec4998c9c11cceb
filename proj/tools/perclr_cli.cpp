#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>

#include "perclr/errors.hpp"
#include "perclr/experiments.hpp"

using namespace perclr;

namespace {

const std::map<std::string, Experiment> kSubcommands = {
    {"sample", Experiment::sample},          {"estimate", Experiment::estimate},
    {"sweep", Experiment::monotone_sweep},   {"continuity", Experiment::continuity},
    {"russo-verify", Experiment::russo_verify}, {"cutpoints", Experiment::cutpoints},
    {"self-sim", Experiment::self_similarity}, {"theta", Experiment::theta_curve},
    {"small-beta", Experiment::small_beta_slope}};

void usage(std::ostream& os) {
    os << "usage: perclr <subcommand> [options]\n\nsubcommands:\n";
    for (const auto& [name, e] : kSubcommands) os << "  " << name << "  (" << to_string(e) << ")\n";
    os << "\noptions: --config PATH --beta B --betas B1,B2 --eps E1,E2 --sizes N1,N2 --dim D\n"
          "         --replicas R --seed S --out DIR --workers N --suite NAME --sampler NAME\n"
          "         --pair-policy corner|full_max\n";
}

int report(const ConfigError& e) {
    std::cerr << "invalid config:\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << '\n';
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        usage(std::cerr);
        return 64;
    }
    const std::string sub = argv[1];
    if (sub == "-h" || sub == "--help") {
        usage(std::cout);
        return 0;
    }
    if (sub == "--version") {
        std::cout << PERCLR_VERSION << '\n';
        return 0;
    }
    const auto it = kSubcommands.find(sub);
    if (it == kSubcommands.end()) {
        std::cerr << "unknown subcommand: " << sub << "\n\n";
        usage(std::cerr);
        return 64;
    }

    CLI::App app{"long-range percolation experiments", "perclr " + sub};
    std::string config_path, out, suite, sampler, pair_policy;
    std::vector<double> betas, eps;
    std::vector<Coord> sizes;
    double beta = 0.0;
    int dim = 0, workers = -1;
    std::int64_t replicas = 0;
    std::uint64_t seed = 0;
    auto* o_config = app.add_option("--config", config_path, "JSON config file");
    auto* o_beta = app.add_option("--beta", beta, "single beta");
    auto* o_betas = app.add_option("--betas", betas, "comma-separated betas")->delimiter(',');
    auto* o_eps = app.add_option("--eps", eps, "comma-separated eps grid")->delimiter(',');
    auto* o_sizes = app.add_option("--sizes", sizes, "comma-separated box sides")->delimiter(',');
    auto* o_dim = app.add_option("--dim", dim, "dimension");
    auto* o_reps = app.add_option("--replicas", replicas, "replicas per task");
    auto* o_seed = app.add_option("--seed", seed, "master seed");
    auto* o_out = app.add_option("--out", out, "output directory");
    auto* o_workers = app.add_option("--workers", workers, "worker threads (0 = auto)");
    auto* o_suite = app.add_option("--suite", suite, "russo-verify suite");
    auto* o_sampler = app.add_option("--sampler", sampler, "direct|fast|continuum");
    auto* o_pp = app.add_option("--pair-policy", pair_policy, "corner|full_max");
    o_beta->excludes(o_betas);

    try {
        app.parse(argc - 1, argv + 1);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    ExperimentConfig cfg;
    try {
        if (*o_config) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError({"config: cannot open " + config_path});
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw ConfigError({std::string("config: ") + e.what()});
            }
            if (j.is_object() && !j.contains("experiment")) j["experiment"] = to_string(it->second);
            from_json(j, cfg);
            if (cfg.experiment != it->second)
                throw ConfigError({"experiment: config says " + to_string(cfg.experiment) + " but subcommand is " + sub});
            if (!j.contains("seed")) cfg.seed = default_seed(cfg.experiment);
        } else {
            cfg.experiment = it->second;
            cfg.seed = default_seed(cfg.experiment);
        }
        if (*o_beta) cfg.betas = {beta};
        if (*o_betas) cfg.betas = betas;
        if (*o_eps) cfg.eps = eps;
        if (*o_sizes) cfg.sizes = sizes;
        if (*o_dim) cfg.dim = dim;
        if (*o_reps) cfg.replicas = replicas;
        if (*o_seed) cfg.seed = seed;
        if (*o_out) cfg.output_path = out;
        if (*o_workers) cfg.workers = workers;
        if (*o_suite) cfg.suite = suite;
        if (*o_sampler) cfg.sampler = sampler;
        if (*o_pp) {
            try {
                cfg.pair_policy = pair_policy_from_string(pair_policy);
            } catch (const InvalidInput& e) {
                throw ConfigError({std::string("pair_policy: ") + e.what()});
            }
        }

        const auto manifest = run(cfg);
        std::cout << "wrote";
        for (const auto& o : manifest.outputs) std::cout << ' ' << (std::filesystem::path(cfg.output_path) / o.name).string();
        std::cout << ' ' << (std::filesystem::path(cfg.output_path) / "manifest.json").string() << '\n';
        return 0;
    } catch (const ConfigError& e) {
        return report(e);
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 1;
    } catch (const CapacityError& e) {
        std::cerr << "capacity: " << e.what() << '\n';
        return 1;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
