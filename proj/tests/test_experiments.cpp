#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "perclr/errors.hpp"
#include "perclr/experiments.hpp"

using namespace perclr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("perclr_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

ExperimentConfig base(Experiment e) {
    ExperimentConfig c;
    c.experiment = e;
    c.seed = default_seed(e);
    c.dim = 1;
    c.replicas = 20;
    return c;
}

}  // namespace

TEST_CASE("config round trip") {
    auto c = base(Experiment::continuity);
    c.sizes = {16, 32};
    c.betas = {1.0};
    c.eps = std::vector<double>{0.0, 0.05};
    c.output_path = "out/x";
    c.workers = 3;
    c.pair_policy = PairPolicy::full_max;
    nlohmann::json j;
    to_json(j, c);
    ExperimentConfig back;
    from_json(nlohmann::json::parse(j.dump()), back);
    CHECK(back == c);

    for (auto e : {Experiment::theta_curve, Experiment::small_beta_slope, Experiment::monotone_sweep,
                   Experiment::russo_verify, Experiment::self_similarity, Experiment::cutpoints,
                   Experiment::estimate, Experiment::sample})
        CHECK(experiment_from_string(to_string(e)) == e);
}

TEST_CASE("malformed configs report field paths") {
    ExperimentConfig c;
    try {
        from_json(nlohmann::json::parse(R"({"experiment":"theta_curve","dim":"two","colour":1})"), c);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.problems().size() == 2);
        CHECK(e.problems()[0].rfind("dim:", 0) == 0);
        CHECK(e.problems()[1].rfind("colour:", 0) == 0);
    }
    CHECK_THROWS_AS(from_json(nlohmann::json::parse(R"({"experiment":"nope"})"), c), ConfigError);
    CHECK_THROWS_AS(from_json(nlohmann::json::parse("[1,2]"), c), ConfigError);
}

TEST_CASE("validation") {
    auto c = base(Experiment::small_beta_slope);
    c.dim = 2;
    c.sizes = {8, 8};
    c.betas = {0.5, -1.0};
    const auto p = validate(c);
    auto has = [&](const std::string& prefix) {
        for (const auto& s : p)
            if (s.rfind(prefix, 0) == 0) return true;
        return false;
    };
    CHECK(has("dim:"));
    CHECK(has("sizes:"));
    CHECK(has("betas[0]:"));
    CHECK(has("betas[1]:"));

    auto cont = base(Experiment::continuity);
    cont.sizes = {24, 1 << 15};
    cont.betas = {1.0};
    const auto q = validate(cont);
    CHECK(q.size() == 3);

    auto est = base(Experiment::estimate);
    est.sizes = {17};
    est.betas = {1.0};
    est.pair_policy = PairPolicy::full_max;
    est.dim = 2;
    CHECK(validate(est).size() == 1);

    auto russo = base(Experiment::russo_verify);
    CHECK(validate(russo).empty());
    CHECK_THROWS_AS(run(cont), ConfigError);
}

TEST_CASE("invalid configs write nothing") {
    auto c = base(Experiment::theta_curve);
    c.output_path = scratch("invalid").string();
    c.betas = {1.0};
    CHECK_THROWS_AS(run(c), ConfigError);
    CHECK_FALSE(fs::exists(c.output_path));
}

TEST_CASE("theta curve at beta zero") {
    auto c = base(Experiment::theta_curve);
    c.betas = {0.0};
    c.sizes = {4, 8, 16};
    c.output_path = scratch("theta").string();
    const auto m = run(c);
    const auto rows = lines(slurp(fs::path(c.output_path) / "theta.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == kThetaHeader);
    CHECK(rows[1].rfind("0,inf_formula,1,1,1,4;8;16,", 0) == 0);
    CHECK(rows[2].rfind("0,ols_slope,1,1,1,", 0) == 0);
    CHECK(m.outputs.size() == 2);
    CHECK(fs::exists(fs::path(c.output_path) / "manifest.json"));
    const auto est = lines(slurp(fs::path(c.output_path) / "estimates.csv"));
    CHECK(est[0] == kEstimatesHeader);
    CHECK(est.size() == 4);
}

TEST_CASE("sample_direct outputs are byte-identical on rerun") {
    auto c = base(Experiment::sample);
    c.sampler = "direct";
    c.betas = {1.0};
    c.sizes = {6};
    c.dim = 2;
    c.replicas = 5;
    c.output_path = scratch("sample_a").string();
    const auto a = run(c);
    c.output_path = scratch("sample_b").string();
    c.workers = 2;
    const auto b = run(c);
    CHECK(a.outputs == b.outputs);
    const auto recs = lines(slurp(fs::path(c.output_path) / "configurations.jsonl"));
    CHECK(recs.size() == 5);
    const auto j = nlohmann::json::parse(recs[0]);
    CHECK(j.at("measure").at("kind") == "plain");
    CHECK(j.at("n") == 6);
    CHECK(j.at("edges").is_array());
}

TEST_CASE("self-similarity report") {
    auto c = base(Experiment::self_similarity);
    c.sizes = {1, 2, 4, 8};
    c.betas = {1.0};
    c.replicas = 2000;
    c.output_path = scratch("selfsim").string();
    run(c);
    const auto j = nlohmann::json::parse(slurp(fs::path(c.output_path) / "report.json"));
    CHECK(j.at("analytic_pass") == true);
    CHECK(j.at("monte_carlo").at(0).at("probability").get<double>() == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("russo suite report") {
    auto c = base(Experiment::russo_verify);
    c.suite = "quick";
    c.output_path = scratch("russo").string();
    run(c);
    const auto j = nlohmann::json::parse(slurp(fs::path(c.output_path) / "report.json"));
    CHECK(j.size() == 5 * kRussoBetas.size());
    for (const auto& r : j) CHECK(r.at("pass") == true);
    CHECK(russo_suite("default", 1).size() >= 55);
}

TEST_CASE("cutpoints and continuity recipes") {
    auto c = base(Experiment::cutpoints);
    c.sizes = {16};
    c.betas = {0.5};
    c.replicas = 200;
    c.output_path = scratch("cut").string();
    run(c);
    const auto rows = lines(slurp(fs::path(c.output_path) / "cutpoints.csv"));
    REQUIRE(rows.size() == 2);

    auto t = base(Experiment::continuity);
    t.sizes = {16};
    t.betas = {1.0};
    t.eps = std::vector<double>{0.0};
    t.output_path = scratch("cont").string();
    run(t);
    const auto terms = lines(slurp(fs::path(t.output_path) / "telescope.csv"));
    CHECK(terms.size() == 4);
    CHECK(terms[1].rfind("1,0,4,2,0,0,", 0) == 0);
}

TEST_CASE("task seeds and digests") {
    CHECK(task_seed(1, "a") == task_seed(1, "a"));
    CHECK(task_seed(1, "a") != task_seed(1, "b"));
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("small-beta recipe deficit ratio") {
    auto c = base(Experiment::small_beta_slope);
    c.betas = {0.05};
    c.sizes = {256, 512, 1024, 2048, 4096, 8192, 16384};
    c.replicas = 200;
    c.output_path = scratch("small_beta").string();
    run(c);
    const auto rows = lines(slurp(fs::path(c.output_path) / "small_beta.csv"));
    REQUIRE(rows.size() == 2);
    std::vector<std::string> cells;
    std::istringstream in(rows[1]);
    for (std::string cell; std::getline(in, cell, ',');) cells.push_back(cell);
    const double ratio = std::stod(cells.at(5));
    CHECK(ratio >= 0.5);
    CHECK(ratio <= 1.5);
    const auto exact = lines(slurp(fs::path(c.output_path) / "exact_derivative.csv"));
    CHECK(exact.size() == 8);
}
