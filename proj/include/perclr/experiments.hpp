#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "perclr/enumeration.hpp"
#include "perclr/estimators.hpp"

namespace perclr {

enum class Experiment {
    theta_curve,
    small_beta_slope,
    monotone_sweep,
    continuity,
    russo_verify,
    self_similarity,
    cutpoints,
    estimate,
    sample
};

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);

struct ExperimentConfig {
    Experiment experiment = Experiment::theta_curve;
    int dim = 1;
    std::vector<Coord> sizes;
    std::vector<double> betas;
    std::optional<std::vector<double>> eps;  // continuity ε-grid
    std::int64_t replicas = 200;
    std::uint64_t seed = 0;
    std::string output_path = "results";
    int workers = 0;
    std::string suite = "default";              // russo_verify
    std::string sampler = "fast";               // sample: direct|fast|continuum
    PairPolicy pair_policy = PairPolicy::corner;  // estimate

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Fixed default seed per recipe, so documented numbers reproduce.
std::uint64_t default_seed(Experiment e);

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

/// One message per violated field, prefixed by its path ("sizes[2]: ...").
std::vector<std::string> validate(const ExperimentConfig& c);

/// Thrown by run() when validation fails; nothing has been sampled or written.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

struct OutputFile {
    std::string name;
    std::string digest;  // fnv1a64 hex of the bytes written
    friend bool operator==(const OutputFile&, const OutputFile&) = default;
};

struct RunManifest {
    ExperimentConfig config;
    std::string version;
    double wall_seconds = 0.0;
    std::vector<std::pair<std::string, std::uint64_t>> task_seeds;
    std::vector<OutputFile> outputs;
};

nlohmann::json to_json(const RunManifest& m);

/// Seed for a named task, derived deterministically from the run seed.
std::uint64_t task_seed(std::uint64_t seed, const std::string& task);

std::string fnv1a64_hex(const std::string& bytes);

// Individual recipes. Each validates, runs, writes its files into
// config.output_path and returns the manifest (also written as manifest.json).
RunManifest run_theta_curve(const ExperimentConfig& config);
RunManifest run_small_beta(const ExperimentConfig& config);
RunManifest run_monotone_sweep(const ExperimentConfig& config);
RunManifest run_continuity(const ExperimentConfig& config);
RunManifest run_russo_verify(const ExperimentConfig& config);
RunManifest run_self_similarity(const ExperimentConfig& config);
RunManifest run_cutpoints(const ExperimentConfig& config);
RunManifest run_estimate(const ExperimentConfig& config);
RunManifest run_sample(const ExperimentConfig& config);

/// Dispatch on config.experiment.
RunManifest run(const ExperimentConfig& config);

// CSV layouts shared with the plotting component.
inline constexpr const char* kEstimatesHeader =
    "beta,n,dim,measure_kind,k_threshold,mean,stderr,replicas,pair_policy,seed";
inline constexpr const char* kThetaHeader = "beta,method,value,ci_low,ci_high,sizes,seed,replicas";
inline constexpr const char* kTelescopeHeader = "beta,eps,N,k,log_ratio,stderr,replicas,seed";

std::string estimates_csv_row(const LambdaEstimate& e);
std::string theta_csv_row(const ThetaEstimate& t, std::uint64_t seed, std::int64_t replicas);

/// A model/functional pair checked by russo-verify.
struct RussoCase {
    std::string model_id;
    FiniteModel model;
    Functional functional;
};

/// "default": 50 random d = 1 models (3..8 vertices, ≤ 8 optional edges,
/// functional drawn from {D(a,b), diameter, cut points}) plus the named
/// path/box models. "quick": the named models only.
std::vector<RussoCase> russo_suite(const std::string& name, std::uint64_t seed);

inline constexpr double kRussoTolerance = 1e-6;
inline constexpr double kRussoStep = 1e-4;
inline const std::vector<double> kRussoBetas = {0.3, 1.0, 2.0};

/// JSONL record for one configuration.
nlohmann::json configuration_json(const Configuration& c);

}  // namespace perclr
