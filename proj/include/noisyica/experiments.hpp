#ifndef NOISYICA_EXPERIMENTS_HPP
#define NOISYICA_EXPERIMENTS_HPP

#include <string>
#include <utility>
#include <vector>

#include "noisyica/io.hpp"
#include "noisyica/meta.hpp"

namespace noisyica {

enum class ExperimentKind {
    TableKurtosis,
    SweepNoise,
    SweepN,
    HistogramRestarts,
    InterpolationScore,
    Landscape,
};

const char* to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

/// Config for the reproducible experiment harness. Every random quantity is
/// derived from `seed` (or the explicit `seeds` list), so a fixed config
/// yields byte-identical CSV output.
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::TableKurtosis;
    Index k = 5;
    Index n = 20000;
    double rho = 0.2;
    int runs = 20;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds; // optional explicit per-run seeds; overrides `runs`
    int probes = 100;
    std::vector<std::string> candidates; // default: PEGI-k4, CHF, CGF
    std::vector<std::pair<std::string, std::string>> external_candidates; // name -> csv path
    std::string source_plan; // "nine_source" or empty for explicit sources
    std::vector<SourceSpec> sources;
    std::vector<double> p_list;      // table_kurtosis
    std::vector<double> sweep_values; // sweep_noise / sweep_n
    std::vector<double> epsilon_grid; // interpolation_score
    Index resolution = 41;            // landscape
    double origin_exclusion = 0.1;    // landscape
    ContrastKind kind = ContrastKind::CHF; // landscape / histogram contrast
    int inits = 10;                   // histogram_restarts
    ExtractOptions extract{};
    std::string out_path;
};

ExperimentConfig experiment_config_from_json(const Json& j);
ExperimentConfig load_experiment_config(const std::string& path);

/// Switches a config to the paper-scale protocol (100 runs, n = 1e5).
void apply_full_scale(ExperimentConfig& cfg);

/// Each function returns the finished CSV (first line
/// "# noisy-ica-kit v<semver> <experiment>").
std::string run_table_experiment(const ExperimentConfig& cfg);
std::string run_sweep(const ExperimentConfig& cfg);
std::string run_interpolation(const ExperimentConfig& cfg);
std::string landscape_grid(const ExperimentConfig& cfg);
std::string run_histogram_restarts(const ExperimentConfig& cfg);

/// Dispatch on cfg.experiment.
std::string run_experiment(const ExperimentConfig& cfg);

/// Candidate list for a config: named built-ins plus external adapters.
/// Unknown names raise ConfigError before anything runs.
std::vector<Candidate> resolve_candidates(const ExperimentConfig& cfg);

} // namespace noisyica

#endif // NOISYICA_EXPERIMENTS_HPP
