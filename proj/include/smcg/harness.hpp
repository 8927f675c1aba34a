#ifndef SMCG_HARNESS_HPP
#define SMCG_HARNESS_HPP

// Seeded Monte-Carlo driver: builds scenarios, runs every configured
// beamformer over the same snapshot stream, and aggregates per-snapshot
// statistics across runs.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "smcg/array_model.hpp"
#include "smcg/bounds.hpp"
#include "smcg/metrics.hpp"

namespace smcg {

struct EpochChange {
    long start = 1;
    int added_interferers = 0;
};

/// Scenario description before interferer DOAs are drawn.
struct ScenarioSpec {
    int sensors = 16;
    double spacing = 0.5;
    double gamma = 1.0;
    double snr_db = 10.0;
    double inr_db = 30.0;
    int sources = 10;  // q, desired user included
    long snapshots = 3000;
    double desired_doa = 90.0;
    double doa_min = 20.0;
    double doa_max = 160.0;
    double doa_guard = 5.0;
    // Desired power is noise_power * 10^(snr/10); <= 0 selects unit desired power.
    double noise_power = 0.0;
    std::vector<EpochChange> changes;

    double resolved_noise_power() const;
};

enum class AlgorithmKind { SmCg, FrostSg, ConstrainedRls, ConstrainedCg, Mvdr };
enum class BoundKind { Fixed, Pdb, Pidb };

std::string_view to_string(AlgorithmKind kind);
std::string_view to_string(BoundKind kind);

struct AlgorithmSpec {
    std::string label;
    AlgorithmKind kind = AlgorithmKind::SmCg;

    double eta = 0.5;
    double lambda_min = 0.1;
    double lambda_max = 0.999;
    double r_hat_loading = 1e-2;

    BoundKind bound = BoundKind::Pidb;
    double fixed_delta = 1.0;
    double fixed_noise_factor = 0.0;  // > 0 selects delta = sqrt(factor * noise_power)
    double pdb_rho = 0.9;
    double pdb_varsigma = 21.0;
    double pidb_varrho = 0.98;
    double pidb_varsigma = 19.0;
    double pidb_epsilon = 0.001;

    double sg_mu = 0.05;
    bool sg_normalized = true;
    double rls_forgetting = 0.998;
    double rls_loading = 1e-2;
    double cg_forgetting = 0.998;
};

struct ExperimentConfig {
    std::string name = "custom";
    ScenarioSpec scenario;
    std::vector<AlgorithmSpec> algorithms;
    int runs = 50;
    std::uint64_t master_seed = 1;
    unsigned threads = 0;  // 0 = hardware concurrency
};

/// Throws std::invalid_argument naming the offending key.
void validate(const ExperimentConfig& config);

using RunRng = std::mt19937_64;

inline std::uint64_t run_seed(std::uint64_t master_seed, int run) {
    return master_seed ^ static_cast<std::uint64_t>(run);
}

/// Draws interferer DOAs from `rng` and assembles the epoch schedule.
/// Every interferer has power noise * 10^(inr/10); later epochs keep the
/// earlier sources and add new interferers.
Scenario build_scenario(const ScenarioSpec& spec, RunRng& rng);

BoundPolicy<double> make_bound_policy(const AlgorithmSpec& spec, const ComplexVectorXd& w0, double noise_power);

struct AlgorithmAggregate {
    std::string label;
    AlgorithmKind kind = AlgorithmKind::SmCg;
    std::vector<double> mean_sinr_db;     // linear mean across runs, in dB
    std::vector<double> mean_delta;       // 0 for algorithms without a bound
    std::vector<double> update_rate_cum;  // mean over runs of updates(1..i)/i
    double mean_update_rate = 0;
    double max_constraint_error = 0;
    std::optional<OpCounts> complexity;
};

struct RunFailure {
    int run = 0;
    std::string message;
};

struct AggregateResult {
    std::string name;
    long snapshots = 0;
    int runs_requested = 0;
    int runs_completed = 0;
    std::uint64_t master_seed = 0;
    std::string config_hash;
    std::vector<AlgorithmAggregate> algorithms;
    std::vector<RunFailure> failures;

    const AlgorithmAggregate& algorithm(const std::string& label) const;
};

/// Per-run output of a single simulation, mainly for tests.
struct RunOutput {
    Scenario scenario;
    std::vector<RunTrace> traces;  // one per configured algorithm
    std::vector<double> max_constraint_error;
};

RunOutput simulate_run(const ExperimentConfig& config, int run);

AggregateResult run_experiment(const ExperimentConfig& config);

/// Columns: snapshot,algorithm,mean_sinr_db,mean_delta,update_rate_cum.
void emit_csv(const AggregateResult& result, const std::filesystem::path& path);

/// One row per experiment and algorithm; `tail` snapshots feed final_sinr_db.
void emit_summary(const std::vector<AggregateResult>& results, const std::filesystem::path& path, long tail = 200);

struct ComplexityTableSpec {
    std::int64_t m_min = 8;
    std::int64_t m_max = 64;
    std::int64_t N = 1000;
    std::int64_t L = 3;
    std::map<Algorithm, double> tau;  // missing entries use default_update_rates()
};

/// Update rates reported for each set-membership algorithm at SNR 10 dB;
/// conventional algorithms update every snapshot.
std::map<Algorithm, double> default_update_rates();

/// Columns: m,algorithm,tau,additions,multiplications.
void emit_complexity_table(const ComplexityTableSpec& spec, const std::filesystem::path& path);

// Presets reproducing the simulation section at desk scale.
std::vector<std::string> preset_names();
std::string preset_description(const std::string& name);
std::vector<ExperimentConfig> preset(const std::string& name, int runs = 50, std::uint64_t seed = 1);

// Flat key/value configuration ([section] key = value). Sections:
// [experiment], [scenario], and one [algorithm.<label>] per beamformer.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string format_config(const ExperimentConfig& config);

/// Applies "section.key=value" overrides, e.g. "scenario.snr_db=20" or
/// "algorithm.smcg.pidb_epsilon=0.01".
ExperimentConfig apply_overrides(const ExperimentConfig& config, const std::vector<std::string>& overrides);

std::string config_hash(const ExperimentConfig& config);

}  // namespace smcg

#endif  // SMCG_HARNESS_HPP
