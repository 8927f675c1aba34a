#include <cstdio>
#include <stdexcept>

#include "smcg/harness.hpp"

namespace smcg {

namespace {

AlgorithmSpec smcg_pidb(const std::string& label, double varrho, double varsigma, double epsilon) {
    AlgorithmSpec a;
    a.label = label;
    a.kind = AlgorithmKind::SmCg;
    a.bound = BoundKind::Pidb;
    a.pidb_varrho = varrho;
    a.pidb_varsigma = varsigma;
    a.pidb_epsilon = epsilon;
    return a;
}

AlgorithmSpec smcg_pdb(const std::string& label, double rho, double varsigma) {
    AlgorithmSpec a;
    a.label = label;
    a.kind = AlgorithmKind::SmCg;
    a.bound = BoundKind::Pdb;
    a.pdb_rho = rho;
    a.pdb_varsigma = varsigma;
    return a;
}

AlgorithmSpec smcg_fixed(const std::string& label, double delta, double noise_factor = 0) {
    AlgorithmSpec a;
    a.label = label;
    a.kind = AlgorithmKind::SmCg;
    a.bound = BoundKind::Fixed;
    a.fixed_delta = delta;
    a.fixed_noise_factor = noise_factor;
    return a;
}

AlgorithmSpec baseline(const std::string& label, AlgorithmKind kind) {
    AlgorithmSpec a;
    a.label = label;
    a.kind = kind;
    return a;
}

std::vector<AlgorithmSpec> comparison_set(AlgorithmSpec proposed) {
    return {std::move(proposed), baseline("sg", AlgorithmKind::FrostSg), baseline("rls", AlgorithmKind::ConstrainedRls),
            baseline("cg", AlgorithmKind::ConstrainedCg), baseline("mvdr", AlgorithmKind::Mvdr)};
}

ExperimentConfig base(const std::string& name, int runs, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.runs = runs;
    cfg.master_seed = seed;
    return cfg;
}

struct PresetInfo {
    const char* name;
    const char* description;
};

constexpr PresetInfo kPresets[] = {
    {"fig4", "fixed bound sqrt(5 noise), q=10, SNR 10 dB, INR 30 dB, N=4000; SM-CG vs RLS and MVDR"},
    {"fig5", "bound comparison: fixed 0.8/1.0/1.3, PDB and PIDB, INR 35 dB, N=3000"},
    {"fig6", "SM-CG (PIDB) vs SG, RLS, CG and MVDR, q=10, SNR 10 dB, INR 30 dB, N=3000"},
    {"fig8", "SNR sweep 0..30 dB in 5 dB steps, one experiment per SNR"},
    {"fig9", "tracking: q=8, four interferers join at i=3000, INR 35 dB, N=5000"},
};

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& p : kPresets) names.emplace_back(p.name);
    return names;
}

std::string preset_description(const std::string& name) {
    for (const auto& p : kPresets)
        if (name == p.name) return p.description;
    throw std::invalid_argument("unknown preset: " + name);
}

std::vector<ExperimentConfig> preset(const std::string& name, int runs, std::uint64_t seed) {
    if (name == "fig4") {
        auto cfg = base(name, runs, seed);
        cfg.scenario.sources = 10;
        cfg.scenario.snr_db = 10;
        cfg.scenario.inr_db = 30;
        cfg.scenario.snapshots = 4000;
        cfg.algorithms = {smcg_fixed("smcg", 0, 5), baseline("rls", AlgorithmKind::ConstrainedRls),
                          baseline("mvdr", AlgorithmKind::Mvdr)};
        return {cfg};
    }
    if (name == "fig5") {
        auto cfg = base(name, runs, seed);
        cfg.scenario.inr_db = 35;
        cfg.scenario.snapshots = 3000;
        cfg.algorithms = {smcg_fixed("fixed_0.8", 0.8),        smcg_fixed("fixed_1.0", 1.0),
                          smcg_fixed("fixed_1.3", 1.3),        smcg_pdb("pdb", 0.9, 21),
                          smcg_pidb("pidb", 0.98, 19, 0.001), baseline("mvdr", AlgorithmKind::Mvdr)};
        return {cfg};
    }
    if (name == "fig6") {
        auto cfg = base(name, runs, seed);
        cfg.scenario.inr_db = 30;
        cfg.scenario.snapshots = 3000;
        cfg.algorithms = comparison_set(smcg_pidb("smcg", 0.98, 19, 0.001));
        return {cfg};
    }
    if (name == "fig8") {
        std::vector<ExperimentConfig> sweep;
        for (int snr = 0; snr <= 30; snr += 5) {
            char label[32];
            std::snprintf(label, sizeof label, "fig8_snr%02d", snr);
            auto cfg = base(label, runs, seed);
            cfg.scenario.snr_db = snr;
            cfg.scenario.inr_db = 30;
            cfg.scenario.snapshots = 3000;
            cfg.algorithms = comparison_set(smcg_pidb("smcg", 0.98, 19, 0.001));
            sweep.push_back(std::move(cfg));
        }
        return sweep;
    }
    if (name == "fig9") {
        auto cfg = base(name, runs, seed);
        cfg.scenario.sources = 8;
        cfg.scenario.inr_db = 35;
        cfg.scenario.snapshots = 5000;
        cfg.scenario.changes = {{3000, 4}};
        cfg.algorithms = comparison_set(smcg_pidb("smcg", 0.98, 19, 0.001));
        return {cfg};
    }
    throw std::invalid_argument("unknown preset: " + name + " (see list-presets)");
}

}  // namespace smcg
