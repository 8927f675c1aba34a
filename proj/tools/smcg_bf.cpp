// Command-line front end: runs presets or config files and writes CSV output.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smcg/harness.hpp"

namespace {

struct RunOptions {
    std::string preset;
    std::string config;
    std::optional<int> runs;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string out = "results";
    std::vector<std::string> overrides;
};

int do_run(const RunOptions& opt) {
    std::vector<smcg::ExperimentConfig> experiments;
    if (!opt.preset.empty()) {
        experiments = smcg::preset(opt.preset, opt.runs.value_or(50), opt.seed.value_or(1));
    } else {
        experiments.push_back(smcg::load_config(opt.config));
        if (opt.runs) experiments.back().runs = *opt.runs;
        if (opt.seed) experiments.back().master_seed = *opt.seed;
    }

    for (auto& cfg : experiments) {
        if (!opt.overrides.empty()) cfg = smcg::apply_overrides(cfg, opt.overrides);
        if (opt.threads) cfg.threads = *opt.threads;
        smcg::validate(cfg);
    }

    const std::filesystem::path out_dir = opt.out;
    std::filesystem::create_directories(out_dir);
    std::vector<smcg::AggregateResult> results;
    bool any_failure = false;
    for (const auto& cfg : experiments) {
        std::cerr << "running " << cfg.name << ": " << cfg.runs << " runs x " << cfg.scenario.snapshots
                  << " snapshots, seed " << cfg.master_seed << '\n';
        auto result = smcg::run_experiment(cfg);
        for (const auto& f : result.failures) {
            std::cerr << "  run " << f.run << " failed: " << f.message << '\n';
            any_failure = true;
        }
        smcg::emit_csv(result, out_dir / (cfg.name + ".csv"));
        std::ofstream(out_dir / (cfg.name + ".ini")) << smcg::format_config(cfg);

        for (const auto& a : result.algorithms) {
            std::printf("%-14s %-12s final SINR %7.2f dB  update rate %6.2f%%", cfg.name.c_str(), a.label.c_str(),
                        a.mean_sinr_db.back(), 100.0 * a.mean_update_rate);
            if (a.complexity)
                std::printf("  ops %lld add / %lld mul", static_cast<long long>(a.complexity->additions),
                            static_cast<long long>(a.complexity->multiplications));
            std::printf("\n");
        }
        results.push_back(std::move(result));
    }
    smcg::emit_summary(results, out_dir / "summary.csv");
    return any_failure ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Set-membership CG adaptive beamforming simulator"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run = app.add_subcommand("run", "Run a preset or a config file");
    auto* preset_opt = run->add_option("--preset", run_opt.preset, "Preset name (see list-presets)");
    auto* config_opt = run->add_option("--config", run_opt.config, "Config file")->check(CLI::ExistingFile);
    preset_opt->excludes(config_opt);
    run->add_option("--runs", run_opt.runs, "Monte-Carlo runs")->check(CLI::PositiveNumber);
    run->add_option("--seed", run_opt.seed, "Master seed");
    run->add_option("--threads", run_opt.threads, "Worker threads (0 = all cores)");
    run->add_option("--out", run_opt.out, "Output directory")->capture_default_str();
    run->add_option("--set", run_opt.overrides, "Override a config key, e.g. scenario.snr_db=20")->take_all();
    run->callback([&] {
        if (run_opt.preset.empty() && run_opt.config.empty())
            throw CLI::RequiredError("--preset or --config");
    });

    smcg::ComplexityTableSpec cx;
    std::string cx_out = "complexity.csv";
    auto* complexity = app.add_subcommand("complexity", "Write the arithmetic-cost table versus array size");
    complexity->add_option("--m-min", cx.m_min, "Smallest array size")->capture_default_str()->check(CLI::PositiveNumber);
    complexity->add_option("--m-max", cx.m_max, "Largest array size")->capture_default_str()->check(CLI::PositiveNumber);
    complexity->add_option("--snapshots", cx.N, "Snapshots N")->capture_default_str()->check(CLI::PositiveNumber);
    complexity->add_option("--projections", cx.L, "Data-reuse order L of SM-AP")->capture_default_str();
    complexity->add_option("--out", cx_out, "Output CSV")->capture_default_str();

    auto* list = app.add_subcommand("list-presets", "Show the available presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run) return do_run(run_opt);
        if (*complexity) {
            smcg::emit_complexity_table(cx, cx_out);
            std::cerr << "wrote " << cx_out << '\n';
            return 0;
        }
        if (*list) {
            for (const auto& name : smcg::preset_names())
                std::printf("%-6s %s\n", name.c_str(), smcg::preset_description(name).c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
