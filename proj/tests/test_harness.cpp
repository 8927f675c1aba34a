#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "smcg/harness.hpp"

using namespace smcg;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.name = "small";
    cfg.runs = 3;
    cfg.master_seed = 5;
    cfg.threads = 1;
    cfg.scenario.sensors = 8;
    cfg.scenario.sources = 4;
    cfg.scenario.snapshots = 300;
    AlgorithmSpec sm;
    sm.label = "smcg";
    AlgorithmSpec rls;
    rls.label = "rls";
    rls.kind = AlgorithmKind::ConstrainedRls;
    AlgorithmSpec mvdr;
    mvdr.label = "mvdr";
    mvdr.kind = AlgorithmKind::Mvdr;
    cfg.algorithms = {sm, rls, mvdr};
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "smcg_test_harness";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("scenario construction") {
    ScenarioSpec spec;
    spec.sources = 8;
    spec.changes = {{3000, 4}};
    spec.snapshots = 5000;
    RunRng rng(9);
    const Scenario sc = build_scenario(spec, rng);
    REQUIRE(sc.epochs.size() == 2);
    CHECK(sc.epochs[0].sources.size() == 8);
    CHECK(sc.epochs[1].sources.size() == 12);
    CHECK(active_sources(sc, 2999).size() == 8);
    CHECK(active_sources(sc, 3000).size() == 12);
    const double noise = spec.resolved_noise_power();
    CHECK(noise == doctest::Approx(0.1));
    CHECK(sc.noise_power == noise);
    for (const auto& s : sc.epochs[1].sources) {
        if (s.is_desired) {
            CHECK(s.doa_degrees == 90);
            CHECK(s.power == doctest::Approx(1.0));
        } else {
            CHECK(s.doa_degrees >= 20);
            CHECK(s.doa_degrees <= 160);
            CHECK(std::abs(s.doa_degrees - 90) >= 5);
            CHECK(s.power == doctest::Approx(noise * 1000));
        }
    }
    for (std::size_t k = 0; k < 8; ++k)
        CHECK(sc.epochs[1].sources[k].doa_degrees == sc.epochs[0].sources[k].doa_degrees);

    spec.noise_power = 2.0;
    RunRng rng2(9);
    const Scenario explicit_noise = build_scenario(spec, rng2);
    CHECK(explicit_noise.epochs[0].sources[0].power == doctest::Approx(20.0));
}

TEST_CASE("bound policies are built from the algorithm spec") {
    ComplexVectorXd w0 = ComplexVectorXd::Constant(4, 0.25);
    AlgorithmSpec a;
    a.bound = BoundKind::Fixed;
    a.fixed_delta = 0.8;
    CHECK(current_bound(make_bound_policy(a, w0, 1.0)) == 0.8);
    a.fixed_noise_factor = 5;
    CHECK(current_bound(make_bound_policy(a, w0, 1.0)) == doctest::Approx(std::sqrt(5.0)));
    a.bound = BoundKind::Pdb;
    CHECK(current_bound(make_bound_policy(a, w0, 1.0)) == doctest::Approx(std::sqrt(21.0 * 0.25)));
    a.bound = BoundKind::Pidb;
    CHECK(current_bound(make_bound_policy(a, w0, 1.0)) == doctest::Approx(std::sqrt(19.0 * 0.25)));
}

TEST_CASE("validation reports the offending key") {
    auto cfg = small_config();
    CHECK_NOTHROW(validate(cfg));

    auto bad = cfg;
    bad.runs = 0;
    CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("experiment.runs"), std::invalid_argument);
    bad = cfg;
    bad.scenario.snapshots = 0;
    CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("scenario.snapshots"), std::invalid_argument);
    bad = cfg;
    bad.scenario.sources = 9;
    CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("scenario.sources"), std::invalid_argument);
    bad = cfg;
    bad.algorithms[0].pidb_varrho = 19;
    CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("algorithm.smcg.pidb_varrho"), std::invalid_argument);
    bad = cfg;
    bad.algorithms[1].label = "smcg";
    CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("duplicate"), std::invalid_argument);
    bad = cfg;
    bad.algorithms.clear();
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = cfg;
    bad.scenario.changes = {{400, 1}};
    CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("scenario.changes"), std::invalid_argument);
    CHECK_THROWS_AS(run_experiment(bad), std::invalid_argument);
}

TEST_CASE("config text round-trips") {
    const auto cfg = preset("fig5", 7, 11).front();
    const std::string text = format_config(cfg);
    const auto back = parse_config(text);
    CHECK(format_config(back) == text);
    CHECK(config_hash(back) == config_hash(cfg));
    CHECK(back.runs == 7);
    CHECK(back.master_seed == 11);
    REQUIRE(back.algorithms.size() == cfg.algorithms.size());
    CHECK(back.algorithms[0].label == "fixed_0.8");
    CHECK(back.algorithms[3].bound == BoundKind::Pdb);

    const auto changed = apply_overrides(cfg, {"scenario.snr_db=20", "algorithm.pidb.pidb_epsilon=0.01",
                                               "algorithm.fixed_0.8.fixed_delta=0.7"});
    CHECK(changed.scenario.snr_db == 20);
    CHECK(changed.algorithms[4].pidb_epsilon == 0.01);
    CHECK(changed.algorithms[0].fixed_delta == 0.7);
    CHECK(config_hash(changed) != config_hash(cfg));
}

TEST_CASE("config parsing rejects malformed input") {
    const std::string ok =
        "[experiment]\nruns = 2\nseed = 3\n[scenario]\nsensors = 8\nsources = 3\nsnapshots = 100\n"
        "changes = 50:2\n[algorithm.a]\nkind = smcg\nbound = pdb\n[algorithm.b]\nkind = mvdr\n";
    const auto cfg = parse_config(ok);
    CHECK(cfg.runs == 2);
    REQUIRE(cfg.scenario.changes.size() == 1);
    CHECK(cfg.scenario.changes[0].start == 50);
    CHECK(cfg.scenario.changes[0].added_interferers == 2);
    CHECK(cfg.algorithms[0].bound == BoundKind::Pdb);

    CHECK_THROWS_WITH_AS(parse_config(ok + "[algorithm.c]\nkind = lms\n"), doctest::Contains("unknown algorithm kind"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("[scenario]\nsnr = 3\n"), doctest::Contains("[scenario] snr"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("[scenario]\nsnr_db = 3x\n"), doctest::Contains("trailing"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("[experiment]\nseed = -4\n"), doctest::Contains("unsigned"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("[experiment]\nruns = 2.5\n"), doctest::Contains("integer"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("[output]\nx = 1\n"), doctest::Contains("unknown section"),
                         std::invalid_argument);
    CHECK_THROWS_AS(parse_config("[experiment\n"), std::invalid_argument);
    CHECK_THROWS_AS(apply_overrides(cfg, {"scenario.snr_db"}), std::invalid_argument);
    CHECK_THROWS_AS(apply_overrides(cfg, {"bogus.key=1"}), std::invalid_argument);
    CHECK_THROWS_AS(load_config("/nonexistent/file.ini"), std::runtime_error);
}

TEST_CASE("experiments are deterministic and independent of thread count") {
    auto cfg = small_config();
    const auto a = run_experiment(cfg);
    cfg.threads = 3;
    const auto b = run_experiment(cfg);
    const fs::path dir = scratch_dir();
    emit_csv(a, dir / "a.csv");
    emit_csv(b, dir / "b.csv");
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(a.runs_completed == 3);
    CHECK(a.failures.empty());

    cfg.master_seed = 6;
    const auto c = run_experiment(cfg);
    emit_csv(c, dir / "c.csv");
    CHECK(slurp(dir / "a.csv") != slurp(dir / "c.csv"));
}

TEST_CASE("aggregates follow their definitions") {
    auto cfg = small_config();
    const auto agg = run_experiment(cfg);
    std::vector<RunOutput> runs;
    for (int r = 0; r < cfg.runs; ++r) runs.push_back(simulate_run(cfg, r));

    const auto& sm = agg.algorithm("smcg");
    double rate = 0;
    for (const auto& r : runs) rate += update_rate(r.traces[0]);
    CHECK(sm.mean_update_rate == doctest::Approx(rate / 3).epsilon(1e-15));
    CHECK(sm.update_rate_cum.back() == doctest::Approx(rate / 3).epsilon(1e-12));

    for (long i : {0L, 150L, 299L}) {
        double lin = 0, delta = 0;
        for (const auto& r : runs) {
            lin += std::pow(10.0, r.traces[0].records[static_cast<std::size_t>(i)].sinr_db / 10);
            delta += r.traces[0].records[static_cast<std::size_t>(i)].delta;
        }
        CHECK(sm.mean_sinr_db[static_cast<std::size_t>(i)] == doctest::Approx(10 * std::log10(lin / 3)).epsilon(1e-12));
        CHECK(sm.mean_delta[static_cast<std::size_t>(i)] == doctest::Approx(delta / 3).epsilon(1e-12));
    }
    CHECK(agg.algorithm("rls").mean_update_rate == 1.0);
    CHECK(agg.algorithm("mvdr").mean_update_rate == 1.0);
    CHECK(agg.algorithm("mvdr").mean_delta.front() == 0.0);
    CHECK(sm.complexity.has_value());
    CHECK_FALSE(agg.algorithm("mvdr").complexity.has_value());
    CHECK(sm.max_constraint_error <= 1e-8);
    CHECK_THROWS_AS(agg.algorithm("nope"), std::out_of_range);
}

TEST_CASE("CSV layout") {
    auto cfg = small_config();
    cfg.runs = 1;
    const auto res = run_experiment(cfg);
    const fs::path path = scratch_dir() / "layout.csv";
    emit_csv(res, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "snapshot,algorithm,mean_sinr_db,mean_delta,update_rate_cum");
    long rows = 0;
    std::string first;
    while (std::getline(in, line)) {
        if (rows == 0) first = line;
        ++rows;
    }
    CHECK(rows == 300 * 3);
    CHECK(first.rfind("1,smcg,", 0) == 0);

    std::ofstream(scratch_dir() / "plain_file") << "x";
    CHECK_THROWS_AS(emit_csv(res, scratch_dir() / "plain_file" / "y.csv"), std::runtime_error);
    emit_summary({res}, scratch_dir() / "summary.csv");
    std::ifstream summary(scratch_dir() / "summary.csv");
    std::getline(summary, line);
    CHECK(line.rfind("experiment,algorithm,", 0) == 0);
}

TEST_CASE("complexity table") {
    ComplexityTableSpec spec;
    spec.m_min = 16;
    spec.m_max = 16;
    const fs::path path = scratch_dir() / "cx.csv";
    emit_complexity_table(spec, path);
    const std::string text = slurp(path);
    CHECK(text.find("16,SM-CG,0.06,70760,77680\n") != std::string::npos);
    CHECK(text.find("16,SG,1,47000,65000\n") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 8);

    spec.m_max = 8;
    CHECK_THROWS_AS(emit_complexity_table(spec, path), std::invalid_argument);
}

TEST_CASE("presets") {
    const auto names = preset_names();
    CHECK(names == std::vector<std::string>{"fig4", "fig5", "fig6", "fig8", "fig9"});
    for (const auto& n : names) {
        CHECK_FALSE(preset_description(n).empty());
        for (const auto& cfg : preset(n, 2, 3)) {
            CHECK_NOTHROW(validate(cfg));
            CHECK(cfg.runs == 2);
            CHECK(cfg.master_seed == 3);
        }
    }
    const auto fig6 = preset("fig6").front();
    CHECK(fig6.scenario.snapshots == 3000);
    CHECK(fig6.scenario.sources == 10);
    CHECK(fig6.scenario.inr_db == 30);
    CHECK(fig6.algorithms.front().bound == BoundKind::Pidb);
    CHECK(preset("fig8").size() == 7);
    CHECK(preset("fig8")[6].scenario.snr_db == 30);
    const auto fig9 = preset("fig9").front();
    CHECK(fig9.scenario.sources == 8);
    REQUIRE(fig9.scenario.changes.size() == 1);
    CHECK(fig9.scenario.changes[0].start == 3000);
    CHECK(fig9.scenario.changes[0].added_interferers == 4);
    CHECK(preset("fig4").front().algorithms.front().fixed_noise_factor == 5);
    CHECK_THROWS_AS(preset("fig7"), std::invalid_argument);
    CHECK_THROWS_AS(preset_description("fig7"), std::invalid_argument);
}
