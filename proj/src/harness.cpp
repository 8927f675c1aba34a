#include "smcg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>
#include <variant>

#include "smcg/baselines.hpp"
#include "smcg/smcg_core.hpp"

namespace smcg {

double ScenarioSpec::resolved_noise_power() const {
    return noise_power > 0 ? noise_power : std::pow(10.0, -snr_db / 10.0);
}

std::string_view to_string(AlgorithmKind kind) {
    switch (kind) {
        case AlgorithmKind::SmCg: return "smcg";
        case AlgorithmKind::FrostSg: return "frost_sg";
        case AlgorithmKind::ConstrainedRls: return "rls";
        case AlgorithmKind::ConstrainedCg: return "cg";
        case AlgorithmKind::Mvdr: return "mvdr";
    }
    return "?";
}

std::string_view to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::Fixed: return "fixed";
        case BoundKind::Pdb: return "pdb";
        case BoundKind::Pidb: return "pidb";
    }
    return "?";
}

const AlgorithmAggregate& AggregateResult::algorithm(const std::string& label) const {
    for (const auto& a : algorithms)
        if (a.label == label) return a;
    throw std::out_of_range("no algorithm labelled " + label);
}

void validate(const ExperimentConfig& cfg) {
    const auto fail = [](const std::string& key, const std::string& why) {
        throw std::invalid_argument("config " + key + ": " + why);
    };
    const auto in_open_unit = [](double x) { return x > 0 && x < 1; };

    if (cfg.runs < 1) fail("experiment.runs", "must be >= 1");
    const auto& s = cfg.scenario;
    if (s.sensors < 1) fail("scenario.sensors", "must be >= 1");
    if (!(s.spacing > 0)) fail("scenario.spacing", "must be > 0");
    if (s.snapshots < 1) fail("scenario.snapshots", "must be >= 1");
    if (s.sources < 1) fail("scenario.sources", "must be >= 1 (the desired user)");
    if (!std::isfinite(s.snr_db)) fail("scenario.snr_db", "must be finite");
    if (!std::isfinite(s.inr_db)) fail("scenario.inr_db", "must be finite");
    if (!(s.desired_doa >= 0 && s.desired_doa <= 180)) fail("scenario.desired_doa", "must lie in [0, 180]");
    if (!(s.doa_min >= 0 && s.doa_min < s.doa_max && s.doa_max <= 180))
        fail("scenario.doa_min/doa_max", "need 0 <= doa_min < doa_max <= 180");
    if (!(s.doa_guard >= 0)) fail("scenario.doa_guard", "must be >= 0");
    if (!(s.doa_max - s.doa_min > 2 * s.doa_guard)) fail("scenario.doa_guard", "leaves no room for interferers");
    if (!std::isfinite(s.noise_power) || s.noise_power < 0) fail("scenario.noise_power", "must be >= 0 (0 = auto)");
    int total = s.sources;
    long prev = 1;
    for (const auto& c : s.changes) {
        if (c.start <= prev || c.start > s.snapshots) fail("scenario.changes", "starts must increase within (1, snapshots]");
        if (c.added_interferers < 1) fail("scenario.changes", "each change must add at least one interferer");
        total += c.added_interferers;
        prev = c.start;
    }
    if (total > s.sensors) fail("scenario.sources", "source count exceeds sensor count");

    if (cfg.algorithms.empty()) fail("algorithm", "at least one [algorithm.<label>] section required");
    std::set<std::string> labels;
    for (const auto& a : cfg.algorithms) {
        const std::string key = "algorithm." + a.label;
        if (a.label.empty() || a.label.find_first_of(" ,\t\"\n") != std::string::npos)
            fail(key, "label must be non-empty without spaces or commas");
        if (!labels.insert(a.label).second) fail(key, "duplicate label");
        if (a.kind == AlgorithmKind::SmCg || a.kind == AlgorithmKind::ConstrainedCg) {
            if (!(a.eta >= 0 && a.eta < 1)) fail(key + ".eta", "must lie in [0, 1)");
            if (!(a.r_hat_loading > 0)) fail(key + ".r_hat_loading", "must be > 0");
        }
        switch (a.kind) {
            case AlgorithmKind::SmCg:
                if (!(a.lambda_min > 0 && a.lambda_min <= a.lambda_max && a.lambda_max <= 1))
                    fail(key + ".lambda_min/lambda_max", "need 0 < lambda_min <= lambda_max <= 1");
                if (a.bound == BoundKind::Fixed && !(a.fixed_delta >= 0)) fail(key + ".fixed_delta", "must be >= 0");
                if (!(a.fixed_noise_factor >= 0)) fail(key + ".fixed_noise_factor", "must be >= 0");
                if (a.bound == BoundKind::Pdb) {
                    if (!in_open_unit(a.pdb_rho)) fail(key + ".pdb_rho", "must lie in (0, 1)");
                    if (!(a.pdb_varsigma > 1)) fail(key + ".pdb_varsigma", "must be > 1");
                }
                if (a.bound == BoundKind::Pidb) {
                    if (!in_open_unit(a.pidb_varrho)) fail(key + ".pidb_varrho", "must lie in (0, 1)");
                    if (!(a.pidb_varsigma > 1)) fail(key + ".pidb_varsigma", "must be > 1");
                    if (!(a.pidb_epsilon >= 0)) fail(key + ".pidb_epsilon", "must be >= 0");
                }
                break;
            case AlgorithmKind::FrostSg:
                if (!(a.sg_mu >= 0) || !std::isfinite(a.sg_mu)) fail(key + ".sg_mu", "must be >= 0");
                break;
            case AlgorithmKind::ConstrainedRls:
                if (!(a.rls_forgetting > 0 && a.rls_forgetting <= 1)) fail(key + ".rls_forgetting", "must lie in (0, 1]");
                if (!(a.rls_loading > 0)) fail(key + ".rls_loading", "must be > 0");
                break;
            case AlgorithmKind::ConstrainedCg:
                if (!(a.cg_forgetting > 0 && a.cg_forgetting <= 1)) fail(key + ".cg_forgetting", "must lie in (0, 1]");
                break;
            case AlgorithmKind::Mvdr: break;
        }
    }
}

namespace {

double draw_interferer_doa(const ScenarioSpec& spec, RunRng& rng) {
    std::uniform_real_distribution<double> doa(spec.doa_min, spec.doa_max);
    for (;;) {
        const double t = doa(rng);
        if (std::abs(t - spec.desired_doa) >= spec.doa_guard) return t;
    }
}

}  // namespace

Scenario build_scenario(const ScenarioSpec& spec, RunRng& rng) {
    const double noise = spec.resolved_noise_power();
    const double desired_power = noise * std::pow(10.0, spec.snr_db / 10.0);
    const double interferer_power = noise * std::pow(10.0, spec.inr_db / 10.0);

    Scenario sc;
    sc.geometry = {spec.sensors, spec.spacing};
    sc.noise_power = noise;
    sc.total_snapshots = spec.snapshots;
    sc.gamma = spec.gamma;

    Epoch first;
    first.start = 1;
    first.sources.push_back({spec.desired_doa, desired_power, true});
    for (int k = 1; k < spec.sources; ++k) first.sources.push_back({draw_interferer_doa(spec, rng), interferer_power, false});
    sc.epochs.push_back(first);

    for (const auto& change : spec.changes) {
        Epoch next{change.start, sc.epochs.back().sources};
        for (int k = 0; k < change.added_interferers; ++k)
            next.sources.push_back({draw_interferer_doa(spec, rng), interferer_power, false});
        sc.epochs.push_back(std::move(next));
    }
    validate(sc);
    return sc;
}

BoundPolicy<double> make_bound_policy(const AlgorithmSpec& spec, const ComplexVectorXd& w0, double noise_power) {
    switch (spec.bound) {
        case BoundKind::Fixed: {
            const double delta =
                spec.fixed_noise_factor > 0 ? std::sqrt(spec.fixed_noise_factor * noise_power) : spec.fixed_delta;
            return FixedBound<double>{delta};
        }
        case BoundKind::Pdb: return make_pdb(spec.pdb_rho, spec.pdb_varsigma, w0, noise_power);
        case BoundKind::Pidb:
            return make_pidb(spec.pidb_varrho, spec.pidb_varsigma, spec.pidb_epsilon, w0, noise_power);
    }
    throw std::invalid_argument("unknown bound kind");
}

namespace {

struct SmCgRunner {
    SmCgState<double> state;
    BoundPolicy<double> bound;
};

struct MvdrRunner {};

using Runner = std::variant<SmCgRunner, BaselineState<double>, MvdrRunner>;

Runner make_runner(const AlgorithmSpec& spec, const ComplexVectorXd& a0, double gamma, double noise) {
    switch (spec.kind) {
        case AlgorithmKind::SmCg: {
            auto st = initialize<double>(a0, gamma, spec.eta, {spec.lambda_min, spec.lambda_max}, spec.r_hat_loading);
            auto bound = make_bound_policy(spec, st.w, noise);
            return SmCgRunner{std::move(st), std::move(bound)};
        }
        case AlgorithmKind::FrostSg:
            return BaselineState<double>{make_frost_sg<double>(a0, gamma, spec.sg_mu, spec.sg_normalized)};
        case AlgorithmKind::ConstrainedRls:
            return BaselineState<double>{make_constrained_rls<double>(a0, gamma, spec.rls_forgetting, spec.rls_loading)};
        case AlgorithmKind::ConstrainedCg:
            return BaselineState<double>{
                make_constrained_cg<double>(a0, gamma, spec.eta, spec.cg_forgetting, spec.r_hat_loading)};
        case AlgorithmKind::Mvdr: return MvdrRunner{};
    }
    throw std::invalid_argument("unknown algorithm kind");
}

struct EpochStats {
    HermitianMatrixXd desired;
    HermitianMatrixXd interference;
    ComplexVectorXd mvdr;
};

}  // namespace

RunOutput simulate_run(const ExperimentConfig& cfg, int run) {
    RunRng rng(run_seed(cfg.master_seed, run));
    RunOutput out;
    out.scenario = build_scenario(cfg.scenario, rng);
    const Scenario& sc = out.scenario;
    const double noise = sc.noise_power;
    const double gamma = sc.gamma;
    const ComplexVectorXd a0 = desired_steering(sc);

    std::vector<EpochStats> epochs;
    for (const auto& ep : sc.epochs) {
        EpochStats e{desired_covariance(sc, ep.start), interference_covariance(sc, ep.start), {}};
        e.mvdr = mvdr_weights<double>(e.desired + e.interference, a0, gamma);
        epochs.push_back(std::move(e));
    }

    std::vector<Runner> runners;
    for (const auto& spec : cfg.algorithms) runners.push_back(make_runner(spec, a0, gamma, noise));
    out.traces.resize(runners.size());
    out.max_constraint_error.assign(runners.size(), 0.0);
    for (auto& t : out.traces) t.records.reserve(static_cast<std::size_t>(sc.total_snapshots));

    std::size_t epoch = 0;
    for (long i = 1; i <= sc.total_snapshots; ++i) {
        while (epoch + 1 < sc.epochs.size() && sc.epochs[epoch + 1].start <= i) ++epoch;
        const EpochStats& stats = epochs[epoch];
        const auto snap = generate_snapshot<double>(sc, i, rng);
        const ComplexVectorXd& r = snap.r;

        for (std::size_t k = 0; k < runners.size(); ++k) {
            TraceRecord rec;
            rec.snapshot = i;
            const ComplexVectorXd* w = nullptr;

            if (auto* sm = std::get_if<SmCgRunner>(&runners[k])) {
                const Complex<double> y = output(sm->state, r);
                refresh_bound(sm->bound, a0, r, y, sm->state.w, noise);
                const double delta = current_bound(sm->bound);
                const auto res = step(sm->state, r, delta);
                rec.output_power = std::norm(res.y);
                rec.delta = delta;
                rec.updated = res.updated;
                rec.lambda1 = res.lambda1;
                w = &sm->state.w;
            } else if (auto* base = std::get_if<BaselineState<double>>(&runners[k])) {
                rec.output_power = std::norm(baseline_step(*base, r));
                rec.updated = true;
                w = &baseline_weights(*base);
            } else {
                rec.output_power = std::norm(stats.mvdr.dot(r));
                rec.updated = true;
                w = &stats.mvdr;
            }

            rec.sinr_db = output_sinr<double>(*w, stats.desired, stats.interference);
            if (!std::isfinite(rec.sinr_db) || !std::isfinite(rec.output_power) || !std::isfinite(rec.delta))
                throw std::runtime_error(cfg.algorithms[k].label + ": non-finite value at snapshot " +
                                         std::to_string(i));
            const double err = std::abs(w->dot(a0) - gamma);
            out.max_constraint_error[k] = std::max(out.max_constraint_error[k], err);
            out.traces[k].push(rec);
        }
    }
    return out;
}

namespace {

std::optional<OpCounts> complexity_for(const AlgorithmSpec& spec, const ScenarioSpec& sc, double tau) {
    ComplexityParams p{sc.sensors, sc.snapshots, 1.0, 3};
    switch (spec.kind) {
        case AlgorithmKind::SmCg:
            p.tau = std::clamp(tau, 1.0 / static_cast<double>(sc.snapshots), 1.0);
            return complexity_counts(Algorithm::SmCg, p);
        case AlgorithmKind::FrostSg: return complexity_counts(Algorithm::Sg, p);
        case AlgorithmKind::ConstrainedRls: return complexity_counts(Algorithm::Rls, p);
        case AlgorithmKind::ConstrainedCg: return complexity_counts(Algorithm::Cg, p);
        case AlgorithmKind::Mvdr: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

AggregateResult run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    const long N = cfg.scenario.snapshots;
    const std::size_t n_alg = cfg.algorithms.size();

    std::vector<std::optional<RunOutput>> outputs(static_cast<std::size_t>(cfg.runs));
    std::vector<std::string> errors(static_cast<std::size_t>(cfg.runs));

    unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(cfg.runs));
    std::mutex next_mutex;
    int next_run = 0;
    const auto worker = [&] {
        for (;;) {
            int run;
            {
                std::lock_guard lock(next_mutex);
                if (next_run >= cfg.runs) return;
                run = next_run++;
            }
            try {
                outputs[static_cast<std::size_t>(run)] = simulate_run(cfg, run);
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(run)] = e.what();
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    }

    AggregateResult result;
    result.name = cfg.name;
    result.snapshots = N;
    result.runs_requested = cfg.runs;
    result.master_seed = cfg.master_seed;
    result.config_hash = config_hash(cfg);

    std::vector<std::vector<double>> sinr_sum(n_alg, std::vector<double>(static_cast<std::size_t>(N), 0.0));
    std::vector<std::vector<double>> delta_sum = sinr_sum;
    std::vector<std::vector<double>> rate_sum = sinr_sum;
    std::vector<double> update_rate_sum(n_alg, 0.0);
    std::vector<double> max_err(n_alg, 0.0);

    // Fixed run-index order keeps the sums bit-reproducible.
    for (int run = 0; run < cfg.runs; ++run) {
        const auto& out = outputs[static_cast<std::size_t>(run)];
        if (!out) {
            result.failures.push_back({run, errors[static_cast<std::size_t>(run)]});
            continue;
        }
        ++result.runs_completed;
        for (std::size_t k = 0; k < n_alg; ++k) {
            const auto& trace = out->traces[k];
            long updates = 0;
            for (long i = 0; i < N; ++i) {
                const auto& rec = trace.records[static_cast<std::size_t>(i)];
                if (rec.updated) ++updates;
                sinr_sum[k][static_cast<std::size_t>(i)] += std::pow(10.0, rec.sinr_db / 10.0);
                delta_sum[k][static_cast<std::size_t>(i)] += rec.delta;
                rate_sum[k][static_cast<std::size_t>(i)] += static_cast<double>(updates) / static_cast<double>(i + 1);
            }
            update_rate_sum[k] += update_rate(trace);
            max_err[k] = std::max(max_err[k], out->max_constraint_error[k]);
        }
    }
    if (result.runs_completed == 0)
        throw std::runtime_error("experiment " + cfg.name + ": every run failed; first error: " +
                                 result.failures.front().message);

    const double runs = result.runs_completed;
    for (std::size_t k = 0; k < n_alg; ++k) {
        AlgorithmAggregate agg;
        agg.label = cfg.algorithms[k].label;
        agg.kind = cfg.algorithms[k].kind;
        agg.mean_sinr_db.resize(static_cast<std::size_t>(N));
        agg.mean_delta.resize(static_cast<std::size_t>(N));
        agg.update_rate_cum.resize(static_cast<std::size_t>(N));
        for (std::size_t i = 0; i < static_cast<std::size_t>(N); ++i) {
            agg.mean_sinr_db[i] = 10.0 * std::log10(sinr_sum[k][i] / runs);
            agg.mean_delta[i] = delta_sum[k][i] / runs;
            agg.update_rate_cum[i] = rate_sum[k][i] / runs;
        }
        agg.mean_update_rate = update_rate_sum[k] / runs;
        agg.max_constraint_error = max_err[k];
        agg.complexity = complexity_for(cfg.algorithms[k], cfg.scenario, agg.mean_update_rate);
        result.algorithms.push_back(std::move(agg));
    }
    return result;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string g9(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

}  // namespace

void emit_csv(const AggregateResult& result, const std::filesystem::path& path) {
    if (result.snapshots < 1) throw std::invalid_argument("emit_csv: result has no snapshots");
    auto out = open_output(path);
    out << "snapshot,algorithm,mean_sinr_db,mean_delta,update_rate_cum\n";
    for (long i = 0; i < result.snapshots; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        for (const auto& a : result.algorithms)
            out << (i + 1) << ',' << a.label << ',' << g9(a.mean_sinr_db[idx]) << ',' << g9(a.mean_delta[idx]) << ','
                << g9(a.update_rate_cum[idx]) << '\n';
    }
    finish(out, path);
}

void emit_summary(const std::vector<AggregateResult>& results, const std::filesystem::path& path, long tail) {
    auto out = open_output(path);
    out << "experiment,algorithm,runs,update_rate,final_sinr_db,max_constraint_error,additions,multiplications\n";
    for (const auto& r : results) {
        for (const auto& a : r.algorithms) {
            const long from = std::max(0L, r.snapshots - tail);
            double sum = 0;
            for (long i = from; i < r.snapshots; ++i) sum += std::pow(10.0, a.mean_sinr_db[static_cast<std::size_t>(i)] / 10.0);
            const double final_db = 10.0 * std::log10(sum / static_cast<double>(r.snapshots - from));
            out << r.name << ',' << a.label << ',' << r.runs_completed << ',' << g9(a.mean_update_rate) << ','
                << g9(final_db) << ',' << g9(a.max_constraint_error) << ',';
            if (a.complexity) out << a.complexity->additions << ',' << a.complexity->multiplications;
            else out << ',';
            out << '\n';
        }
    }
    finish(out, path);
}

std::map<Algorithm, double> default_update_rates() {
    return {{Algorithm::Sg, 1.0},      {Algorithm::SmSg, 0.198}, {Algorithm::Rls, 1.0},   {Algorithm::SmRls, 0.063},
            {Algorithm::SmAp, 0.137},  {Algorithm::Cg, 1.0},     {Algorithm::DsCg, 0.221}, {Algorithm::SmCg, 0.060}};
}

void emit_complexity_table(const ComplexityTableSpec& spec, const std::filesystem::path& path) {
    if (spec.m_min < 1 || spec.m_max < spec.m_min) throw std::invalid_argument("emit_complexity_table: empty m range");
    auto tau = default_update_rates();
    for (const auto& [alg, t] : spec.tau) tau[alg] = t;

    auto out = open_output(path);
    out << "m,algorithm,tau,additions,multiplications\n";
    for (std::int64_t m = spec.m_min; m <= spec.m_max; ++m) {
        for (Algorithm alg : kAllAlgorithms) {
            const double t = uses_update_rate(alg) ? tau.at(alg) : 1.0;
            const auto c = complexity_counts(alg, {m, spec.N, t, spec.L});
            out << m << ',' << to_string(alg) << ',' << g9(t) << ',' << c.additions << ',' << c.multiplications << '\n';
        }
    }
    finish(out, path);
}

}  // namespace smcg
