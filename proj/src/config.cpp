#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "smcg/harness.hpp"

namespace smcg {
namespace {

using boost::property_tree::ptree;

constexpr const char* kAlgorithmPrefix = "algorithm.";

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

[[noreturn]] void bad_key(const std::string& section, const std::string& key, const std::string& why) {
    throw std::invalid_argument("config [" + section + "] " + key + ": " + why);
}

double to_double(const std::string& section, const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double x = 0;
    try {
        x = std::stod(text, &used);
    } catch (const std::logic_error&) {
        bad_key(section, key, "expected a number, got '" + text + "'");
    }
    if (used != text.size()) bad_key(section, key, "trailing characters in '" + text + "'");
    return x;
}

long long to_integer(const std::string& section, const std::string& key, const std::string& text) {
    const double x = to_double(section, key, text);
    if (x != static_cast<double>(static_cast<long long>(x))) bad_key(section, key, "expected an integer");
    return static_cast<long long>(x);
}

std::uint64_t to_seed(const std::string& section, const std::string& key, const std::string& text) {
    std::size_t used = 0;
    std::uint64_t x = 0;
    if (text.empty() || text[0] == '-') bad_key(section, key, "expected an unsigned integer, got '" + text + "'");
    try {
        x = std::stoull(text, &used, 0);
    } catch (const std::logic_error&) {
        bad_key(section, key, "expected an unsigned integer, got '" + text + "'");
    }
    if (used != text.size()) bad_key(section, key, "trailing characters in '" + text + "'");
    return x;
}

bool to_bool(const std::string& section, const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    bad_key(section, key, "expected true/false, got '" + text + "'");
}

AlgorithmKind parse_kind(const std::string& section, const std::string& text) {
    for (auto k : {AlgorithmKind::SmCg, AlgorithmKind::FrostSg, AlgorithmKind::ConstrainedRls,
                   AlgorithmKind::ConstrainedCg, AlgorithmKind::Mvdr})
        if (to_string(k) == text) return k;
    bad_key(section, "kind", "unknown algorithm kind '" + text + "' (smcg, frost_sg, rls, cg, mvdr)");
}

BoundKind parse_bound(const std::string& section, const std::string& text) {
    for (auto k : {BoundKind::Fixed, BoundKind::Pdb, BoundKind::Pidb})
        if (to_string(k) == text) return k;
    bad_key(section, "bound", "unknown bound '" + text + "' (fixed, pdb, pidb)");
}

std::vector<EpochChange> parse_changes(const std::string& section, const std::string& text) {
    std::vector<EpochChange> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos) bad_key(section, "changes", "expected start:count entries, got '" + item + "'");
        out.push_back({static_cast<long>(to_integer(section, "changes", item.substr(0, colon))),
                       static_cast<int>(to_integer(section, "changes", item.substr(colon + 1)))});
    }
    return out;
}

std::string format_changes(const std::vector<EpochChange>& changes) {
    std::string s;
    for (const auto& c : changes) {
        if (!s.empty()) s += ',';
        s += std::to_string(c.start) + ':' + std::to_string(c.added_interferers);
    }
    return s;
}

void read_experiment(const ptree& sec, ExperimentConfig& cfg) {
    const std::string name = "experiment";
    for (const auto& [key, node] : sec) {
        const std::string v = node.data();
        if (key == "name") cfg.name = v;
        else if (key == "runs") cfg.runs = static_cast<int>(to_integer(name, key, v));
        else if (key == "seed") cfg.master_seed = to_seed(name, key, v);
        else if (key == "threads") cfg.threads = static_cast<unsigned>(to_integer(name, key, v));
        else bad_key(name, key, "unknown key");
    }
}

void read_scenario(const ptree& sec, ScenarioSpec& sc) {
    const std::string name = "scenario";
    for (const auto& [key, node] : sec) {
        const std::string v = node.data();
        if (key == "sensors") sc.sensors = static_cast<int>(to_integer(name, key, v));
        else if (key == "spacing") sc.spacing = to_double(name, key, v);
        else if (key == "gamma") sc.gamma = to_double(name, key, v);
        else if (key == "snr_db") sc.snr_db = to_double(name, key, v);
        else if (key == "inr_db") sc.inr_db = to_double(name, key, v);
        else if (key == "sources") sc.sources = static_cast<int>(to_integer(name, key, v));
        else if (key == "snapshots") sc.snapshots = static_cast<long>(to_integer(name, key, v));
        else if (key == "desired_doa") sc.desired_doa = to_double(name, key, v);
        else if (key == "doa_min") sc.doa_min = to_double(name, key, v);
        else if (key == "doa_max") sc.doa_max = to_double(name, key, v);
        else if (key == "doa_guard") sc.doa_guard = to_double(name, key, v);
        else if (key == "noise_power") sc.noise_power = to_double(name, key, v);
        else if (key == "changes") sc.changes = parse_changes(name, v);
        else bad_key(name, key, "unknown key");
    }
}

AlgorithmSpec read_algorithm(const std::string& name, const ptree& sec) {
    AlgorithmSpec a;
    a.label = name.substr(std::string(kAlgorithmPrefix).size());
    for (const auto& [key, node] : sec) {
        const std::string v = node.data();
        if (key == "kind") a.kind = parse_kind(name, v);
        else if (key == "eta") a.eta = to_double(name, key, v);
        else if (key == "lambda_min") a.lambda_min = to_double(name, key, v);
        else if (key == "lambda_max") a.lambda_max = to_double(name, key, v);
        else if (key == "r_hat_loading") a.r_hat_loading = to_double(name, key, v);
        else if (key == "bound") a.bound = parse_bound(name, v);
        else if (key == "fixed_delta") a.fixed_delta = to_double(name, key, v);
        else if (key == "fixed_noise_factor") a.fixed_noise_factor = to_double(name, key, v);
        else if (key == "pdb_rho") a.pdb_rho = to_double(name, key, v);
        else if (key == "pdb_varsigma") a.pdb_varsigma = to_double(name, key, v);
        else if (key == "pidb_varrho") a.pidb_varrho = to_double(name, key, v);
        else if (key == "pidb_varsigma") a.pidb_varsigma = to_double(name, key, v);
        else if (key == "pidb_epsilon") a.pidb_epsilon = to_double(name, key, v);
        else if (key == "sg_mu") a.sg_mu = to_double(name, key, v);
        else if (key == "sg_normalized") a.sg_normalized = to_bool(name, key, v);
        else if (key == "rls_forgetting") a.rls_forgetting = to_double(name, key, v);
        else if (key == "rls_loading") a.rls_loading = to_double(name, key, v);
        else if (key == "cg_forgetting") a.cg_forgetting = to_double(name, key, v);
        else bad_key(name, key, "unknown key");
    }
    return a;
}

ExperimentConfig from_tree(const ptree& tree) {
    ExperimentConfig cfg;
    std::set<std::string> labels;
    for (const auto& [section, sec] : tree) {
        if (section == "experiment") read_experiment(sec, cfg);
        else if (section == "scenario") read_scenario(sec, cfg.scenario);
        else if (section.rfind(kAlgorithmPrefix, 0) == 0) {
            auto a = read_algorithm(section, sec);
            if (!labels.insert(a.label).second) throw std::invalid_argument("config: duplicate algorithm " + a.label);
            cfg.algorithms.push_back(std::move(a));
        } else {
            throw std::invalid_argument("config: unknown section [" + section + "]");
        }
    }
    return cfg;
}

ptree to_tree(const ExperimentConfig& cfg) {
    ptree tree;
    ptree exp;
    exp.put("name", cfg.name);
    exp.put("runs", cfg.runs);
    exp.put("seed", cfg.master_seed);
    exp.put("threads", cfg.threads);
    tree.push_back({"experiment", exp});

    const auto& s = cfg.scenario;
    ptree sc;
    sc.put("sensors", s.sensors);
    sc.put("spacing", format_number(s.spacing));
    sc.put("gamma", format_number(s.gamma));
    sc.put("snr_db", format_number(s.snr_db));
    sc.put("inr_db", format_number(s.inr_db));
    sc.put("sources", s.sources);
    sc.put("snapshots", s.snapshots);
    sc.put("desired_doa", format_number(s.desired_doa));
    sc.put("doa_min", format_number(s.doa_min));
    sc.put("doa_max", format_number(s.doa_max));
    sc.put("doa_guard", format_number(s.doa_guard));
    sc.put("noise_power", format_number(s.noise_power));
    sc.put("changes", format_changes(s.changes));
    tree.push_back({"scenario", sc});

    for (const auto& a : cfg.algorithms) {
        ptree al;
        al.put("kind", std::string(to_string(a.kind)));
        switch (a.kind) {
            case AlgorithmKind::SmCg:
                al.put("eta", format_number(a.eta));
                al.put("lambda_min", format_number(a.lambda_min));
                al.put("lambda_max", format_number(a.lambda_max));
                al.put("r_hat_loading", format_number(a.r_hat_loading));
                al.put("bound", std::string(to_string(a.bound)));
                al.put("fixed_delta", format_number(a.fixed_delta));
                al.put("fixed_noise_factor", format_number(a.fixed_noise_factor));
                al.put("pdb_rho", format_number(a.pdb_rho));
                al.put("pdb_varsigma", format_number(a.pdb_varsigma));
                al.put("pidb_varrho", format_number(a.pidb_varrho));
                al.put("pidb_varsigma", format_number(a.pidb_varsigma));
                al.put("pidb_epsilon", format_number(a.pidb_epsilon));
                break;
            case AlgorithmKind::FrostSg:
                al.put("sg_mu", format_number(a.sg_mu));
                al.put("sg_normalized", a.sg_normalized ? "true" : "false");
                break;
            case AlgorithmKind::ConstrainedRls:
                al.put("rls_forgetting", format_number(a.rls_forgetting));
                al.put("rls_loading", format_number(a.rls_loading));
                break;
            case AlgorithmKind::ConstrainedCg:
                al.put("eta", format_number(a.eta));
                al.put("cg_forgetting", format_number(a.cg_forgetting));
                al.put("r_hat_loading", format_number(a.r_hat_loading));
                break;
            case AlgorithmKind::Mvdr: break;
        }
        tree.push_back({kAlgorithmPrefix + a.label, al});
    }
    return tree;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    auto cfg = from_tree(tree);
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string format_config(const ExperimentConfig& config) {
    std::ostringstream out;
    boost::property_tree::write_ini(out, to_tree(config));
    return out.str();
}

ExperimentConfig apply_overrides(const ExperimentConfig& config, const std::vector<std::string>& overrides) {
    ptree tree = to_tree(config);
    for (const auto& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("override '" + item + "': expected section.key=value");
        const std::string path = item.substr(0, eq);
        const auto dot = path.rfind('.');
        if (dot == std::string::npos || dot == 0)
            throw std::invalid_argument("override '" + item + "': expected section.key=value");
        const std::string section = path.substr(0, dot);
        const std::string key = path.substr(dot + 1);

        auto it = tree.find(section);
        if (it == tree.not_found()) {
            if (section.rfind(kAlgorithmPrefix, 0) != 0)
                throw std::invalid_argument("override '" + item + "': unknown section " + section);
            tree.push_back({section, ptree{}});
            it = tree.find(section);
        }
        it->second.put(ptree::path_type(key, '\0'), item.substr(eq + 1));
    }
    auto cfg = from_tree(tree);
    validate(cfg);
    return cfg;
}

std::string config_hash(const ExperimentConfig& config) {
    // FNV-1a over the canonical text form.
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : format_config(config)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace smcg
