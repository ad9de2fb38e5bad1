#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "srlda/classifiers.hpp"
#include "srlda/errors.hpp"
#include "srlda/experiments.hpp"

namespace srlda {

/// Surface export settings. Population mode takes alpha, J0, J1, pi0 and
/// spikes directly; data mode estimates them from a training file.
struct SurfaceConfig {
    bool from_data = false;
    Objective objective = Objective::plain;
    double alpha = 1.0;
    double J0 = 1.0;
    double J1 = 1.0;
    double pi0 = 0.5;
    std::vector<SurfaceSpike> spikes;
    double step = 0.01;
};

/// Every key of every section, with defaults materialised at parse time.
struct RunConfig {
    // [run]
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::vector<ClassifierKind> classifiers{ClassifierKind::srlda, ClassifierKind::rlda};
    std::optional<std::string> out;

    // [simulation]
    SimulationConfig simulation;
    std::vector<Index> simulation_n{100};
    double class0_fraction = 0.5;

    // [fit]
    FitConfig fit;
    bool fit_pi0_auto = true;

    // [data]
    std::optional<std::string> data_path;
    CsvSchema schema;

    // [benchmark]
    RealDataConfig benchmark;

    // [surface]
    SurfaceConfig surface;

    /// Split of a simulated training size n into (n0, n1).
    std::pair<Index, Index> simulation_split(Index n) const {
        const Index n0 = Index(std::floor(class0_fraction * double(n)));
        return {n0, n - n0};
    }

    nlohmann::ordered_json resolved() const;
};

namespace detail {

inline Error config_error(const std::string& section, const std::string& key, const std::string& msg) {
    return Error(Errc::config_error, "config [" + section + "] " + key + ": " + msg);
}

inline double parse_real(const std::string& sec, const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size() && std::isfinite(d)) return d;
    } catch (const std::exception&) {
    }
    throw config_error(sec, key, "expected a number, got '" + v + "'");
}

inline long long parse_integer(const std::string& sec, const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long d = std::stoll(v, &used);
        if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw config_error(sec, key, "expected an integer, got '" + v + "'");
}

inline bool parse_flag(const std::string& sec, const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw config_error(sec, key, "expected true/false, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v, char sep = ',') {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(v);
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline std::vector<double> parse_real_list(const std::string& sec, const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& s : split_list(v)) out.push_back(parse_real(sec, key, s));
    return out;
}

inline std::vector<Index> parse_index_list(const std::string& sec, const std::string& key, const std::string& v) {
    std::vector<Index> out;
    for (const auto& s : split_list(v)) {
        const long long x = parse_integer(sec, key, s);
        if (x <= 0) throw config_error(sec, key, "values must be positive");
        out.push_back(Index(x));
    }
    if (out.empty()) throw config_error(sec, key, "list is empty");
    return out;
}

inline std::vector<ClassifierKind> parse_classifier_list(const std::string& v) {
    std::vector<ClassifierKind> out;
    for (const auto& s : split_list(v)) {
        try {
            out.push_back(parse_classifier_kind(s));
        } catch (const Error& e) {
            throw config_error("run", "classifiers", e.what());
        }
    }
    if (out.empty()) throw config_error("run", "classifiers", "no classifiers listed");
    return out;
}

inline std::string classifier_list_string(const std::vector<ClassifierKind>& kinds) {
    std::string s;
    for (std::size_t k = 0; k < kinds.size(); ++k) s += (k ? "," : "") + to_string(kinds[k]);
    return s;
}

/// "lambda:b" or "lambda:b:a"; a defaults to the angle factor at J.
inline std::vector<SurfaceSpike> parse_surface_spikes(const std::string& v, double J) {
    std::vector<SurfaceSpike> out;
    for (const auto& item : split_list(v)) {
        const auto parts = split_list(item, ':');
        if (parts.size() < 2 || parts.size() > 3)
            throw config_error("surface", "spikes", "each spike is lambda:b or lambda:b:a, got '" + item + "'");
        SurfaceSpike s;
        s.lambda = parse_real("surface", "spikes", parts[0]);
        s.b = parse_real("surface", "spikes", parts[1]);
        s.group = s.lambda > 0 ? SpikeGroup::positive : SpikeGroup::negative;
        try {
            s.a = parts.size() == 3 ? parse_real("surface", "spikes", parts[2]) : angle_factor(s.lambda, J);
        } catch (const Error& e) {
            throw config_error("surface", "spikes", e.what());
        }
        out.push_back(s);
    }
    return out;
}

inline const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"run", {"seed", "threads", "classifiers", "out"}},
        {"simulation",
         {"p", "n_values", "class0_fraction", "sigma2", "head_weights", "tail_weights", "a", "mean_scaling", "pi0",
          "repetitions", "test_size"}},
        {"fit", {"pi0", "sigma2", "r1", "r2", "grid_step", "delta", "refine", "rlda_gamma"}},
        {"data", {"path", "label_column", "id_columns", "class0", "class1", "standardize"}},
        {"benchmark", {"n_values", "repetitions", "q0"}},
        {"surface", {"source", "objective", "alpha", "J0", "J1", "pi0", "spikes", "step"}},
    };
    return keys;
}

} // namespace detail

/// Parses the sectioned key = value format. Unknown sections or keys are
/// rejected by name.
inline RunConfig parse_run_config(std::istream& in, const std::string& source = "<config>") {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(Errc::config_error, source + ": " + e.what());
    }
    for (const auto& [section, body] : tree) {
        const auto it = detail::allowed_keys().find(section);
        if (it == detail::allowed_keys().end() || body.data().size())
            throw Error(Errc::config_error, source + ": unknown section or top-level key '" + section + "'");
        for (const auto& [key, value] : body)
            if (!it->second.count(key))
                throw Error(Errc::config_error, source + ": unknown key '" + key + "' in section [" + section + "]");
    }

    using namespace detail;
    RunConfig c;
    auto get = [&](const std::string& sec, const std::string& key) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(sec + "." + key, '.'))) return trim(*v);
        return std::nullopt;
    };

    if (auto v = get("run", "seed")) {
        const long long s = parse_integer("run", "seed", *v);
        if (s < 0) throw config_error("run", "seed", "must be non-negative");
        c.seed = std::uint64_t(s);
    }
    if (auto v = get("run", "threads")) {
        const long long t = parse_integer("run", "threads", *v);
        if (t < 1) throw config_error("run", "threads", "must be >= 1");
        c.threads = unsigned(t);
    }
    if (auto v = get("run", "classifiers")) c.classifiers = parse_classifier_list(*v);
    if (auto v = get("run", "out")) c.out = *v;

    SimulationConfig& s = c.simulation;
    if (auto v = get("simulation", "p")) s.p = Index(parse_integer("simulation", "p", *v));
    if (auto v = get("simulation", "n_values")) c.simulation_n = parse_index_list("simulation", "n_values", *v);
    if (auto v = get("simulation", "class0_fraction")) {
        c.class0_fraction = parse_real("simulation", "class0_fraction", *v);
        if (!(c.class0_fraction > 0 && c.class0_fraction < 1))
            throw config_error("simulation", "class0_fraction", "must lie in (0, 1)");
    }
    if (auto v = get("simulation", "sigma2")) s.sigma2 = parse_real("simulation", "sigma2", *v);
    if (auto v = get("simulation", "head_weights")) s.head_weights = parse_real_list("simulation", "head_weights", *v);
    if (auto v = get("simulation", "tail_weights")) s.tail_weights = parse_real_list("simulation", "tail_weights", *v);
    if (auto v = get("simulation", "a")) s.a = parse_real("simulation", "a", *v);
    if (auto v = get("simulation", "mean_scaling")) {
        if (*v == "per_p") s.mean_scaling = MeanScaling::per_p;
        else if (*v == "per_sqrt_p") s.mean_scaling = MeanScaling::per_sqrt_p;
        else throw config_error("simulation", "mean_scaling", "expected per_p or per_sqrt_p, got '" + *v + "'");
    }
    if (auto v = get("simulation", "pi0")) s.pi0 = parse_real("simulation", "pi0", *v);
    if (auto v = get("simulation", "repetitions")) s.repetitions = int(parse_integer("simulation", "repetitions", *v));
    if (auto v = get("simulation", "test_size")) s.test_size = Index(parse_integer("simulation", "test_size", *v));
    s.seed = c.seed;
    {
        SimulationConfig probe = s;
        std::tie(probe.n0, probe.n1) = c.simulation_split(c.simulation_n.front());
        try {
            probe.validate();
        } catch (const Error& e) {
            throw Error(Errc::config_error, source + ": " + e.what());
        }
    }

    FitConfig& f = c.fit;
    if (auto v = get("fit", "pi0"); v && *v != "auto") {
        f.pi0 = parse_real("fit", "pi0", *v);
        if (!(*f.pi0 > 0 && *f.pi0 < 1)) throw config_error("fit", "pi0", "must lie in (0, 1)");
        c.fit_pi0_auto = false;
    }
    if (auto v = get("fit", "sigma2"); v && *v != "auto") {
        f.sigma2 = parse_real("fit", "sigma2", *v);
        if (!(*f.sigma2 > 0)) throw config_error("fit", "sigma2", "must be positive");
    }
    {
        auto r1 = get("fit", "r1"), r2 = get("fit", "r2");
        const bool auto1 = !r1 || *r1 == "auto", auto2 = !r2 || *r2 == "auto";
        if (auto1 != auto2) throw config_error("fit", "r1", "r1 and r2 must both be given or both be auto");
        if (!auto1) {
            const long long a1 = parse_integer("fit", "r1", *r1), a2 = parse_integer("fit", "r2", *r2);
            if (a1 < 0 || a2 < 0) throw config_error("fit", "r1", "spike counts must be non-negative");
            f.spike_counts = SpikeCounts{int(a1), int(a2)};
        }
    }
    if (auto v = get("fit", "grid_step")) f.grid.step = parse_real("fit", "grid_step", *v);
    if (auto v = get("fit", "delta")) f.grid.delta = parse_real("fit", "delta", *v);
    if (auto v = get("fit", "refine")) f.grid.refine = parse_flag("fit", "refine", *v);
    if (auto v = get("fit", "rlda_gamma"); v && *v != "auto") {
        f.rlda_gamma = parse_real("fit", "rlda_gamma", *v);
        if (!(*f.rlda_gamma > 0)) throw config_error("fit", "rlda_gamma", "must be positive");
    }
    try {
        f.grid.validate();
    } catch (const Error& e) {
        throw config_error("fit", "grid_step", e.what());
    }

    if (auto v = get("data", "path")) c.data_path = *v;
    if (auto v = get("data", "label_column")) c.schema.label_column = *v;
    if (auto v = get("data", "id_columns")) c.schema.id_columns = split_list(*v);
    if (auto v = get("data", "class0")) c.schema.class0_token = *v;
    if (auto v = get("data", "class1")) c.schema.class1_token = *v;
    if (auto v = get("data", "standardize")) c.benchmark.standardize = parse_flag("data", "standardize", *v);

    if (auto v = get("benchmark", "n_values")) c.benchmark.n_values = parse_index_list("benchmark", "n_values", *v);
    if (auto v = get("benchmark", "repetitions")) {
        c.benchmark.repetitions = int(parse_integer("benchmark", "repetitions", *v));
        if (c.benchmark.repetitions < 1) throw config_error("benchmark", "repetitions", "must be >= 1");
    }
    if (auto v = get("benchmark", "q0"); v && *v != "auto") {
        c.benchmark.q0 = parse_real("benchmark", "q0", *v);
        if (!(*c.benchmark.q0 > 0 && *c.benchmark.q0 < 1)) throw config_error("benchmark", "q0", "must lie in (0, 1)");
    }
    c.benchmark.seed = c.seed;

    SurfaceConfig& sf = c.surface;
    if (auto v = get("surface", "source")) {
        if (*v == "population") sf.from_data = false;
        else if (*v == "data") sf.from_data = true;
        else throw config_error("surface", "source", "expected population or data, got '" + *v + "'");
    }
    if (auto v = get("surface", "objective")) {
        if (*v == "plain") sf.objective = Objective::plain;
        else if (*v == "oi") sf.objective = Objective::optimal_intercept;
        else throw config_error("surface", "objective", "expected plain or oi, got '" + *v + "'");
    }
    if (auto v = get("surface", "alpha")) sf.alpha = parse_real("surface", "alpha", *v);
    if (auto v = get("surface", "J0")) sf.J0 = parse_real("surface", "J0", *v);
    if (auto v = get("surface", "J1")) sf.J1 = parse_real("surface", "J1", *v);
    if (auto v = get("surface", "pi0")) sf.pi0 = parse_real("surface", "pi0", *v);
    if (auto v = get("surface", "step")) sf.step = parse_real("surface", "step", *v);
    if (auto v = get("surface", "spikes")) sf.spikes = parse_surface_spikes(*v, 1.0 / (1.0 / sf.J0 + 1.0 / sf.J1));
    return c;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::config_error, "cannot open config file '" + path + "'");
    return parse_run_config(in, path);
}

inline nlohmann::ordered_json RunConfig::resolved() const {
    nlohmann::ordered_json j;
    j["run"] = {{"seed", seed}, {"classifiers", detail::classifier_list_string(classifiers)}};
    const SimulationConfig& s = simulation;
    j["simulation"] = {{"p", s.p},
                       {"n_values", simulation_n},
                       {"class0_fraction", class0_fraction},
                       {"sigma2", s.sigma2},
                       {"head_weights", s.head_weights},
                       {"tail_weights", s.tail_weights},
                       {"a", s.a},
                       {"mean_scaling", s.mean_scaling == MeanScaling::per_p ? "per_p" : "per_sqrt_p"},
                       {"pi0", s.pi0},
                       {"repetitions", s.repetitions},
                       {"test_size", s.test_size}};
    nlohmann::ordered_json f;
    f["pi0"] = fit.pi0 ? nlohmann::ordered_json(*fit.pi0) : nlohmann::ordered_json("auto");
    f["sigma2"] = fit.sigma2 ? nlohmann::ordered_json(*fit.sigma2) : nlohmann::ordered_json("auto");
    f["r1"] = fit.spike_counts ? nlohmann::ordered_json(fit.spike_counts->r1) : nlohmann::ordered_json("auto");
    f["r2"] = fit.spike_counts ? nlohmann::ordered_json(fit.spike_counts->r2) : nlohmann::ordered_json("auto");
    f["grid_step"] = fit.grid.step;
    f["delta"] = fit.grid.delta;
    f["refine"] = fit.grid.refine;
    f["rlda_gamma"] = fit.rlda_gamma ? nlohmann::ordered_json(*fit.rlda_gamma) : nlohmann::ordered_json("auto");
    j["fit"] = std::move(f);
    std::string ids;
    for (std::size_t k = 0; k < schema.id_columns.size(); ++k) ids += (k ? "," : "") + schema.id_columns[k];
    j["data"] = {{"path", data_path.value_or("")},
                 {"label_column", schema.label_column},
                 {"id_columns", ids},
                 {"class0", schema.class0_token},
                 {"class1", schema.class1_token},
                 {"standardize", benchmark.standardize}};
    j["benchmark"] = {{"n_values", benchmark.n_values},
                      {"repetitions", benchmark.repetitions},
                      {"q0", benchmark.q0 ? nlohmann::ordered_json(*benchmark.q0) : nlohmann::ordered_json("auto")}};
    return j;
}

} // namespace srlda
