#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "srlda/classifiers.hpp"
#include "srlda/errors.hpp"

namespace srlda {

inline constexpr int model_format_version = 1;

namespace detail {

inline nlohmann::ordered_json to_json_vector(const VectorXd& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline VectorXd vector_from_json(const nlohmann::ordered_json& a, Index expected, const char* field) {
    if (!a.is_array() || Index(a.size()) != expected)
        throw Error(Errc::parse_error, std::string("model: field '") + field + "' has the wrong length");
    VectorXd v(expected);
    for (Index i = 0; i < expected; ++i) v(i) = a[std::size_t(i)].get<double>();
    return v;
}

} // namespace detail

/// Versioned JSON document. Doubles are written with 17 significant digits
/// so every numeric field reloads bit-exactly.
inline std::string serialize_model(const TrainedClassifier& m) {
    nlohmann::ordered_json j;
    j["format"] = "srlda-model";
    j["version"] = model_format_version;
    j["kind"] = to_string(m.kind);
    j["p"] = m.dim();
    j["pi0"] = m.pi0;
    j["sigma2"] = m.sigma2;
    j["intercept"] = m.intercept;
    j["rlda_gamma"] = m.rlda_gamma;
    j["gamma"] = {{"gamma1", m.gamma.gamma1}, {"gamma2", m.gamma.gamma2}};
    j["omega"] = {{"omega1", m.omega.omega1}, {"omega2", m.omega.omega2}};
    j["alpha"] = m.alpha;
    j["surface_value"] = m.surface_value;
    j["requested_spikes"] = {{"r1", m.requested_spikes.r1}, {"r2", m.requested_spikes.r2}};
    j["retained_spikes"] = {{"r1", m.retained_spikes.r1}, {"r2", m.retained_spikes.r2}};
    j["mean0"] = detail::to_json_vector(m.mean0);
    j["mean1"] = detail::to_json_vector(m.mean1);
    j["direction"] = detail::to_json_vector(m.direction);
    auto spikes = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < m.spike_index.size(); ++k) {
        nlohmann::ordered_json s;
        s["index"] = m.spike_index[k];
        s["group"] = m.spike_group[k] == SpikeGroup::positive ? "positive" : "negative";
        s["lambda"] = m.spike_lambda[k];
        s["vector"] = detail::to_json_vector(m.spike_basis.col(Index(k)));
        spikes.push_back(std::move(s));
    }
    j["spikes"] = std::move(spikes);
    j["warnings"] = m.warnings;
    return j.dump(2) + "\n";
}

inline TrainedClassifier deserialize_model(const std::string& text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::parse_error, std::string("model: not valid JSON: ") + e.what());
    }
    try {
        if (j.value("format", "") != "srlda-model") throw Error(Errc::parse_error, "model: not an srlda model file");
        const int version = j.at("version").get<int>();
        if (version != model_format_version)
            throw Error(Errc::version_mismatch, "model: format version " + std::to_string(version) +
                                                    " is not supported (expected " + std::to_string(model_format_version) + ")");
        TrainedClassifier m;
        m.kind = parse_classifier_kind(j.at("kind").get<std::string>());
        const Index p = j.at("p").get<Index>();
        m.pi0 = j.at("pi0").get<double>();
        m.sigma2 = j.at("sigma2").get<double>();
        m.intercept = j.at("intercept").get<double>();
        m.rlda_gamma = j.at("rlda_gamma").get<double>();
        m.gamma = {j.at("gamma").at("gamma1").get<double>(), j.at("gamma").at("gamma2").get<double>()};
        m.omega = {j.at("omega").at("omega1").get<double>(), j.at("omega").at("omega2").get<double>()};
        m.alpha = j.at("alpha").get<double>();
        m.surface_value = j.at("surface_value").get<double>();
        m.requested_spikes = {j.at("requested_spikes").at("r1").get<int>(), j.at("requested_spikes").at("r2").get<int>()};
        m.retained_spikes = {j.at("retained_spikes").at("r1").get<int>(), j.at("retained_spikes").at("r2").get<int>()};
        m.mean0 = detail::vector_from_json(j.at("mean0"), p, "mean0");
        m.mean1 = detail::vector_from_json(j.at("mean1"), p, "mean1");
        m.direction = detail::vector_from_json(j.at("direction"), p, "direction");
        const auto& spikes = j.at("spikes");
        m.spike_basis.resize(p, Index(spikes.size()));
        for (std::size_t k = 0; k < spikes.size(); ++k) {
            const auto& s = spikes[k];
            m.spike_index.push_back(s.at("index").get<int>());
            const std::string group = s.at("group").get<std::string>();
            if (group != "positive" && group != "negative") throw Error(Errc::parse_error, "model: bad spike group");
            m.spike_group.push_back(group == "positive" ? SpikeGroup::positive : SpikeGroup::negative);
            m.spike_lambda.push_back(s.at("lambda").get<double>());
            m.spike_basis.col(Index(k)) = detail::vector_from_json(s.at("vector"), p, "spikes.vector");
        }
        m.warnings = j.value("warnings", std::vector<std::string>{});
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::parse_error, std::string("model: ") + e.what());
    }
}

inline void save_model(const TrainedClassifier& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write model file '" + path + "'");
    out << serialize_model(m);
    if (!out) throw Error(Errc::io_error, "failed writing model file '" + path + "'");
}

inline TrainedClassifier load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot read model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize_model(ss.str());
}

} // namespace srlda
