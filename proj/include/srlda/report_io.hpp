#pragma once

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srlda/experiments.hpp"

namespace srlda {

/// Structured report. `config` is the fully resolved run configuration; the
/// payload holds no timestamps or thread counts, so equal configs give
/// byte-equal output.
inline nlohmann::ordered_json report_to_json(const ExperimentReport& report, const nlohmann::ordered_json& config) {
    nlohmann::ordered_json j;
    j["format"] = "srlda-report";
    j["version"] = 1;
    j["software_version"] = software_version;
    j["protocol"] = report.protocol;
    j["config"] = config;
    j["notes"] = {
        "std uses the n - 1 divisor over successful repetitions",
        "failed repetitions are excluded from mean/std and listed per classifier",
        "rlda ridge parameter chosen by stratified 5-fold CV over 10^(i/10), i = -10..10",
    };
    auto results = nlohmann::ordered_json::array();
    for (const auto& r : report.results) {
        nlohmann::ordered_json e;
        e["classifier"] = to_string(r.kind);
        e["n"] = r.n;
        e["mean"] = r.mean;
        e["std"] = r.stddev;
        e["std_single_repetition"] = r.single_repetition;
        e["repetitions"] = r.errors.size();
        e["failed"] = r.failed.size();
        e["errors"] = r.errors;
        e["repetition"] = r.repetition;
        auto failures = nlohmann::ordered_json::array();
        for (std::size_t k = 0; k < r.failed.size(); ++k)
            failures.push_back({{"repetition", r.failed[k]}, {"message", r.failure_messages[k]}});
        e["failures"] = std::move(failures);
        if (!r.retained.empty()) {
            std::map<std::string, int> hist;
            for (const auto& s : r.retained) ++hist[std::to_string(s.r1) + "," + std::to_string(s.r2)];
            nlohmann::ordered_json h = nlohmann::ordered_json::object();
            for (const auto& [k, v] : hist) h[k] = v;
            e["retained_spike_counts"] = std::move(h);
        }
        results.push_back(std::move(e));
    }
    j["results"] = std::move(results);
    return j;
}

namespace detail {

inline std::string fmt_real(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

} // namespace detail

/// Flat table: classifier, n, mean, std, repetitions, failed.
inline std::string report_to_csv(const ExperimentReport& report) {
    std::string out = "classifier,n,mean,std,repetitions,failed\n";
    for (const auto& r : report.results)
        out += to_string(r.kind) + "," + std::to_string(r.n) + "," + detail::fmt_real(r.mean) + "," +
               detail::fmt_real(r.stddev) + "," + std::to_string(r.errors.size()) + "," + std::to_string(r.failed.size()) + "\n";
    return out;
}

/// One row per classifier, one column per training size (mean error).
inline std::string report_to_wide_csv(const ExperimentReport& report) {
    std::vector<Index> ns;
    std::vector<ClassifierKind> kinds;
    for (const auto& r : report.results) {
        if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
        if (std::find(kinds.begin(), kinds.end(), r.kind) == kinds.end()) kinds.push_back(r.kind);
    }
    std::string out = "classifier";
    for (Index n : ns) out += ",n=" + std::to_string(n);
    out += "\n";
    for (ClassifierKind k : kinds) {
        out += to_string(k);
        for (Index n : ns) {
            const ClassifierResult* r = report.find(k, n);
            out += "," + (r ? detail::fmt_real(r->mean) : std::string());
        }
        out += "\n";
    }
    return out;
}

/// Aligned human-readable table.
inline std::string report_to_text(const ExperimentReport& report) {
    std::ostringstream ss;
    ss << std::left << std::setw(10) << "classifier" << std::right << std::setw(7) << "n" << std::setw(10) << "mean"
       << std::setw(10) << "std" << std::setw(7) << "reps" << std::setw(8) << "failed" << "\n";
    for (const auto& r : report.results) {
        char mean[32], sd[32];
        std::snprintf(mean, sizeof mean, "%.4f", r.mean);
        std::snprintf(sd, sizeof sd, "%.4f", r.stddev);
        ss << std::left << std::setw(10) << to_string(r.kind) << std::right << std::setw(7) << r.n << std::setw(10) << mean
           << std::setw(10) << sd << std::setw(7) << r.errors.size() << std::setw(8) << r.failed.size() << "\n";
    }
    return ss.str();
}

} // namespace srlda
