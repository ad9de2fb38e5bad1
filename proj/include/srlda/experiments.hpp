#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "srlda/classifiers.hpp"
#include "srlda/dataset.hpp"
#include "srlda/errors.hpp"
#include "srlda/parallel.hpp"
#include "srlda/rng.hpp"

namespace srlda {

inline constexpr const char* software_version = "1.0.0";

enum class MeanScaling {
    per_p,      // mu0 = (a / p) * 1
    per_sqrt_p, // mu0 = (a / sqrt(p)) * 1, so ||mu0 - mu1|| = 2a
};

/// Spiked Gaussian two-class population. `head_weights` sit on e_1, e_2, ...
/// and `tail_weights` on e_p, e_{p-1}, ...; mu0 = scale * 1, mu1 = -mu0.
struct SimulationConfig {
    Index p = 150;
    Index n0 = 50;
    Index n1 = 50;
    double sigma2 = 1.0;
    std::vector<double> head_weights{20.0, 10.0, 5.0};
    std::vector<double> tail_weights{0.01};
    double a = 1.0;
    MeanScaling mean_scaling = MeanScaling::per_p;
    double pi0 = 0.2;
    int repetitions = 500;
    Index test_size = 1000;
    std::uint64_t seed = 1;

    int spike_count() const { return int(head_weights.size() + tail_weights.size()); }

    void validate() const {
        if (p <= spike_count()) throw Error(Errc::config_error, "simulation: p must exceed the number of spike weights");
        if (n0 < 1 || n1 < 1 || n0 + n1 < 3) throw Error(Errc::config_error, "simulation: need n0, n1 >= 1 and n0 + n1 >= 3");
        if (!(sigma2 > 0)) throw Error(Errc::config_error, "simulation: sigma2 must be positive");
        for (double w : head_weights)
            if (!(w > -1)) throw Error(Errc::config_error, "simulation: spike weight <= -1 makes Sigma non-PSD");
        for (double w : tail_weights)
            if (!(w > -1)) throw Error(Errc::config_error, "simulation: spike weight <= -1 makes Sigma non-PSD");
        if (!(pi0 > 0 && pi0 < 1)) throw Error(Errc::config_error, "simulation: pi0 must lie in (0, 1)");
        if (repetitions < 1) throw Error(Errc::config_error, "simulation: repetitions must be >= 1");
        if (test_size < 1) throw Error(Errc::config_error, "simulation: test_size must be >= 1");
    }

    /// Unit basis direction index (0-based) of every weight, head first.
    std::vector<Index> direction_indices() const {
        std::vector<Index> out;
        for (std::size_t k = 0; k < head_weights.size(); ++k) out.push_back(Index(k));
        for (std::size_t k = 0; k < tail_weights.size(); ++k) out.push_back(p - 1 - Index(k));
        return out;
    }
    std::vector<double> weights() const {
        std::vector<double> w = head_weights;
        w.insert(w.end(), tail_weights.begin(), tail_weights.end());
        return w;
    }
    double mean_entry() const {
        return mean_scaling == MeanScaling::per_p ? a / double(p) : a / std::sqrt(double(p));
    }
    VectorXd mu0() const { return VectorXd::Constant(p, mean_entry()); }
    VectorXd mu1() const { return -mu0(); }
};

/// Draws x = mu + sigma (I + sum_j (sqrt(1 + w_j) - 1) v_j v_j^T) z.
class SpikedGaussianSampler {
public:
    explicit SpikedGaussianSampler(const SimulationConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        dirs_ = cfg_.direction_indices();
        const auto w = cfg_.weights();
        for (double wk : w) root_.push_back(std::sqrt(1.0 + wk));
        mu0_ = cfg_.mu0();
        mu1_ = cfg_.mu1();
    }

    /// `rows` samples of one class.
    MatrixXd draw(int label, Index rows, Rng& rng) const {
        std::normal_distribution<double> normal;
        const double sigma = std::sqrt(cfg_.sigma2);
        MatrixXd x(rows, cfg_.p);
        const VectorXd& mu = label == 0 ? mu0_ : mu1_;
        for (Index i = 0; i < rows; ++i) {
            for (Index k = 0; k < cfg_.p; ++k) x(i, k) = normal(rng);
            for (std::size_t s = 0; s < dirs_.size(); ++s) x(i, dirs_[s]) *= root_[s];
            x.row(i) = sigma * x.row(i) + mu.transpose();
        }
        return x;
    }

    Dataset draw_training(Rng& rng) const {
        Dataset d;
        d.features.resize(cfg_.n0 + cfg_.n1, cfg_.p);
        d.features.topRows(cfg_.n0) = draw(0, cfg_.n0, rng);
        d.features.bottomRows(cfg_.n1) = draw(1, cfg_.n1, rng);
        d.labels.assign(std::size_t(cfg_.n0), 0);
        d.labels.resize(std::size_t(cfg_.n0 + cfg_.n1), 1);
        return d;
    }

    /// Labels drawn with P(label = 0) = pi0.
    Dataset draw_test(Rng& rng) const {
        std::bernoulli_distribution is_class0(cfg_.pi0);
        Dataset d;
        d.labels.resize(std::size_t(cfg_.test_size));
        for (auto& l : d.labels) l = is_class0(rng) ? 0 : 1;
        d.features.resize(cfg_.test_size, cfg_.p);
        for (Index i = 0; i < cfg_.test_size; ++i) d.features.row(i) = draw(d.labels[std::size_t(i)], 1, rng);
        return d;
    }

    const SimulationConfig& config() const { return cfg_; }

private:
    SimulationConfig cfg_;
    std::vector<Index> dirs_;
    std::vector<double> root_;
    VectorXd mu0_, mu1_;
};

inline std::pair<Dataset, Dataset> generate_spiked_gaussian(const SimulationConfig& cfg, Rng& rng) {
    const SpikedGaussianSampler sampler(cfg);
    Dataset train = sampler.draw_training(rng);
    Dataset test = sampler.draw_test(rng);
    return {std::move(train), std::move(test)};
}

/// Seeds the generator from cfg.seed.
inline std::pair<Dataset, Dataset> generate_spiked_gaussian(const SimulationConfig& cfg) {
    Rng rng(cfg.seed);
    return generate_spiked_gaussian(cfg, rng);
}

// ---------------------------------------------------------------- reports

struct ClassifierResult {
    ClassifierKind kind = ClassifierKind::srlda;
    Index n = 0;
    std::vector<double> errors;   // successful repetitions, in repetition order
    std::vector<int> repetition;  // repetition index of each entry in `errors`
    std::vector<int> failed;      // repetitions whose fit failed
    std::vector<std::string> failure_messages; // parallel to `failed`
    std::vector<SpikeCounts> retained; // srlda kinds only, parallel to `errors`
    double mean = 0;
    double stddev = 0;            // n - 1 divisor
    bool single_repetition = false;

    void aggregate() {
        const std::size_t k = errors.size();
        mean = k ? std::accumulate(errors.begin(), errors.end(), 0.0) / double(k) : std::nan("");
        single_repetition = k == 1;
        if (k < 2) {
            stddev = 0.0;
            return;
        }
        double ss = 0;
        for (double e : errors) ss += (e - mean) * (e - mean);
        stddev = std::sqrt(ss / double(k - 1));
    }
};

struct ExperimentReport {
    std::string protocol;
    std::vector<ClassifierResult> results;

    const ClassifierResult* find(ClassifierKind kind, Index n) const {
        for (const auto& r : results)
            if (r.kind == kind && r.n == n) return &r;
        return nullptr;
    }
};

namespace detail {

struct RepOutcome {
    bool ok = false;
    double error = 0;
    SpikeCounts retained;
    std::string message;
};

inline RepOutcome evaluate_one(ClassifierKind kind, const Dataset& train, const Dataset& test, const FitConfig& cfg) {
    RepOutcome out;
    try {
        const TrainedClassifier m = fit(kind, train, cfg);
        out.error = predict(m, test).empirical_error;
        out.retained = m.retained_spikes;
        out.ok = true;
    } catch (const Error& e) {
        out.message = e.what();
    }
    return out;
}

inline void collect(ExperimentReport& report, const std::vector<ClassifierKind>& kinds, Index n,
                    const std::vector<std::vector<RepOutcome>>& outcomes) {
    for (std::size_t c = 0; c < kinds.size(); ++c) {
        ClassifierResult r;
        r.kind = kinds[c];
        r.n = n;
        for (std::size_t rep = 0; rep < outcomes.size(); ++rep) {
            const RepOutcome& o = outcomes[rep][c];
            if (o.ok) {
                r.errors.push_back(o.error);
                r.repetition.push_back(int(rep));
                if (kinds[c] == ClassifierKind::srlda || kinds[c] == ClassifierKind::oi_srlda) r.retained.push_back(o.retained);
            } else {
                r.failed.push_back(int(rep));
                r.failure_messages.push_back(o.message);
            }
        }
        r.aggregate();
        report.results.push_back(std::move(r));
    }
}

} // namespace detail

/// Monte Carlo loop for one training size: each repetition draws a fresh
/// training and test set from its own stream, fits every classifier and
/// records the empirical test error. Fit failures are recorded per
/// classifier and repetition, never silently dropped.
inline ExperimentReport run_simulation_benchmark(const SimulationConfig& cfg, const std::vector<ClassifierKind>& kinds,
                                                 const FitConfig& fit_cfg, unsigned threads = 1) {
    if (kinds.empty()) throw Error(Errc::config_error, "run_simulation_benchmark: no classifiers selected");
    const SpikedGaussianSampler sampler(cfg);
    FitConfig fc = fit_cfg;
    fc.grid.threads = 1; // parallelism lives at the repetition level
    const Index n = cfg.n0 + cfg.n1;
    std::vector<std::vector<detail::RepOutcome>> outcomes(std::size_t(cfg.repetitions));
    parallel_for(outcomes.size(), threads, [&](std::size_t rep) {
        Rng rng(stream_seed(cfg.seed, std::uint64_t(n), rep));
        const Dataset train = sampler.draw_training(rng);
        const Dataset test = sampler.draw_test(rng);
        for (ClassifierKind k : kinds) outcomes[rep].push_back(detail::evaluate_one(k, train, test, fc));
    });
    ExperimentReport report;
    report.protocol = "simulation";
    detail::collect(report, kinds, n, outcomes);
    return report;
}

// ---------------------------------------------------------------- real data

struct CsvSchema {
    std::string label_column = "diagnosis";
    std::vector<std::string> id_columns{"id"};
    std::string class0_token = "M";
    std::string class1_token = "B";
};

namespace detail {

inline std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\"");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

} // namespace detail

/// Comma-separated file with a header row. ID columns are dropped, the label
/// column is mapped through the schema tokens, every other column must parse
/// as a real number.
inline Dataset parse_labeled_csv(std::istream& in, const CsvSchema& schema, const std::string& source = "<input>") {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) {
            header = detail::split_csv_line(line);
            break;
        }
    }
    if (header.empty()) throw Error(Errc::parse_error, source + ": empty file (no header row)");

    int label_col = -1;
    std::vector<int> feature_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == schema.label_column) label_col = int(c);
        else if (std::find(schema.id_columns.begin(), schema.id_columns.end(), header[c]) == schema.id_columns.end())
            feature_cols.push_back(int(c));
    }
    if (label_col < 0) throw Error(Errc::parse_error, source + ": no label column '" + schema.label_column + "' in header");
    if (feature_cols.empty()) throw Error(Errc::parse_error, source + ": no feature columns");

    std::vector<double> values;
    std::vector<int> labels;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv_line(line);
        const std::string where = source + ":" + std::to_string(line_no);
        if (fields.size() != header.size())
            throw Error(Errc::parse_error, where + ": expected " + std::to_string(header.size()) + " columns, found " +
                                               std::to_string(fields.size()));
        const std::string& tok = fields[std::size_t(label_col)];
        if (tok == schema.class0_token) labels.push_back(0);
        else if (tok == schema.class1_token) labels.push_back(1);
        else throw Error(Errc::parse_error, where + ": unknown label '" + tok + "'");
        for (int c : feature_cols) {
            const std::string& f = fields[std::size_t(c)];
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(f, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (f.empty() || used != f.size() || !std::isfinite(v))
                throw Error(Errc::parse_error, where + ": column '" + header[std::size_t(c)] + "' is not a number: '" + f + "'");
            values.push_back(v);
        }
    }
    if (labels.empty()) throw Error(Errc::parse_error, source + ": no data rows");
    Dataset d;
    const Index p = Index(feature_cols.size());
    d.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), Index(labels.size()), p);
    d.labels = std::move(labels);
    return d;
}

inline Dataset load_labeled_csv(const std::string& path, const CsvSchema& schema = {}) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open data file '" + path + "'");
    return parse_labeled_csv(in, schema, path);
}

struct SplitConfig {
    Index n_train = 0;
    std::optional<double> q0; // default: class-0 fraction of the full dataset
    std::uint64_t seed = 1;
};

struct SplitCounts {
    Index n0 = 0;
    Index n1 = 0;
};

/// n0 = floor(q0 * n), n1 = n - n0.
inline SplitCounts split_counts(const Dataset& data, const SplitConfig& cfg) {
    const double q0 = cfg.q0 ? *cfg.q0 : double(data.count(0)) / double(data.size());
    SplitCounts c;
    c.n0 = Index(std::floor(q0 * double(cfg.n_train)));
    c.n1 = cfg.n_train - c.n0;
    return c;
}

/// Training rows per class are drawn without replacement; everything else is
/// the test set. Both parts keep dataset order.
inline std::pair<Dataset, Dataset> stratified_split(const Dataset& data, const SplitConfig& cfg, Rng& rng) {
    data.validate();
    if (cfg.n_train >= data.size())
        throw Error(Errc::config_error, "stratified_split: n_train = " + std::to_string(cfg.n_train) +
                                            " must be below the dataset size " + std::to_string(data.size()));
    const SplitCounts c = split_counts(data, cfg);
    if (c.n0 < 2 || c.n1 < 2) throw Error(Errc::config_error, "stratified_split: need at least 2 training samples per class");
    if (c.n0 > data.count(0) || c.n1 > data.count(1))
        throw Error(Errc::config_error, "stratified_split: requested class counts exceed availability");

    std::vector<Index> pool[2];
    for (Index i = 0; i < data.size(); ++i) pool[data.labels[std::size_t(i)]].push_back(i);
    std::vector<char> in_train(std::size_t(data.size()), 0);
    const Index want[2] = {c.n0, c.n1};
    for (int k = 0; k < 2; ++k) {
        std::shuffle(pool[k].begin(), pool[k].end(), rng);
        for (Index t = 0; t < want[k]; ++t) in_train[std::size_t(pool[k][std::size_t(t)])] = 1;
    }
    std::vector<Index> tr, te;
    for (Index i = 0; i < data.size(); ++i) (in_train[std::size_t(i)] ? tr : te).push_back(i);
    return {data.subset(tr), data.subset(te)};
}

inline std::pair<Dataset, Dataset> stratified_split(const Dataset& data, const SplitConfig& cfg) {
    Rng rng(cfg.seed);
    return stratified_split(data, cfg, rng);
}

/// Z-scores both parts with the training mean and standard deviation
/// (constant training columns are left unscaled).
inline void standardize_with_training(Dataset& train, Dataset& test) {
    const VectorXd mean = train.features.colwise().mean().transpose();
    VectorXd sd = ((train.features.rowwise() - mean.transpose()).array().square().colwise().sum() /
                   double(std::max<Index>(train.size() - 1, 1)))
                      .sqrt()
                      .transpose();
    for (Index k = 0; k < sd.size(); ++k)
        if (!(sd(k) > 0)) sd(k) = 1.0;
    auto apply = [&](Dataset& d) {
        d.features = ((d.features.rowwise() - mean.transpose()).array().rowwise() / sd.transpose().array()).matrix();
    };
    apply(train);
    apply(test);
}

struct RealDataConfig {
    std::vector<Index> n_values;
    int repetitions = 500;
    std::optional<double> q0;
    std::uint64_t seed = 1;
    bool standardize = true;
};

/// Repeated stratified splits: fit on n training rows, score the remainder.
inline ExperimentReport run_realdata_benchmark(const Dataset& data, const RealDataConfig& cfg,
                                               const std::vector<ClassifierKind>& kinds, const FitConfig& fit_cfg,
                                               unsigned threads = 1) {
    if (kinds.empty()) throw Error(Errc::config_error, "run_realdata_benchmark: no classifiers selected");
    if (cfg.repetitions < 1) throw Error(Errc::config_error, "run_realdata_benchmark: repetitions must be >= 1");
    data.validate();
    for (Index n : cfg.n_values)
        if (n >= data.size())
            throw Error(Errc::config_error, "run_realdata_benchmark: n = " + std::to_string(n) +
                                                " must be below the dataset size " + std::to_string(data.size()));
    FitConfig fc = fit_cfg;
    fc.grid.threads = 1;
    ExperimentReport report;
    report.protocol = "realdata";
    for (Index n : cfg.n_values) {
        SplitConfig split{n, cfg.q0, cfg.seed};
        std::vector<std::vector<detail::RepOutcome>> outcomes(std::size_t(cfg.repetitions));
        parallel_for(outcomes.size(), threads, [&](std::size_t rep) {
            Rng rng(stream_seed(cfg.seed, std::uint64_t(n), rep));
            auto [train, test] = stratified_split(data, split, rng);
            if (cfg.standardize) standardize_with_training(train, test);
            for (ClassifierKind k : kinds) outcomes[rep].push_back(detail::evaluate_one(k, train, test, fc));
        });
        detail::collect(report, kinds, n, outcomes);
    }
    return report;
}

} // namespace srlda
