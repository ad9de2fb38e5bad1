#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srlda/dataset.hpp"
#include "srlda/error_surface.hpp"
#include "srlda/errors.hpp"
#include "srlda/linalg.hpp"
#include "srlda/optimizer.hpp"
#include "srlda/spiked_model.hpp"

namespace srlda {

enum class ClassifierKind { lda, rlda, srlda, oi_srlda };

inline std::string to_string(ClassifierKind k) {
    switch (k) {
    case ClassifierKind::lda: return "lda";
    case ClassifierKind::rlda: return "rlda";
    case ClassifierKind::srlda: return "srlda";
    case ClassifierKind::oi_srlda: return "oi-srlda";
    }
    return "?";
}

inline ClassifierKind parse_classifier_kind(std::string_view s) {
    if (s == "lda") return ClassifierKind::lda;
    if (s == "rlda") return ClassifierKind::rlda;
    if (s == "srlda") return ClassifierKind::srlda;
    if (s == "oi-srlda") return ClassifierKind::oi_srlda;
    throw Error(Errc::config_error, "unknown classifier '" + std::string(s) + "' (expected lda, rlda, srlda, oi-srlda)");
}

/// Frozen scoring state. Every kind scores through an affine function
/// (x - (mean0 + mean1)/2)^T direction, where `direction` is the precision
/// proxy applied to mean0 - mean1 (S^{-1}, (S + gamma I)^{-1} or
/// sigma^{-2} H, the latter through its low-rank form).
struct TrainedClassifier {
    ClassifierKind kind = ClassifierKind::srlda;
    VectorXd mean0;
    VectorXd mean1;
    double pi0 = 0.5;
    double sigma2 = 1.0;

    // srlda / oi-srlda: retained sample eigenvectors with corrected spikes
    MatrixXd spike_basis;
    std::vector<int> spike_index;
    std::vector<double> spike_lambda;
    std::vector<SpikeGroup> spike_group;
    GammaPair gamma;
    OmegaPoint omega;

    /// log(pi1/pi0) for lda, rlda, srlda; theta* for oi-srlda.
    double intercept = 0;
    double rlda_gamma = 0;
    VectorXd direction;

    // diagnostics
    SpikeCounts requested_spikes;
    SpikeCounts retained_spikes;
    double alpha = 0;
    double surface_value = 0;
    std::vector<std::string> warnings;

    Index dim() const { return mean0.size(); }

    /// Score compared against threshold(); label 1 iff score <= threshold.
    double score(const Eigen::Ref<const VectorXd>& x) const {
        return score_from_projection((x - 0.5 * (mean0 + mean1)).dot(direction));
    }
    /// Adds the kind-specific intercept to (x - midpoint)^T direction.
    double score_from_projection(double w) const {
        switch (kind) {
        case ClassifierKind::lda:
        case ClassifierKind::rlda: return w - intercept;
        case ClassifierKind::srlda: return w;
        case ClassifierKind::oi_srlda: return w + intercept;
        }
        return w;
    }
    double threshold() const { return kind == ClassifierKind::srlda ? intercept : 0.0; }
    int label(double score_value) const { return score_value <= threshold() ? 1 : 0; }
};

/// H v = v - sum_j (gamma_i lambda_j / (1 + gamma_i lambda_j)) (u_j^T v) u_j,
/// the inverse of I + sum_j gamma_i lambda_j u_j u_j^T for orthonormal u_j.
inline VectorXd apply_h_tilde(const VectorXd& v, const TrainedClassifier& model) {
    if (model.kind != ClassifierKind::srlda && model.kind != ClassifierKind::oi_srlda)
        throw Error(Errc::inadmissible_parameter, "apply_h_tilde: model is not srlda/oi-srlda");
    if (v.size() != model.dim() || model.spike_basis.rows() != v.size())
        throw Error(Errc::dimension_mismatch, "apply_h_tilde: vector length does not match model");
    VectorXd out = v;
    for (Index k = 0; k < model.spike_basis.cols(); ++k) {
        const double g = model.spike_group[std::size_t(k)] == SpikeGroup::positive ? model.gamma.gamma1 : model.gamma.gamma2;
        const double gl = g * model.spike_lambda[std::size_t(k)];
        if (std::abs(1.0 + gl) <= 1e-14) throw Error(Errc::inadmissible_parameter, "apply_h_tilde: pole 1 + gamma * lambda = 0");
        const auto u = model.spike_basis.col(k);
        out -= (gl / (1.0 + gl)) * u.dot(v) * u;
    }
    return out;
}

struct FitConfig {
    std::optional<double> pi0;            // default: n0 / n of the training set
    std::optional<double> sigma2;         // default: bulk eigenvalue mean
    std::optional<SpikeCounts> spike_counts; // default: edge detection
    GridSpec grid;
    std::optional<double> rlda_gamma;     // default: 5-fold CV over the log grid
};

inline double resolve_pi0(const Dataset& train, const FitConfig& cfg) {
    const double pi0 = cfg.pi0 ? *cfg.pi0 : double(train.count(0)) / double(train.size());
    if (!(pi0 > 0 && pi0 < 1)) throw Error(Errc::inadmissible_parameter, "pi0 must lie in (0, 1)");
    return pi0;
}

namespace detail {

inline void require_both_classes(const Dataset& train, const char* who) {
    train.validate();
    if (train.count(0) == 0 || train.count(1) == 0)
        throw Error(Errc::insufficient_samples, std::string(who) + ": both classes need training samples");
}

} // namespace detail

/// Shared tail of the SRLDA fits: given surface parameters whose k-th spike
/// sits on eigen-index spike_index[k], choose (gamma1, gamma2) on the surface
/// (or take `fixed`) and freeze the model.
inline TrainedClassifier assemble_srlda(ClassifierKind kind, const PooledCovariance& pooled,
                                        const EigenDecomposition& eig, double sigma2, const SurfaceParams& sp,
                                        const std::vector<int>& spike_index, const GridSpec& grid,
                                        std::optional<GammaPair> fixed = std::nullopt) {
    if (kind != ClassifierKind::srlda && kind != ClassifierKind::oi_srlda)
        throw Error(Errc::inadmissible_parameter, "assemble_srlda: kind must be srlda or oi-srlda");
    if (spike_index.size() != sp.spikes.size())
        throw Error(Errc::dimension_mismatch, "assemble_srlda: one eigen-index per spike required");
    TrainedClassifier m;
    m.kind = kind;
    m.mean0 = pooled.mean0;
    m.mean1 = pooled.mean1;
    m.pi0 = sp.pi0;
    m.sigma2 = sigma2;
    m.alpha = sp.alpha;
    m.spike_basis.resize(pooled.dim(), Index(spike_index.size()));
    for (std::size_t k = 0; k < spike_index.size(); ++k) {
        m.spike_basis.col(Index(k)) = eig.vector(spike_index[k]);
        m.spike_index.push_back(spike_index[k]);
        m.spike_lambda.push_back(sp.spikes[k].lambda);
        m.spike_group.push_back(sp.spikes[k].group);
        (sp.spikes[k].group == SpikeGroup::positive ? m.retained_spikes.r1 : m.retained_spikes.r2) += 1;
    }

    const Objective obj = kind == ClassifierKind::srlda ? Objective::plain : Objective::optimal_intercept;
    if (fixed) {
        m.gamma = *fixed;
        m.surface_value = obj == Objective::plain ? deterministic_error(m.gamma, sp) : oi_deterministic_error(m.gamma, sp);
    } else if (!sp.spikes.empty()) {
        GridSpec g = grid;
        g.objective = obj;
        const OmegaOptimum opt = optimize_omega(sp, g);
        m.omega = opt.omega;
        m.gamma = opt.gamma;
        m.surface_value = opt.value;
    } else {
        m.surface_value = obj == Objective::plain ? deterministic_error(GammaPair{}, sp) : oi_deterministic_error(GammaPair{}, sp);
    }

    if (kind == ClassifierKind::srlda) {
        m.intercept = sp.c();
    } else {
        if (!(g_bar(m.gamma, sp) > 0))
            throw Error(Errc::infeasible_separation, "fit_oi_srlda: G is not positive at the chosen parameters");
        m.intercept = optimal_theta(m.gamma, sp);
    }
    m.direction = apply_h_tilde(pooled.mean0 - pooled.mean1, m) / sigma2;
    return m;
}

/// Plug-in surface of a training set, with the intermediate pieces the
/// spectral fits need.
struct SpectralEstimate {
    PooledCovariance pooled;
    EigenDecomposition eig;
    SpikeCounts counts;
    double sigma2 = 1.0;
    SurfaceParams surface;
    std::vector<int> spike_index;
    std::vector<std::string> warnings;
};

inline SpectralEstimate estimate_surface(const Dataset& train, const FitConfig& cfg = {}) {
    detail::require_both_classes(train, "estimate_surface");
    SpectralEstimate s;
    const double pi0 = resolve_pi0(train, cfg);
    s.pooled = pooled_covariance(train);
    s.eig = symmetric_eigen(s.pooled);
    const AspectRatios r = aspect_ratios(s.pooled.dim(), s.pooled.n0, s.pooled.n1);
    s.counts = cfg.spike_counts ? *cfg.spike_counts : detect_spike_counts(s.eig, r.J);
    s.sigma2 = cfg.sigma2 ? *cfg.sigma2 : estimate_sigma2(s.eig, s.counts.r1, s.counts.r2);
    if (!(s.sigma2 > 0)) throw Error(Errc::inadmissible_parameter, "sigma2 must be positive");

    const SpikeEstimates est = estimate_spikes(s.pooled, s.eig, s.sigma2, s.counts);
    s.warnings = est.warnings;
    if (est.spikes.empty()) s.warnings.push_back("no detectable spikes; H reduces to the identity");
    s.surface = surface_from_estimates(est, pi0, &s.warnings);
    for (const auto& e : est.spikes) s.spike_index.push_back(e.index);
    return s;
}

namespace detail {

inline TrainedClassifier fit_spectral(ClassifierKind kind, const Dataset& train, const FitConfig& cfg) {
    SpectralEstimate s = estimate_surface(train, cfg);
    TrainedClassifier m = assemble_srlda(kind, s.pooled, s.eig, s.sigma2, s.surface, s.spike_index, cfg.grid);
    m.requested_spikes = s.counts;
    m.warnings = std::move(s.warnings);
    return m;
}

} // namespace detail

inline TrainedClassifier fit_srlda(const Dataset& train, const FitConfig& cfg = {}) {
    return detail::fit_spectral(ClassifierKind::srlda, train, cfg);
}

inline TrainedClassifier fit_oi_srlda(const Dataset& train, const FitConfig& cfg = {}) {
    return detail::fit_spectral(ClassifierKind::oi_srlda, train, cfg);
}

/// Classic rule with S^{-1}; needs n - 2 >= p.
inline TrainedClassifier fit_lda(const Dataset& train, std::optional<double> pi0 = std::nullopt) {
    detail::require_both_classes(train, "fit_lda");
    FitConfig cfg;
    cfg.pi0 = pi0;
    TrainedClassifier m;
    m.kind = ClassifierKind::lda;
    m.pi0 = resolve_pi0(train, cfg);
    const PooledCovariance pooled = pooled_covariance(train);
    if (pooled.dim() > pooled.n() - 2)
        throw Error(Errc::singular_matrix, "fit_lda: pooled covariance is singular (p = " + std::to_string(pooled.dim()) +
                                               " > n - 2 = " + std::to_string(pooled.n() - 2) + "); use rlda or srlda");
    Eigen::LLT<MatrixXd> llt(pooled.matrix);
    if (llt.info() != Eigen::Success)
        throw Error(Errc::singular_matrix, "fit_lda: pooled covariance is not positive definite; use rlda or srlda");
    m.mean0 = pooled.mean0;
    m.mean1 = pooled.mean1;
    m.intercept = std::log((1 - m.pi0) / m.pi0);
    m.direction = llt.solve(pooled.mean0 - pooled.mean1);
    return m;
}

/// Ridge rule with (S + gamma I)^{-1}; gamma from CV when not given.
inline TrainedClassifier fit_rlda(const Dataset& train, std::optional<double> pi0 = std::nullopt,
                                  std::optional<double> gamma = std::nullopt) {
    detail::require_both_classes(train, "fit_rlda");
    FitConfig cfg;
    cfg.pi0 = pi0;
    TrainedClassifier m;
    m.kind = ClassifierKind::rlda;
    m.pi0 = resolve_pi0(train, cfg);
    m.rlda_gamma = gamma ? *gamma : optimize_rlda_gamma(train, m.pi0).gamma;
    if (!(m.rlda_gamma > 0)) throw Error(Errc::inadmissible_parameter, "fit_rlda: gamma must be positive");
    const PooledCovariance pooled = pooled_covariance(train);
    m.mean0 = pooled.mean0;
    m.mean1 = pooled.mean1;
    m.intercept = std::log((1 - m.pi0) / m.pi0);
    const MatrixXd ridge = pooled.matrix + m.rlda_gamma * MatrixXd::Identity(pooled.dim(), pooled.dim());
    m.direction = ridge.llt().solve(pooled.mean0 - pooled.mean1);
    return m;
}

inline TrainedClassifier fit(ClassifierKind kind, const Dataset& train, const FitConfig& cfg = {}) {
    switch (kind) {
    case ClassifierKind::lda: return fit_lda(train, cfg.pi0);
    case ClassifierKind::rlda: return fit_rlda(train, cfg.pi0, cfg.rlda_gamma);
    case ClassifierKind::srlda: return fit_srlda(train, cfg);
    case ClassifierKind::oi_srlda: return fit_oi_srlda(train, cfg);
    }
    throw Error(Errc::config_error, "unknown classifier kind");
}

struct PredictionReport {
    std::vector<double> scores;
    std::vector<int> labels;
    // filled when true labels are known
    double error0 = 0;
    double error1 = 0;
    double empirical_error = 0; // fraction of mislabelled samples
    std::optional<double> total_error; // pi0 * error0 + pi1 * error1, when priors are supplied
};

/// Rows of `samples` are observations.
inline PredictionReport predict(const TrainedClassifier& model, const MatrixXd& samples) {
    if (samples.cols() != model.dim())
        throw Error(Errc::dimension_mismatch, "predict: data has p = " + std::to_string(samples.cols()) +
                                                  ", model expects p = " + std::to_string(model.dim()));
    PredictionReport out;
    const VectorXd mid = 0.5 * (model.mean0 + model.mean1);
    const VectorXd w = (samples.rowwise() - mid.transpose()) * model.direction;
    out.scores.resize(std::size_t(samples.rows()));
    out.labels.resize(std::size_t(samples.rows()));
    for (Index i = 0; i < samples.rows(); ++i) {
        const double s = model.score_from_projection(w(i));
        out.scores[std::size_t(i)] = s;
        out.labels[std::size_t(i)] = model.label(s);
    }
    return out;
}

inline PredictionReport predict(const TrainedClassifier& model, const Dataset& data,
                                std::optional<double> pi0 = std::nullopt) {
    data.validate();
    PredictionReport out = predict(model, data.features);
    std::size_t wrong[2] = {0, 0}, total[2] = {0, 0};
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
        const auto y = std::size_t(data.labels[i]);
        ++total[y];
        if (out.labels[i] != data.labels[i]) ++wrong[y];
    }
    out.error0 = total[0] ? double(wrong[0]) / double(total[0]) : 0.0;
    out.error1 = total[1] ? double(wrong[1]) / double(total[1]) : 0.0;
    out.empirical_error = data.labels.empty() ? 0.0 : double(wrong[0] + wrong[1]) / double(data.labels.size());
    if (pi0) out.total_error = *pi0 * out.error0 + (1 - *pi0) * out.error1;
    return out;
}

} // namespace srlda
