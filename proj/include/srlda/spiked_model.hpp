#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "srlda/errors.hpp"
#include "srlda/linalg.hpp"

namespace srlda {

enum class SpikeGroup { positive, negative };

/// Population model: Sigma = sigma2 * (I + sum_j lambda_j v_j v_j^T).
struct SpikedModelParams {
    double sigma2 = 1.0;
    std::vector<double> pos_spikes;   // lambda_1 >= ... >= lambda_r1 > 0
    std::vector<double> neg_spikes;   // lambda_{-1} <= ... in (-1, 0); neg_spikes[k] is lambda_{-(k+1)}
    std::optional<MatrixXd> directions; // columns: positive spikes first, then negative

    int r1() const { return int(pos_spikes.size()); }
    int r2() const { return int(neg_spikes.size()); }

    void validate() const {
        if (!(sigma2 > 0)) throw Error(Errc::inadmissible_parameter, "sigma2 must be positive");
        for (std::size_t k = 0; k < pos_spikes.size(); ++k) {
            if (!(pos_spikes[k] > 0))
                throw Error(Errc::inadmissible_parameter, "positive spikes must be > 0");
            if (k > 0 && pos_spikes[k] > pos_spikes[k - 1])
                throw Error(Errc::inadmissible_parameter, "positive spikes must be non-increasing");
        }
        for (std::size_t k = 0; k < neg_spikes.size(); ++k) {
            if (!(neg_spikes[k] > -1.0 && neg_spikes[k] < 0.0))
                throw Error(Errc::inadmissible_parameter, "negative spikes must lie in (-1, 0)");
            if (k > 0 && neg_spikes[k] < neg_spikes[k - 1])
                throw Error(Errc::inadmissible_parameter, "negative spikes must satisfy lambda_{-1} <= lambda_{-2} <= ...");
        }
        if (directions) {
            const MatrixXd& v = *directions;
            if (v.cols() != r1() + r2())
                throw Error(Errc::dimension_mismatch, "one direction per spike required");
            const MatrixXd gram = v.transpose() * v;
            if ((gram - MatrixXd::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff() > 1e-10)
                throw Error(Errc::inadmissible_parameter, "spike directions must be orthonormal");
        }
    }
};

struct AspectRatios {
    double J = 0;  // p / n
    double J0 = 0; // p / n0
    double J1 = 0; // p / n1

    /// Assumption J < 1. Not enforced: the simulation protocol runs at p > n.
    bool below_one() const { return J < 1.0; }
    double detection_threshold() const { return std::sqrt(J); }
};

inline AspectRatios aspect_ratios(Index p, Index n0, Index n1) {
    if (p <= 0 || n0 <= 0 || n1 <= 0)
        throw Error(Errc::insufficient_samples, "aspect_ratios: p, n0, n1 must be positive");
    return {double(p) / double(n0 + n1), double(p) / double(n0), double(p) / double(n1)};
}

/// Limiting squared overlap between a sample spike eigenvector and its
/// population direction: (lambda^2 - J) / (lambda (lambda + J)).
inline double angle_factor(double lambda, double J) {
    if (!(std::abs(lambda) > std::sqrt(J)))
        throw Error(Errc::undetectable_spike,
                    "angle_factor: |lambda| = " + std::to_string(std::abs(lambda)) +
                        " is not above sqrt(J) = " + std::to_string(std::sqrt(J)));
    if (lambda <= -1.0)
        throw Error(Errc::inadmissible_parameter, "angle_factor: negative spike must exceed -1");
    return (lambda * lambda - J) / (lambda * (lambda + J));
}

/// Corrected spike value for the signed eigen-index j (j < 0 counts from the
/// bottom of the spectrum). Eigenvalues are normalised by sigma2 first. The
/// companion Stieltjes transform at l_j,
///   m(l_j) = -(1 - J) / l_j + (1/n) sum_{i != j} 1 / (l_i - l_j),
/// inverts to the population eigenvalue 1 + lambda_j = -1 / m(l_j).
inline double estimate_spike_eigenvalue(int j, const EigenDecomposition& eig, Index n, double J,
                                        double sigma2 = 1.0) {
    if (n <= 0) throw Error(Errc::insufficient_samples, "estimate_spike_eigenvalue: n must be positive");
    const Index col = eig.column_for(j);
    const double lj = eig.values(col) / sigma2;
    if (!(lj > 0))
        throw Error(Errc::eigenvalue_tie,
                    "estimate_spike_eigenvalue: eigenvalue " + std::to_string(j) + " is not positive");
    double sum = 0.0;
    for (Index i = 0; i < eig.dim(); ++i) {
        if (i == col) continue;
        const double diff = eig.values(i) / sigma2 - lj;
        if (diff == 0.0)
            throw Error(Errc::eigenvalue_tie,
                        "estimate_spike_eigenvalue: eigenvalue " + std::to_string(j) + " is tied");
        sum += 1.0 / diff;
    }
    const double m = -(1.0 - J) / lj + sum / double(n);
    if (m == 0.0 || !std::isfinite(m))
        throw Error(Errc::eigenvalue_tie, "estimate_spike_eigenvalue: degenerate spectrum");
    return -1.0 / m - 1.0;
}

/// alpha_hat = (||mu_hat||^2 / sigma2 - J0 - J1)^{-1}, the estimate of sigma2 / ||mu||^2.
inline double estimate_alpha(double mu_hat_norm2, double sigma2, double J0, double J1) {
    const double debiased = mu_hat_norm2 / sigma2 - J0 - J1;
    if (!(debiased > 0))
        throw Error(Errc::infeasible_separation,
                    "estimate_alpha: debiased separation ||mu_hat||^2/sigma2 - J0 - J1 = " +
                        std::to_string(debiased) + " is not positive; classes are too close to separate at this p/n");
    return 1.0 / debiased;
}

/// Unclamped b_j estimate. Exposed so the clamp can be tested separately.
inline double estimate_bj_raw(const VectorXd& mu_hat, const Eigen::Ref<const VectorXd>& u_j, double lambda_hat_j,
                              double sigma2, double J, double J0, double J1) {
    if (mu_hat.size() != u_j.size())
        throw Error(Errc::dimension_mismatch, "estimate_bj: mean difference and eigenvector differ in length");
    const double denom = mu_hat.squaredNorm() - (J0 + J1) * sigma2;
    if (!(denom > 0))
        throw Error(Errc::infeasible_separation, "estimate_bj: debiased separation is not positive");
    if (lambda_hat_j == J || lambda_hat_j == 0.0)
        throw Error(Errc::inadmissible_parameter, "estimate_bj: lambda_hat equals J");
    const double proj = mu_hat.dot(u_j);
    return (1.0 + J / lambda_hat_j) / (1.0 - J / lambda_hat_j) * proj * proj / denom;
}

/// b_j is a squared direction cosine, so the estimate is clamped to [0, 1].
inline double clamp_unit(double b) { return b < 0.0 ? 0.0 : (b > 1.0 ? 1.0 : b); }

inline double estimate_bj(const VectorXd& mu_hat, const Eigen::Ref<const VectorXd>& u_j, double lambda_hat_j,
                          double sigma2, double J, double J0, double J1) {
    return clamp_unit(estimate_bj_raw(mu_hat, u_j, lambda_hat_j, sigma2, J, J0, J1));
}

/// Plain mean of the bulk eigenvalues (all but the r1 largest and r2 smallest).
inline double estimate_sigma2(const EigenDecomposition& eig, int r1, int r2) {
    const Index p = eig.dim();
    if (r1 < 0 || r2 < 0 || p <= Index(r1 + r2))
        throw Error(Errc::insufficient_samples, "estimate_sigma2: all eigenvalues consumed by spikes");
    return eig.values.segment(r1, p - r1 - r2).mean();
}

struct SpikeCounts {
    int r1 = 0;
    int r2 = 0;
    friend bool operator==(const SpikeCounts&, const SpikeCounts&) = default;
};

inline constexpr double edge_margin = 0.05;

/// Counts eigenvalues outside the Marchenko-Pastur edges of a bulk with
/// variance sigma2_hat(1 +/- sqrt(J))^2, widened by 5%. sigma2_hat is the bulk
/// mean, re-estimated until the counts stop changing. No lower edge is used
/// when J >= 1 since no negative spike can be detected there.
inline SpikeCounts detect_spike_counts(const EigenDecomposition& eig, double J) {
    const Index p = eig.dim();
    SpikeCounts counts;
    if (p == 0) return counts;
    const double sq = std::sqrt(J);
    for (int iter = 0; iter < 50; ++iter) {
        const double s2 = estimate_sigma2(eig, counts.r1, counts.r2);
        const double upper = s2 * (1 + sq) * (1 + sq) * (1 + edge_margin);
        const double lower = s2 * (1 - sq) * (1 - sq) * (1 - edge_margin);
        SpikeCounts next;
        while (next.r1 < p && eig.values(next.r1) > upper) ++next.r1;
        if (J < 1.0)
            while (next.r1 + next.r2 < p && eig.values(p - 1 - next.r2) < lower) ++next.r2;
        // keep at least one bulk eigenvalue
        if (next.r1 + next.r2 >= p) next.r2 = std::max(0, int(p) - 1 - next.r1);
        if (next.r1 + next.r2 >= p) next.r1 = int(p) - 1;
        if (next == counts) break;
        counts = next;
    }
    return counts;
}

/// One retained spike, in the signed index convention (1..r1, -1..-r2).
struct EstimatedSpike {
    int index = 0;
    SpikeGroup group = SpikeGroup::positive;
    double lambda = 0; // corrected spike value
    double a = 0;      // angle factor
    double b = 0;      // projection weight, clamped
};

struct SpikeEstimates {
    double alpha = 0;
    double sigma2 = 1;
    AspectRatios ratios;
    std::vector<EstimatedSpike> spikes;
    SpikeCounts requested;
    SpikeCounts retained;
    std::vector<std::string> warnings;
};

/// Plug-in estimates for every requested spike. Spikes whose estimate is
/// undetectable (|lambda_hat| <= sqrt(J), or outside (-1, -sqrt(J)) for the
/// negative group) or numerically degenerate are dropped with a warning.
/// Throws infeasible_separation when alpha_hat cannot be formed.
inline SpikeEstimates estimate_spikes(const PooledCovariance& pooled, const EigenDecomposition& eig, double sigma2,
                                      SpikeCounts counts) {
    SpikeEstimates out;
    out.sigma2 = sigma2;
    out.requested = counts;
    out.ratios = aspect_ratios(pooled.dim(), pooled.n0, pooled.n1);
    const AspectRatios& r = out.ratios;
    const VectorXd mu_hat = pooled.mean0 - pooled.mean1;
    out.alpha = estimate_alpha(mu_hat.squaredNorm(), sigma2, r.J0, r.J1);

    const Index p = eig.dim();
    if (counts.r1 + counts.r2 > p)
        throw Error(Errc::inadmissible_parameter, "estimate_spikes: r1 + r2 exceeds p");
    const double edge = std::sqrt(r.J);

    auto consider = [&](int j, SpikeGroup group) {
        double lambda = 0;
        try {
            lambda = estimate_spike_eigenvalue(j, eig, pooled.n(), r.J, sigma2);
        } catch (const Error& e) {
            out.warnings.push_back("spike " + std::to_string(j) + " dropped: " + e.what());
            return;
        }
        const bool ok = group == SpikeGroup::positive ? lambda > edge : (lambda > -1.0 && lambda < -edge);
        if (!ok) {
            out.warnings.push_back("spike " + std::to_string(j) + " dropped: estimate " + std::to_string(lambda) +
                                   " is not detectable (sqrt(J) = " + std::to_string(edge) + ")");
            return;
        }
        EstimatedSpike s;
        s.index = j;
        s.group = group;
        s.lambda = lambda;
        s.a = angle_factor(lambda, r.J);
        s.b = estimate_bj(mu_hat, eig.vector(j), lambda, sigma2, r.J, r.J0, r.J1);
        out.spikes.push_back(s);
        (group == SpikeGroup::positive ? out.retained.r1 : out.retained.r2) += 1;
    };
    for (int j = 1; j <= counts.r1; ++j) consider(j, SpikeGroup::positive);
    for (int j = 1; j <= counts.r2; ++j) consider(-j, SpikeGroup::negative);
    return out;
}

} // namespace srlda
