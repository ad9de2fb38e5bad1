#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "srlda/errors.hpp"
#include "srlda/normal.hpp"
#include "srlda/spiked_model.hpp"

namespace srlda {

struct SurfaceSpike {
    double lambda = 0;
    double a = 0;
    double b = 0;
    SpikeGroup group = SpikeGroup::positive;
};

/// Everything the deterministic error surface depends on. c, eta and zeta
/// are derived on demand so they cannot drift from alpha, J0, J1 and pi0.
struct SurfaceParams {
    std::vector<SurfaceSpike> spikes;
    double alpha = 1;
    double J0 = 0; // p / n0
    double J1 = 0; // p / n1
    double pi0 = 0.5;

    double pi1() const { return 1.0 - pi0; }
    double c() const { return std::log(pi1() / pi0); }
    double eta() const { return alpha * (J0 - J1 + 2.0 * c()); }
    double zeta() const { return alpha * (J0 + J1); }

    bool has_group(SpikeGroup g) const {
        return std::any_of(spikes.begin(), spikes.end(), [g](const SurfaceSpike& s) { return s.group == g; });
    }
    /// Largest positive spike, the reference for the omega1 mapping.
    std::optional<double> lambda1() const {
        std::optional<double> best;
        for (const auto& s : spikes)
            if (s.group == SpikeGroup::positive && (!best || s.lambda > *best)) best = s.lambda;
        return best;
    }
    /// Most negative spike (lambda_{-1}), the reference for the omega2 mapping.
    std::optional<double> lambda_m1() const {
        std::optional<double> best;
        for (const auto& s : spikes)
            if (s.group == SpikeGroup::negative && (!best || s.lambda < *best)) best = s.lambda;
        return best;
    }

    void validate() const {
        if (!(pi0 > 0 && pi0 < 1)) throw Error(Errc::inadmissible_parameter, "pi0 must lie in (0, 1)");
        if (!(alpha > 0)) throw Error(Errc::inadmissible_parameter, "alpha must be positive");
        if (!(J0 > 0 && J1 > 0)) throw Error(Errc::inadmissible_parameter, "J0 and J1 must be positive");
        double total_b = 0;
        for (const auto& s : spikes) {
            if (!(s.b >= 0 && s.b <= 1)) throw Error(Errc::inadmissible_parameter, "every b_j must lie in [0, 1]");
            if (s.group == SpikeGroup::positive && !(s.lambda > 0))
                throw Error(Errc::inadmissible_parameter, "positive-group spike must be > 0");
            if (s.group == SpikeGroup::negative && !(s.lambda > -1 && s.lambda < 0))
                throw Error(Errc::inadmissible_parameter, "negative-group spike must lie in (-1, 0)");
            total_b += s.b;
        }
        if (total_b > 1.0 + 1e-12) throw Error(Errc::inadmissible_parameter, "sum of b_j exceeds 1");
    }
};

/// Builds surface parameters from plug-in estimates. If the clamped b_j sum
/// past 1 they are rescaled to sum to 1 (orthonormal directions cap the sum).
inline SurfaceParams surface_from_estimates(const SpikeEstimates& est, double pi0,
                                            std::vector<std::string>* warnings = nullptr) {
    SurfaceParams sp;
    sp.alpha = est.alpha;
    sp.J0 = est.ratios.J0;
    sp.J1 = est.ratios.J1;
    sp.pi0 = pi0;
    double total_b = 0;
    for (const auto& s : est.spikes) {
        sp.spikes.push_back({s.lambda, s.a, s.b, s.group});
        total_b += s.b;
    }
    if (total_b > 1.0) {
        for (auto& s : sp.spikes) s.b /= total_b;
        if (warnings) warnings->push_back("estimated b_j summed to " + std::to_string(total_b) + "; rescaled to 1");
    }
    sp.validate();
    return sp;
}

struct OmegaPoint {
    double omega1 = 0;
    double omega2 = 0;
};

struct GammaPair {
    double gamma1 = 0;
    double gamma2 = 0;
};

inline void check_open_unit(double w, const char* name) {
    if (!(w > 0.0 && w < 1.0))
        throw Error(Errc::inadmissible_parameter, std::string(name) + " must lie in the open interval (0, 1)");
}

/// gamma1 = w1 / ((1 - w1) lambda1), gamma2 = -w2 / ((1 - w2) lambda_{-1}).
inline GammaPair omega_to_gamma(OmegaPoint w, double lambda1, double lambda_m1) {
    check_open_unit(w.omega1, "omega1");
    check_open_unit(w.omega2, "omega2");
    if (!(lambda1 > 0)) throw Error(Errc::inadmissible_parameter, "omega_to_gamma: lambda1 must be positive");
    if (!(lambda_m1 > -1 && lambda_m1 < 0))
        throw Error(Errc::inadmissible_parameter, "omega_to_gamma: lambda_{-1} must lie in (-1, 0)");
    return {w.omega1 / ((1 - w.omega1) * lambda1), -w.omega2 / ((1 - w.omega2) * lambda_m1)};
}

/// Inverse map: w1 = gamma1 lambda1 / (1 + gamma1 lambda1), w2 = -gamma2 lambda_{-1} / (1 - gamma2 lambda_{-1}).
inline OmegaPoint gamma_to_omega(GammaPair g, double lambda1, double lambda_m1) {
    if (!(g.gamma1 > 0 && g.gamma2 > 0))
        throw Error(Errc::inadmissible_parameter, "gamma_to_omega: gamma1 and gamma2 must be positive");
    const double t1 = g.gamma1 * lambda1, t2 = -g.gamma2 * lambda_m1;
    return {t1 / (1 + t1), t2 / (1 + t2)};
}

/// Surface-aware variant: a group without spikes keeps its gamma at 0 and its
/// omega may be 0.
inline GammaPair omega_to_gamma(OmegaPoint w, const SurfaceParams& sp) {
    GammaPair g;
    if (auto l1 = sp.lambda1()) {
        check_open_unit(w.omega1, "omega1");
        g.gamma1 = w.omega1 / ((1 - w.omega1) * *l1);
    }
    if (auto lm1 = sp.lambda_m1()) {
        check_open_unit(w.omega2, "omega2");
        g.gamma2 = -w.omega2 / ((1 - w.omega2) * *lm1);
    }
    return g;
}

/// gamma_{i,j} = gamma_i lambda_j / (1 + gamma_i lambda_j), with i picked by
/// the spike's group.
inline std::vector<double> gamma_weights(GammaPair gp, const SurfaceParams& sp) {
    std::vector<double> out;
    out.reserve(sp.spikes.size());
    for (const auto& s : sp.spikes) {
        const double g = s.group == SpikeGroup::positive ? gp.gamma1 : gp.gamma2;
        const double denom = 1.0 + g * s.lambda;
        if (std::abs(denom) <= 1e-14)
            throw Error(Errc::inadmissible_parameter, "gamma_weights: pole 1 + gamma * lambda = 0");
        out.push_back(g * s.lambda / denom);
    }
    return out;
}

/// Same weights written directly in omega:
///   gamma_{1,j} = w1 lambda_j / ((1 - w1) lambda_1 + w1 lambda_j)
///   gamma_{2,j} = -w2 lambda_j / ((1 - w2) lambda_{-1} - w2 lambda_j)
inline std::vector<double> omega_weights(OmegaPoint w, const SurfaceParams& sp) {
    const auto l1 = sp.lambda1();
    const auto lm1 = sp.lambda_m1();
    std::vector<double> out;
    out.reserve(sp.spikes.size());
    for (const auto& s : sp.spikes) {
        double denom, num;
        if (s.group == SpikeGroup::positive) {
            num = w.omega1 * s.lambda;
            denom = (1 - w.omega1) * *l1 + w.omega1 * s.lambda;
        } else {
            num = -w.omega2 * s.lambda;
            denom = (1 - w.omega2) * *lm1 - w.omega2 * s.lambda;
        }
        if (std::abs(denom) <= 1e-14)
            throw Error(Errc::inadmissible_parameter, "omega_weights: omega2 hits an excluded point");
        out.push_back(num / denom);
    }
    return out;
}

inline double g_from_weights(const std::vector<double>& w, const SurfaceParams& sp) {
    double g = 1.0;
    for (std::size_t k = 0; k < sp.spikes.size(); ++k) g -= sp.spikes[k].a * sp.spikes[k].b * w[k];
    return g;
}

inline double d_from_weights(const std::vector<double>& w, const SurfaceParams& sp) {
    double d = 1.0;
    for (std::size_t k = 0; k < sp.spikes.size(); ++k) {
        const auto& s = sp.spikes[k];
        d += s.lambda * s.b;
        d -= 2.0 * (s.lambda + 1.0) * s.a * s.b * w[k];
        d += s.a * s.b * (s.lambda * s.a + 1.0) * w[k] * w[k];
    }
    return d;
}

inline double g_bar(GammaPair gp, const SurfaceParams& sp) { return g_from_weights(gamma_weights(gp, sp), sp); }
inline double d_bar(GammaPair gp, const SurfaceParams& sp) { return d_from_weights(gamma_weights(gp, sp), sp); }
inline double g_tilde(OmegaPoint w, const SurfaceParams& sp) { return g_from_weights(omega_weights(w, sp), sp); }
inline double d_tilde(OmegaPoint w, const SurfaceParams& sp) { return d_from_weights(omega_weights(w, sp), sp); }

inline double plain_error_from(double g, double d, const SurfaceParams& sp) {
    const double var = d + sp.zeta();
    if (!(var > 0)) throw Error(Errc::infeasible_separation, "deterministic_error: D + zeta is not positive");
    const double scale = 2.0 * std::sqrt(sp.alpha) * std::sqrt(var);
    const double eta = sp.eta();
    return sp.pi0 * normal_cdf(-(g - eta) / scale) + sp.pi1() * normal_cdf(-(g + eta) / scale);
}

inline double oi_error_from(double g, double d, const SurfaceParams& sp) {
    if (!(g > 0)) throw Error(Errc::infeasible_separation, "oi_deterministic_error: G is not positive");
    const double var = d + sp.zeta();
    if (!(var > 0)) throw Error(Errc::infeasible_separation, "oi_deterministic_error: D + zeta is not positive");
    const double root = std::sqrt(sp.alpha) * std::sqrt(var);
    const double delta1 = -g / (2.0 * root);
    const double delta2 = root / g * sp.c();
    return sp.pi0 * normal_cdf(delta1 + delta2) + sp.pi1() * normal_cdf(delta1 - delta2);
}

/// Deterministic equivalent of the SRLDA misclassification rate at (gamma1, gamma2).
inline double deterministic_error(GammaPair gp, const SurfaceParams& sp) {
    const auto w = gamma_weights(gp, sp);
    return plain_error_from(g_from_weights(w, sp), d_from_weights(w, sp), sp);
}

/// Same surface parametrised by omega (the grid-search objective).
inline double deterministic_error(OmegaPoint w, const SurfaceParams& sp) {
    const auto wt = omega_weights(w, sp);
    return plain_error_from(g_from_weights(wt, sp), d_from_weights(wt, sp), sp);
}

/// theta* = (J0 - J1)/2 - ((D + zeta) / G) log(pi1 / pi0).
inline double optimal_theta(GammaPair gp, const SurfaceParams& sp) {
    const auto w = gamma_weights(gp, sp);
    const double g = g_from_weights(w, sp);
    if (g == 0.0) throw Error(Errc::infeasible_separation, "optimal_theta: G vanishes");
    const double d = d_from_weights(w, sp);
    return 0.5 * (sp.J0 - sp.J1) - (d + sp.zeta()) / g * sp.c();
}

/// Optimal-intercept surface pi0 Phi(D1 + D2) + pi1 Phi(D1 - D2).
inline double oi_deterministic_error(OmegaPoint w, const SurfaceParams& sp) {
    const auto wt = omega_weights(w, sp);
    return oi_error_from(g_from_weights(wt, sp), d_from_weights(wt, sp), sp);
}

inline double oi_deterministic_error(GammaPair gp, const SurfaceParams& sp) {
    const auto wt = gamma_weights(gp, sp);
    return oi_error_from(g_from_weights(wt, sp), d_from_weights(wt, sp), sp);
}

enum class Objective { plain, optimal_intercept };

/// Value reported for grid points where the surface is undefined.
inline constexpr double infeasible_sentinel = 0.5;

/// Single evaluation path shared by the grid search and surface export.
inline double surface_objective(OmegaPoint w, const SurfaceParams& sp, Objective obj) noexcept {
    try {
        const double v = obj == Objective::plain ? deterministic_error(w, sp) : oi_deterministic_error(w, sp);
        return std::isfinite(v) ? v : infeasible_sentinel;
    } catch (const Error&) {
        return infeasible_sentinel;
    }
}

/// Excluded omega2 values (1 + lambda_j / lambda_{-1})^{-1}, j in the negative group.
inline std::vector<double> omega2_exclusions(const SurfaceParams& sp) {
    std::vector<double> out;
    if (auto lm1 = sp.lambda_m1())
        for (const auto& s : sp.spikes)
            if (s.group == SpikeGroup::negative) out.push_back(1.0 / (1.0 + s.lambda / *lm1));
    return out;
}

inline bool omega_admissible(OmegaPoint w, const SurfaceParams& sp, double delta) {
    if (sp.has_group(SpikeGroup::positive) && !(w.omega1 > 0 && w.omega1 < 1)) return false;
    if (sp.has_group(SpikeGroup::negative)) {
        if (!(w.omega2 > 0 && w.omega2 < 1)) return false;
        for (double x : omega2_exclusions(sp))
            if (std::abs(w.omega2 - x) < delta) return false;
    }
    return true;
}

/// Membership in the admissible gamma set: gamma2 outside every
/// U(1/|lambda_j|, delta) for negative-group spikes.
inline bool gamma_admissible(GammaPair gp, const SurfaceParams& sp, double delta) {
    if (gp.gamma1 < 0 || gp.gamma2 < 0) return false;
    for (const auto& s : sp.spikes)
        if (s.group == SpikeGroup::negative && std::abs(gp.gamma2 - 1.0 / std::abs(s.lambda)) < delta) return false;
    return true;
}

} // namespace srlda
