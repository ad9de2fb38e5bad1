#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <tuple>
#include <vector>

#include "srlda/dataset.hpp"
#include "srlda/error_surface.hpp"
#include "srlda/errors.hpp"
#include "srlda/linalg.hpp"
#include "srlda/parallel.hpp"

namespace srlda {

struct GridSpec {
    double step = 0.01;
    double delta = 1e-3;
    Objective objective = Objective::plain;
    /// One extra pass at step/10 over the cells around the coarse winner.
    bool refine = false;
    unsigned threads = 1;

    void validate() const {
        if (!(step > 0 && step <= 0.2)) throw Error(Errc::config_error, "grid step must lie in (0, 0.2]");
        if (!(delta > 0)) throw Error(Errc::config_error, "grid delta must be positive");
    }
};

/// Interior points k*step, 0 < k*step < 1. Halving the step keeps every
/// coarse point, so a finer grid never returns a worse minimum.
inline std::vector<double> grid_axis(double step) {
    std::vector<double> out;
    for (long k = 1;; ++k) {
        const double w = double(k) * step;
        if (w >= 1.0 - 1e-12) break;
        out.push_back(w);
    }
    return out;
}

struct OmegaOptimum {
    OmegaPoint omega;
    GammaPair gamma;
    double value = 0;
    std::size_t evaluated = 0;
};

namespace detail {

inline bool better(double v, OmegaPoint w, double best_v, OmegaPoint best_w) {
    return std::tie(v, w.omega1, w.omega2) < std::tie(best_v, best_w.omega1, best_w.omega2);
}

inline OmegaOptimum search(const std::vector<double>& ax1, const std::vector<double>& ax2, const SurfaceParams& sp,
                           const GridSpec& grid) {
    // One best per omega1 row, reduced in row order afterwards.
    struct RowBest {
        bool found = false;
        OmegaPoint w;
        double v = std::numeric_limits<double>::infinity();
        std::size_t evaluated = 0;
    };
    std::vector<RowBest> rows(ax1.size());
    parallel_for(ax1.size(), grid.threads, [&](std::size_t i) {
        RowBest& rb = rows[i];
        for (double w2 : ax2) {
            const OmegaPoint w{ax1[i], w2};
            if (!omega_admissible(w, sp, grid.delta)) continue;
            const double v = surface_objective(w, sp, grid.objective);
            ++rb.evaluated;
            if (!rb.found || better(v, w, rb.v, rb.w)) {
                rb.found = true;
                rb.v = v;
                rb.w = w;
            }
        }
    });
    OmegaOptimum best;
    bool found = false;
    for (const auto& rb : rows) {
        best.evaluated += rb.evaluated;
        if (rb.found && (!found || better(rb.v, rb.w, best.value, best.omega))) {
            found = true;
            best.value = rb.v;
            best.omega = rb.w;
        }
    }
    if (!found) throw Error(Errc::empty_grid, "optimize_omega: no admissible grid point");
    return best;
}

inline std::vector<double> local_axis(double centre, double step) {
    std::vector<double> out;
    const double fine = step / 10.0;
    for (int k = -10; k <= 10; ++k) {
        const double w = centre + k * fine;
        if (w > 0.0 && w < 1.0) out.push_back(w);
    }
    return out;
}

} // namespace detail

/// Grid search of the chosen surface over (omega1, omega2). A group with no
/// spikes is pinned at omega = 0. Ties go to the smallest omega1, then omega2.
inline OmegaOptimum optimize_omega(const SurfaceParams& sp, const GridSpec& grid) {
    grid.validate();
    sp.validate();
    const bool has1 = sp.has_group(SpikeGroup::positive);
    const bool has2 = sp.has_group(SpikeGroup::negative);
    const auto ax1 = has1 ? grid_axis(grid.step) : std::vector<double>{0.0};
    const auto ax2 = has2 ? grid_axis(grid.step) : std::vector<double>{0.0};
    OmegaOptimum best = detail::search(ax1, ax2, sp, grid);
    if (grid.refine) {
        const auto f1 = has1 ? detail::local_axis(best.omega.omega1, grid.step) : ax1;
        const auto f2 = has2 ? detail::local_axis(best.omega.omega2, grid.step) : ax2;
        OmegaOptimum fine = detail::search(f1, f2, sp, grid);
        fine.evaluated += best.evaluated;
        if (detail::better(fine.value, fine.omega, best.value, best.omega)) best = fine;
        else best.evaluated = fine.evaluated;
    }
    best.gamma = omega_to_gamma(best.omega, sp);
    return best;
}

/// Candidate ridge parameters 10^{i/10}, i = -10..10.
inline std::vector<double> rlda_gamma_grid() {
    std::vector<double> out;
    for (int i = -10; i <= 10; ++i) out.push_back(std::pow(10.0, i / 10.0));
    return out;
}

inline constexpr int rlda_cv_folds = 5;

struct RldaSelection {
    double gamma = 0;
    std::vector<double> cv_error; // one per candidate
};

/// Picks the R-LDA ridge by stratified 5-fold cross-validation of the
/// prior-weighted error. Fold of a sample = its position within its class
/// modulo 5, so the split is deterministic. Ties go to the smallest gamma.
inline RldaSelection optimize_rlda_gamma(const Dataset& train, double pi0) {
    train.validate();
    const Index n0 = train.count(0), n1 = train.count(1);
    if (n0 == 0 || n1 == 0) throw Error(Errc::insufficient_samples, "optimize_rlda_gamma: a class is empty");
    if (!(pi0 > 0 && pi0 < 1)) throw Error(Errc::inadmissible_parameter, "optimize_rlda_gamma: pi0 must lie in (0, 1)");
    const double c = std::log((1 - pi0) / pi0);
    const auto grid = rlda_gamma_grid();

    std::vector<int> fold(std::size_t(train.size()));
    std::array<int, 2> seen{0, 0};
    for (std::size_t i = 0; i < fold.size(); ++i) fold[i] = seen[std::size_t(train.labels[i])]++ % rlda_cv_folds;

    std::vector<std::array<double, 2>> wrong(grid.size(), {0.0, 0.0});
    for (int f = 0; f < rlda_cv_folds; ++f) {
        std::vector<Index> tr, te;
        for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == f ? te : tr).push_back(Index(i));
        if (te.empty()) continue;
        const Dataset dtr = train.subset(tr);
        if (dtr.count(0) == 0 || dtr.count(1) == 0 || dtr.size() <= 2)
            throw Error(Errc::insufficient_samples, "optimize_rlda_gamma: a training fold lacks a class");
        const PooledCovariance pc = pooled_covariance(dtr);
        const EigenDecomposition eig = symmetric_eigen(pc);
        const VectorXd proj = eig.vectors.transpose() * (pc.mean0 - pc.mean1);
        const VectorXd mid = 0.5 * (pc.mean0 + pc.mean1);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const VectorXd dir = eig.vectors * (proj.array() / (eig.values.array() + grid[g])).matrix();
            for (Index i : te) {
                const double w = (train.features.row(i).transpose() - mid).dot(dir) - c;
                const int label = w <= 0 ? 1 : 0;
                const int truth = train.labels[std::size_t(i)];
                if (label != truth) wrong[g][std::size_t(truth)] += 1.0;
            }
        }
    }
    RldaSelection out;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double e = pi0 * wrong[g][0] / double(n0) + (1 - pi0) * wrong[g][1] / double(n1);
        out.cv_error.push_back(e);
        if (e < best) {
            best = e;
            out.gamma = grid[g];
        }
    }
    return out;
}

} // namespace srlda
