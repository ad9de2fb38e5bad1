#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "srlda/errors.hpp"

namespace srlda {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Pooled within-class covariance with divisor n - 2, plus both class means.
struct PooledCovariance {
    MatrixXd matrix;
    VectorXd mean0;
    VectorXd mean1;
    Index n0 = 0;
    Index n1 = 0;

    Index dim() const { return matrix.rows(); }
    Index n() const { return n0 + n1; }
};

/// Eigenpairs sorted by non-increasing eigenvalue. Column j of `vectors`
/// belongs to `values[j]`.
struct EigenDecomposition {
    VectorXd values;
    MatrixXd vectors;

    Index dim() const { return values.size(); }

    /// Column index for a signed spike index: j > 0 is the j-th largest
    /// eigenpair, j < 0 aliases p + 1 + j (so -1 is the smallest).
    Index column_for(int j) const {
        const Index p = dim();
        const Index col = j > 0 ? Index(j) - 1 : p + Index(j);
        if (j == 0 || col < 0 || col >= p)
            throw Error(Errc::dimension_mismatch,
                        "spike index " + std::to_string(j) + " out of range for p = " + std::to_string(p));
        return col;
    }
    double value(int j) const { return values(column_for(j)); }
    auto vector(int j) const { return vectors.col(column_for(j)); }
};

/// Rows of `class0` / `class1` are samples.
inline PooledCovariance pooled_covariance(const MatrixXd& class0, const MatrixXd& class1) {
    if (class0.rows() == 0 || class1.rows() == 0)
        throw Error(Errc::insufficient_samples, "pooled_covariance: both classes must be non-empty");
    if (class0.cols() != class1.cols())
        throw Error(Errc::dimension_mismatch,
                    "pooled_covariance: class 0 has p = " + std::to_string(class0.cols()) +
                        ", class 1 has p = " + std::to_string(class1.cols()));
    const Index n = class0.rows() + class1.rows();
    if (n <= 2)
        throw Error(Errc::insufficient_samples, "pooled_covariance: need n0 + n1 > 2");

    PooledCovariance out;
    out.n0 = class0.rows();
    out.n1 = class1.rows();
    out.mean0 = class0.colwise().mean().transpose();
    out.mean1 = class1.colwise().mean().transpose();

    const MatrixXd c0 = class0.rowwise() - out.mean0.transpose();
    const MatrixXd c1 = class1.rowwise() - out.mean1.transpose();
    const Index p = class0.cols();
    out.matrix = MatrixXd::Zero(p, p);
    out.matrix.selfadjointView<Eigen::Lower>().rankUpdate(c0.transpose());
    out.matrix.selfadjointView<Eigen::Lower>().rankUpdate(c1.transpose());
    out.matrix.triangularView<Eigen::StrictlyUpper>() = out.matrix.transpose();
    out.matrix /= double(n - 2);
    return out;
}

inline constexpr double symmetry_tolerance = 1e-9;

/// Full symmetric eigendecomposition, sorted descending. Each eigenvector
/// is signed so its largest-magnitude entry is positive (lowest index wins
/// ties), which makes the result a pure function of the input.
inline EigenDecomposition symmetric_eigen(const MatrixXd& s) {
    if (s.rows() != s.cols())
        throw Error(Errc::dimension_mismatch, "symmetric_eigen: matrix is not square");
    const double scale = std::max(s.cwiseAbs().maxCoeff(), 1.0);
    const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
    if (!(asym <= symmetry_tolerance * scale))
        throw Error(Errc::not_symmetric,
                    "symmetric_eigen: asymmetry " + std::to_string(asym) + " exceeds tolerance");

    const MatrixXd sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw Error(Errc::solver_failed, "symmetric_eigen: eigensolver did not converge");

    const Index p = s.rows();
    EigenDecomposition out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    for (Index j = 0; j < p; ++j) {
        auto col = out.vectors.col(j);
        Index arg = 0;
        double best = -1.0;
        for (Index i = 0; i < p; ++i) {
            const double mag = std::abs(col(i));
            if (mag > best * (1.0 + 1e-12)) {
                best = mag;
                arg = i;
            }
        }
        if (col(arg) < 0) col = -col;
    }
    return out;
}

inline EigenDecomposition symmetric_eigen(const PooledCovariance& s) { return symmetric_eigen(s.matrix); }

} // namespace srlda
