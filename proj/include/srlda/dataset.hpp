#pragma once

#include <string>
#include <vector>

#include "srlda/errors.hpp"
#include "srlda/linalg.hpp"

namespace srlda {

/// Labelled samples: row i of `features` carries `labels[i]` in {0, 1}.
struct Dataset {
    MatrixXd features;
    std::vector<int> labels;

    Index size() const { return features.rows(); }
    Index dim() const { return features.cols(); }

    Index count(int label) const {
        Index k = 0;
        for (int l : labels) k += (l == label);
        return k;
    }

    void validate() const {
        if (Index(labels.size()) != features.rows())
            throw Error(Errc::dimension_mismatch, "dataset: label count does not match sample count");
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] != 0 && labels[i] != 1)
                throw Error(Errc::parse_error, "dataset: label at row " + std::to_string(i) + " is not 0 or 1");
    }

    /// Samples of one class, in dataset order.
    MatrixXd class_matrix(int label) const {
        MatrixXd out(count(label), dim());
        Index r = 0;
        for (Index i = 0; i < size(); ++i)
            if (labels[std::size_t(i)] == label) out.row(r++) = features.row(i);
        return out;
    }

    Dataset subset(const std::vector<Index>& rows) const {
        Dataset out;
        out.features.resize(Index(rows.size()), dim());
        out.labels.reserve(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) {
            out.features.row(Index(k)) = features.row(rows[k]);
            out.labels.push_back(labels[std::size_t(rows[k])]);
        }
        return out;
    }
};

inline PooledCovariance pooled_covariance(const Dataset& d) {
    d.validate();
    return pooled_covariance(d.class_matrix(0), d.class_matrix(1));
}

} // namespace srlda
