#pragma once

#include <stdexcept>
#include <string>

namespace srlda {

enum class Errc {
    dimension_mismatch,
    insufficient_samples,
    not_symmetric,
    solver_failed,
    undetectable_spike,
    eigenvalue_tie,
    infeasible_separation,
    inadmissible_parameter,
    singular_matrix,
    empty_grid,
    parse_error,
    config_error,
    io_error,
    version_mismatch,
};

inline const char* to_string(Errc code) {
    switch (code) {
    case Errc::dimension_mismatch: return "dimension mismatch";
    case Errc::insufficient_samples: return "insufficient samples";
    case Errc::not_symmetric: return "matrix not symmetric";
    case Errc::solver_failed: return "eigensolver failed";
    case Errc::undetectable_spike: return "undetectable spike";
    case Errc::eigenvalue_tie: return "eigenvalue tie";
    case Errc::infeasible_separation: return "infeasible class separation";
    case Errc::inadmissible_parameter: return "inadmissible parameter";
    case Errc::singular_matrix: return "singular matrix";
    case Errc::empty_grid: return "empty admissible grid";
    case Errc::parse_error: return "parse error";
    case Errc::config_error: return "configuration error";
    case Errc::io_error: return "i/o error";
    case Errc::version_mismatch: return "version mismatch";
    }
    return "unknown error";
}

/// Library-wide exception. The code lets callers (the CLI in particular)
/// tell usage problems apart from numerical failures.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace srlda
