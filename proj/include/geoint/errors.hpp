#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geoint {

enum class ErrorKind {
    singular_matrix,
    not_symmetric,
    no_convergence,
    non_finite_evaluation,
    odd_length,
    length_mismatch,
    zero_initial_energy,
    stage_solve_failure,
    rank_deficient_constraints,
    solve_failure,
    missing_history,
    non_finite_coefficient,
    degenerate_fit,
    pole_on_path,
    step_collapse,
    collision_singularity,
    validation,
    mismatched_problem,
    io_failure,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Validation-class errors map to CLI exit code 2, everything else to 3.
bool is_validation_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace geoint
