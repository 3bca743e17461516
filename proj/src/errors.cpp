#include "geoint/errors.hpp"

namespace geoint {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::singular_matrix: return "SingularMatrix";
        case ErrorKind::not_symmetric: return "NotSymmetric";
        case ErrorKind::no_convergence: return "NoConvergence";
        case ErrorKind::non_finite_evaluation: return "NonFiniteEvaluation";
        case ErrorKind::odd_length: return "OddLength";
        case ErrorKind::length_mismatch: return "LengthMismatch";
        case ErrorKind::zero_initial_energy: return "ZeroInitialEnergy";
        case ErrorKind::stage_solve_failure: return "StageSolveFailure";
        case ErrorKind::rank_deficient_constraints: return "RankDeficientConstraints";
        case ErrorKind::solve_failure: return "SolveFailure";
        case ErrorKind::missing_history: return "MissingHistory";
        case ErrorKind::non_finite_coefficient: return "NonFiniteCoefficient";
        case ErrorKind::degenerate_fit: return "DegenerateFit";
        case ErrorKind::pole_on_path: return "PoleOnPath";
        case ErrorKind::step_collapse: return "StepCollapse";
        case ErrorKind::collision_singularity: return "CollisionSingularity";
        case ErrorKind::validation: return "ValidationError";
        case ErrorKind::mismatched_problem: return "MismatchedProblem";
        case ErrorKind::io_failure: return "IoFailure";
    }
    return "UnknownError";
}

bool is_validation_error(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::validation:
        case ErrorKind::mismatched_problem:
        case ErrorKind::odd_length:
        case ErrorKind::length_mismatch:
        case ErrorKind::missing_history:
        case ErrorKind::io_failure:
            return true;
        default:
            return false;
    }
}

}  // namespace geoint
