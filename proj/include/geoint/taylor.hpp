#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "geoint/numerics.hpp"

namespace geoint {

/// Produces Taylor coefficients of the solution of u' = F(u, t) about t0 by
/// the recurrence (n + 1) u_{n+1} = F^n(u_0, ..., u_n), where F^n is the n-th
/// Taylor coefficient of F along the series.
struct TaylorGenerator {
    std::size_t dimension = 0;
    /// u_{n+1} from u_0..u_n (n = coeffs.size() - 1), expansion point t0.
    std::function<ComplexVector(std::span<const ComplexVector> coeffs, double t0)> next;
    /// The vector field F(u, t) itself; used for residual checks.
    std::function<ComplexVector(std::span<const Complex> u, double t)> field;
};

}  // namespace geoint
