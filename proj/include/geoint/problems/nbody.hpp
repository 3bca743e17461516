#pragma once

#include <cstddef>
#include <span>

#include "geoint/hamiltonian.hpp"

namespace geoint {

/// Planar gravitational n-body problem. State layout: q = (x_1, y_1, x_2, y_2, ...),
/// p in the same order.
struct NBody {
    Vector masses;
    double G = 1.0;

    std::size_t bodies() const noexcept { return masses.size(); }

    double hamiltonian(std::span<const double> u) const;
    Vector gradient(std::span<const double> u) const;
    /// sum_k (x_k p_{y,k} - y_k p_{x,k}).
    double angular_momentum(std::span<const double> u) const;
    HamiltonianSystem system() const;
};

/// Three unit masses with G = 1 on the figure-eight choreography; body 3 starts
/// at the origin.
NBody figure_eight_problem();
PhaseState figure_eight_initial();
inline constexpr double figure_eight_period = 6.32591398;

/// Figure-eight data with the middle body replaced by its own state at T/80.
PhaseState perturbed_initial();

}  // namespace geoint
