#pragma once

#include <cstddef>
#include <span>

#include "geoint/hamiltonian.hpp"
#include "geoint/numerics.hpp"

namespace geoint {

/// Periodic Toda lattice, H = sum_k (p_k^2 / 2 + exp(q_k - q_{k+1})), q_{d+1} = q_1.
double toda_hamiltonian(std::span<const double> u);
Vector toda_grad(std::span<const double> u);
HamiltonianSystem toda_system(std::size_t d);

/// d = 3, q = (0, 2, 3), p = (0.5, -1.5, 1).
PhaseState toda_initial();

/// Symmetric Lax matrix: a_k = -p_k / 2 on the diagonal,
/// b_k = exp((q_k - q_{k+1}) / 2) / 2 off the diagonal and in the corners.
Matrix lax_matrix(std::span<const double> u);
Vector lax_eigenvalues(std::span<const double> u);

}  // namespace geoint
