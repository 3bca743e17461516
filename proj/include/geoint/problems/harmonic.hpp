#pragma once

#include "geoint/hamiltonian.hpp"

namespace geoint {

/// H = (p^2 + omega^2 q^2) / 2 in one degree of freedom, with its Taylor generator.
HamiltonianSystem harmonic_oscillator(double omega = 1.0);

/// Exact rotation of u0 after time t.
PhaseState harmonic_exact(const PhaseState& u0, double t, double omega = 1.0);

}  // namespace geoint
