#include "geoint/problems/harmonic.hpp"

#include <cmath>

namespace geoint {

HamiltonianSystem harmonic_oscillator(double omega) {
    const double w2 = omega * omega;
    HamiltonianSystem sys;
    sys.dof = 1;
    sys.separable = true;
    sys.energy = [w2](std::span<const double> u) { return 0.5 * (u[1] * u[1] + w2 * u[0] * u[0]); };
    sys.gradient = [w2](std::span<const double> u) { return Vector{w2 * u[0], u[1]}; };

    TaylorGenerator gen;
    gen.dimension = 2;
    gen.field = [w2](std::span<const Complex> u, double) { return ComplexVector{u[1], -w2 * u[0]}; };
    gen.next = [w2](std::span<const ComplexVector> c, double) {
        const ComplexVector& un = c.back();
        const double k = static_cast<double>(c.size());
        return ComplexVector{un[1] / k, -w2 * un[0] / k};
    };
    sys.taylor = std::move(gen);
    return sys;
}

PhaseState harmonic_exact(const PhaseState& u0, double t, double omega) {
    const double c = std::cos(omega * t);
    const double s = std::sin(omega * t);
    const double q = u0[0], p = u0[1];
    return PhaseState(Vector{q * c + p * s / omega, p * c - q * omega * s});
}

}  // namespace geoint
