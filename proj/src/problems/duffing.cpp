#include "geoint/problems/duffing.hpp"

#include <cmath>

#include "geoint/errors.hpp"

namespace geoint {

DuffingProblem DuffingProblem::case1() { return {2.0 / 9.0, 1.0, -1.0, 0.0, 1.0}; }

DuffingProblem DuffingProblem::case2() { return {1.0, 1.0, 0.0, 0.0, 1.0}; }

DuffingProblem DuffingProblem::forced(double c) { return {-1.0, 1.0, 0.3, c, 1.2}; }

ComplexVector DuffingProblem::rhs(std::span<const Complex> u, double t) const {
    if (u.size() != 2) fail(ErrorKind::length_mismatch, "Duffing state is (u, u')");
    return {u[1], -r * u[1] - a * u[0] - b * u[0] * u[0] * u[0] + c * std::cos(omega * t)};
}

OdeField DuffingProblem::field() const {
    const DuffingProblem self = *this;
    return [self](std::span<const Complex> u, double t) { return self.rhs(u, t); };
}

TaylorGenerator DuffingProblem::taylor() const {
    const DuffingProblem self = *this;
    TaylorGenerator gen;
    gen.dimension = 2;
    gen.field = [self](std::span<const Complex> u, double t) { return self.rhs(u, t); };
    gen.next = [self](std::span<const ComplexVector> coeffs, double t0) {
        const std::size_t n = coeffs.size() - 1;
        // Cauchy products for u^2 and u^3 at order n.
        Complex cube(0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            Complex square(0.0);
            for (std::size_t j = 0; j <= i; ++j) square += coeffs[j][0] * coeffs[i - j][0];
            cube += square * coeffs[n - i][0];
        }
        // cos(omega (t0 + tau)) = Re(exp(i omega t0) sum (i omega tau)^n / n!)
        Complex forcing(0.0);
        if (self.c != 0.0) {
            Complex term = std::exp(Complex(0.0, self.omega * t0));
            for (std::size_t k = 1; k <= n; ++k) term *= Complex(0.0, self.omega) / static_cast<double>(k);
            forcing = self.c * term.real();
        }
        const double inv = 1.0 / static_cast<double>(n + 1);
        const Complex u = coeffs[n][0], v = coeffs[n][1];
        return ComplexVector{v * inv, (-self.r * v - self.a * u - self.b * cube + forcing) * inv};
    };
    return gen;
}

HamiltonianSystem DuffingProblem::hamiltonian_system() const {
    if (r != 0.0 || c != 0.0) fail(ErrorKind::validation, "Duffing is Hamiltonian only without damping and forcing");
    const double ka = a, kb = b;
    HamiltonianSystem sys;
    sys.dof = 1;
    sys.separable = true;
    sys.energy = [ka, kb](std::span<const double> u) {
        const double q = u[0], p = u[1];
        return 0.5 * p * p + 0.5 * ka * q * q + 0.25 * kb * q * q * q * q;
    };
    sys.gradient = [ka, kb](std::span<const double> u) {
        const double q = u[0];
        return Vector{ka * q + kb * q * q * q, u[1]};
    };
    sys.taylor = taylor();
    return sys;
}

double duffing_I1(std::span<const double> u, double t) {
    const double x = u[0], v = u[1];
    return std::exp(-4.0 * t / 3.0) * (v * v - 2.0 * x * v / 3.0 + x * x / 9.0 + 0.5 * x * x * x * x);
}

double duffing_H2(std::span<const double> u) {
    const double x = u[0], v = u[1];
    return 0.5 * v * v + 0.5 * x * x + 0.25 * x * x * x * x;
}

}  // namespace geoint
