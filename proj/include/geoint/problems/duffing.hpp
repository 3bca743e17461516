#pragma once

#include <span>

#include "geoint/hamiltonian.hpp"
#include "geoint/integrators.hpp"
#include "geoint/taylor.hpp"

namespace geoint {

/// u'' + r u' + a u + b u^3 = c cos(omega t), as the first-order system (u, u').
struct DuffingProblem {
    double a = 1.0;
    double b = 1.0;
    double r = 0.0;
    double c = 0.0;
    double omega = 1.0;

    static DuffingProblem case1();  // a = 2/9, b = 1, r = -1, c = 0
    static DuffingProblem case2();  // a = 1, b = 1, r = 0, c = 0
    /// a = -1, b = 1, r = 0.3, omega = 1.2 with the given forcing amplitude.
    static DuffingProblem forced(double c);

    ComplexVector rhs(std::span<const Complex> u, double t) const;
    OdeField field() const;
    /// Taylor recurrence; the forcing is expanded as cos(omega (t0 + tau)) in tau.
    TaylorGenerator taylor() const;
    /// Only for c = 0 and r = 0: H = v^2/2 + a u^2/2 + b u^4/4.
    HamiltonianSystem hamiltonian_system() const;
};

/// exp(-4t/3) (v^2 - 2uv/3 + u^2/9 + u^4/2), constant for Case 1.
double duffing_I1(std::span<const double> u, double t);
/// v^2/2 + u^2/2 + u^4/4, constant for Case 2.
double duffing_H2(std::span<const double> u);

}  // namespace geoint
