#pragma once

// Integrators for Lagrangians L = v^T M v / 2 - U(q) with holonomic
// constraints phi^a(q) = 0, built from the discrete Dirac procedure
//   p^{n+1} = M v^n
//   p^n - M v^n - dt grad U(q^n) = sum_a lambda_a alpha_d^a
//   <alpha_d^a, v^n> = 0
// with v^n = (q^{n+1} - q^n) / dt (Dirac-1) or (q^{n+1} - q^{n-1}) / (2 dt) (Dirac-2).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>

#include "geoint/numerics.hpp"

namespace geoint {

struct ConstrainedSystem {
    std::size_t dim = 0;          // configuration dimension d
    std::size_t constraints = 0;  // m
    Matrix mass;                  // d x d, symmetric positive definite
    std::function<double(std::span<const double>)> potential;
    std::function<Vector(std::span<const double>)> grad_potential;
    /// phi^a(q), length m.
    std::function<Vector(std::span<const double>)> constraint_values;
    /// m x d matrix whose row a is alpha^a = grad phi^a.
    std::function<Matrix(std::span<const double>)> constraint_jacobian;
    /// Optional: sum_a w_a Hess phi^a (q) applied to v; finite differences otherwise.
    std::function<Vector(std::span<const double> q, std::span<const double> v, std::size_t a)> constraint_hessian_vector;

    void validate() const;
    /// p^T M^{-1} p / 2 + U(q).
    double energy(std::span<const double> q, std::span<const double> p) const;
};

struct DiracState {
    Vector q;
    Vector p;
    std::optional<Vector> previous_q;  // q^{n-1}, needed by Dirac-2
    Vector lambda;
};

/// How alpha_d^a is evaluated inside the step.
enum class DiscreteForm {
    tangent,   // alpha^a(q^n): linear in the unknowns
    midpoint,  // alpha^a at the midpoint of the stencil; phi^a quadratic is then conserved exactly
};

struct DiracOptions {
    DiscreteForm form = DiscreteForm::midpoint;
    double tolerance = 1e-12;  // on the step residual, relative to max(1, |p|_inf)
    int max_newton = 25;
};

DiracState dirac1_step(const ConstrainedSystem& sys, const DiracState& st, double dt, const DiracOptions& opts = {});

/// Throws MissingHistory when st.previous_q is empty. Every step (Dirac-1
/// included) stores q^n as history, so a Dirac-1 step starts a Dirac-2 run.
DiracState dirac2_step(const ConstrainedSystem& sys, const DiracState& st, double dt, const DiracOptions& opts = {});

/// max_a |phi^a(q)|.
double constraint_residual(const ConstrainedSystem& sys, const DiracState& st);

/// max_a |<alpha_d^a, v>| for the stencil between q0 and q1 (velocity v).
double velocity_constraint_residual(const ConstrainedSystem& sys, std::span<const double> q0,
                                    std::span<const double> q1, std::span<const double> v, DiscreteForm form);

/// Explicit Euler on q' = M^{-1} p, p' = -grad U - A^T lambda, with lambda from
/// the acceleration-level constraint A M^{-1} A^T lambda = h - A M^{-1} grad U,
/// h_a = qdot^T Hess phi^a qdot.
DiracState euler_constrained_control(const ConstrainedSystem& sys, const DiracState& st, double dt);

}  // namespace geoint
