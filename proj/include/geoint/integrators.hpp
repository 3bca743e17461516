#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "geoint/hamiltonian.hpp"
#include "geoint/numerics.hpp"

namespace geoint {

struct StepReport {
    PhaseState state;
    int iterations = 0;     // fixed-point or Newton iterations spent on the implicit stages
    double residual = 0.0;  // final stage residual (inf-norm)
};

struct StageSolverOptions {
    double tolerance = 1e-13;  // on stage increments, relative to max(1, |u|_inf)
    int max_fixed_point = 100;
    int max_newton = 30;
};

PhaseState explicit_euler_step(const HamiltonianSystem& system, const PhaseState& u, double dt);

/// Backward Euler u' = u + dt J grad H(u'). Not symplectic; kept as a control.
StepReport implicit_euler_step(const HamiltonianSystem& system, const PhaseState& u, double dt,
                               const StageSolverOptions& opts = {});

/// a: (q^n, p^{n+1}) on the right-hand side; b: (q^{n+1}, p^n).
enum class EulerVariant { a, b };

StepReport symplectic_euler_step(const HamiltonianSystem& system, const PhaseState& u, double dt,
                                 EulerVariant variant, const StageSolverOptions& opts = {});

/// Symplectic Euler a with dt/2 followed by b with dt/2.
StepReport stormer_verlet_step(const HamiltonianSystem& system, const PhaseState& u, double dt,
                               const StageSolverOptions& opts = {});

PhaseState rk4_step(const HamiltonianSystem& system, const PhaseState& u, double dt);

struct ButcherTableau {
    std::string name;
    std::size_t stages = 0;
    Matrix alpha;  // stages x stages
    Vector beta;
    int order = 0;

    bool is_explicit() const noexcept;
    void validate() const;
};

/// Three-stage symplectic order-4 scheme (composition of implicit midpoint
/// steps b dt, (1 - 2b) dt, b dt with b = 1 / (2 - 2^{1/3})).
ButcherTableau rk4sym_tableau();
ButcherTableau classical_rk4_tableau();
ButcherTableau implicit_midpoint_tableau();

/// Text format: optional '#' comments, then "stages order", then one row of
/// alpha per line, then the beta row.
ButcherTableau parse_tableau(std::string_view text, std::string name = "custom");
ButcherTableau load_tableau(const std::filesystem::path& path);

/// max_{i,j} |beta_i beta_j - beta_i alpha_ij - beta_j alpha_ji|; zero iff the
/// scheme is symplectic.
double check_symplectic_condition(const ButcherTableau& tab);

StepReport irk_step(const HamiltonianSystem& system, const PhaseState& u, double dt, const ButcherTableau& tab,
                    const StageSolverOptions& opts = {});

// General first-order systems u' = F(u, t) (non-Hamiltonian, possibly complex).
using OdeField = std::function<ComplexVector(std::span<const Complex>, double)>;

ComplexVector rk4_ode_step(const OdeField& field, std::span<const Complex> u, double t, double dt);

struct AdaptiveRk4Options {
    double tolerance = 1e-8;  // local error per step, inf-norm, absolute
    double initial_step = 1e-3;
    double min_step = 1e-12;
    double max_step = 1.0;
    double safety = 0.9;
};

struct AdaptiveRk4Result {
    Vector times;
    std::vector<ComplexVector> states;
    Vector steps;
    ComplexVector final_state;

    double mean_step() const;
};

using Rk4Observer = std::function<void(double t, const ComplexVector& state, double step)>;

/// Classical RK4 with step-doubling error control. Records every accepted step
/// when record is set; the final state is always returned. The observer sees
/// every accepted step.
AdaptiveRk4Result adaptive_rk4(const OdeField& field, ComplexVector u0, double t0, double t1,
                               const AdaptiveRk4Options& opts = {}, bool record = false,
                               const Rk4Observer& observer = {});

}  // namespace geoint
