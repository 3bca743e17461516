#pragma once

// Borel-Pade-Laplace time stepping: Taylor series by recurrence, Borel
// transform, componentwise Pade continuation, Laplace integral by
// Gauss-Laguerre quadrature, step length chosen from the ODE residual.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "geoint/hamiltonian.hpp"
#include "geoint/numerics.hpp"
#include "geoint/taylor.hpp"

namespace geoint {

struct TaylorSeries {
    double t0 = 0.0;
    std::vector<ComplexVector> coeffs;  // u_0 .. u_N

    std::size_t order() const noexcept { return coeffs.empty() ? 0 : coeffs.size() - 1; }
    std::size_t dimension() const noexcept { return coeffs.empty() ? 0 : coeffs.front().size(); }
    /// Coefficients of one component, lowest order first.
    ComplexVector component(std::size_t i) const;
    /// Partial sum sum_n u_n tau^n.
    ComplexVector evaluate(double tau) const;
};

/// a(xi) / b(xi) with b_0 = 1, both lowest degree first.
struct RationalApproximant {
    ComplexVector numerator{Complex(0.0)};
    ComplexVector denominator{Complex(1.0)};

    Complex operator()(Complex xi) const noexcept;
    Complex derivative(Complex xi) const noexcept;
    ComplexVector poles() const;
    std::size_t numerator_degree() const noexcept { return numerator.size() - 1; }
    std::size_t denominator_degree() const noexcept { return denominator.size() - 1; }
};

enum class ResidualScale {
    absolute,  // ||dS/dt - F||_inf
    mixed,     // same, divided by max(1, ||F||_inf)
};

struct BplConfig {
    int order = 10;
    int pade_num = 4;
    int pade_den = 5;
    int quad_nodes = 20;
    double eps_res = 1e-6;
    double growth = 2.0;
    double initial_step = 0.01;
    double min_step = 1e-10;
    double max_step = 100.0;
    int max_trials = 40;
    /// Stop refining the accepted step once the bracket ratio falls below this.
    double refine_ratio = 1.05;
    ResidualScale scale = ResidualScale::absolute;

    void validate() const;
    /// Pade degrees that use all Borel coefficients of a series of order N.
    static BplConfig with_order(int order, double eps_res);
};

TaylorSeries generate_series(const TaylorGenerator& gen, std::span<const Complex> u0, double t0, int order);

/// Coefficient n of the result is u_{n+1} / n!; u_0 is dropped (it is added
/// back when the sum is evaluated).
TaylorSeries borel_transform(const TaylorSeries& series);

/// [num/den] Pade approximant of a scalar series. The denominator spans the
/// smallest right singular vector of the Toeplitz block; the denominator
/// degree is lowered while that block is numerically rank deficient.
RationalApproximant pade_fit(std::span<const Complex> coeffs, int num, int den);
std::vector<RationalApproximant> pade_fit(const TaylorSeries& borel, int num, int den);

/// Distance from the closest denominator root to the ray [0, inf).
double pole_guard(const RationalApproximant& p);

/// True when a pole sits within relative distance 1e-3 of some scaled node t x_k.
bool pole_near_nodes(const RationalApproximant& p, double t, const QuadratureRule& rule);

/// u0 + t sum_k w_k P(t x_k). Throws PoleOnPath when pole_near_nodes holds.
Complex laplace_eval(const RationalApproximant& p, Complex u0, double t, const QuadratureRule& rule);
/// d/dt of the value above: sum_k w_k [P(t x_k) + t x_k P'(t x_k)].
Complex laplace_derivative(const RationalApproximant& p, double t, const QuadratureRule& rule);

/// Resummed solution of one step, evaluable anywhere in the step window.
class BorelSum {
public:
    BorelSum(const TaylorSeries& series, int num, int den, QuadratureRule rule);

    double t0() const noexcept { return t0_; }
    const std::vector<RationalApproximant>& approximants() const noexcept { return fits_; }
    const ComplexVector& u0() const noexcept { return u0_; }

    /// Value at t0 + tau.
    ComplexVector value(double tau) const;
    /// Derivative at t0 + tau.
    ComplexVector derivative(double tau) const;

private:
    void check_path(double tau) const;

    double t0_;
    ComplexVector u0_;
    std::vector<RationalApproximant> fits_;
    QuadratureRule rule_;
    std::vector<ComplexVector> poles_;
};

/// ||dS/dt - F(S, t0 + tau)||_inf, optionally scaled by max(1, ||F||_inf).
double residual(const TaylorGenerator& gen, const BorelSum& sum, double tau,
                ResidualScale scale = ResidualScale::absolute);

struct BplStepResult {
    double t1 = 0.0;
    double step = 0.0;
    ComplexVector state;
    double residual_end = 0.0;  // at t1
    double residual_mid = 0.0;  // at (t0 + t1) / 2
    int trials = 0;
};

/// One BPL step from (t0, u0). The search starts at trial_step and never
/// exceeds step_cap (used to land on the final time).
BplStepResult bpl_step(const TaylorGenerator& gen, std::span<const Complex> u0, double t0, const BplConfig& cfg,
                       double trial_step, double step_cap);
BplStepResult bpl_step(const TaylorGenerator& gen, std::span<const Complex> u0, double t0, const BplConfig& cfg);

struct BplTrajectory {
    Vector times;
    std::vector<ComplexVector> states;
    Vector steps;
    Vector residuals;

    double mean_step() const;
    const ComplexVector& final_state() const { return states.back(); }
};

using BplObserver = std::function<void(double t, const ComplexVector& state, double step, double residual)>;

/// Chains bpl_step from t0 to t_final; the last step lands exactly on t_final.
/// States are stored when record is set; the observer sees every step.
BplTrajectory bpl_integrate(const TaylorGenerator& gen, ComplexVector u0, double t0, double t_final,
                            const BplConfig& cfg, bool record = true, const BplObserver& observer = {});

/// Symplecticity defect of the truncated Taylor map u -> sum_{n<=N} u_n t^n.
double series_symplectic_defect(const HamiltonianSystem& system, const PhaseState& u, int order, double t);

}  // namespace geoint
