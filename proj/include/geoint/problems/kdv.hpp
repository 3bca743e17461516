#pragma once

#include <cstddef>
#include <numbers>
#include <span>

#include "geoint/integrators.hpp"
#include "geoint/numerics.hpp"
#include "geoint/taylor.hpp"

namespace geoint {

struct KdvParams {
    int modes = 64;  // M; the state holds the 2M + 1 coefficients m = -M..M
    double period = 24.0 * std::numbers::pi;  // X
    double depth = 2.0;                       // delta
    double gravity = 10.0;
    double height = 0.5;  // soliton amplitude h
};

/// Fourier-Galerkin semi-discretization of
/// u_t + c0 u_x + beta u_xxx + (alpha / 2) (u^2)_x = 0 on a periodic interval.
/// Entry j of a state is the coefficient of exp(i m omega x) with m = j - M.
class KdvSpectral {
public:
    explicit KdvSpectral(KdvParams params = {});

    const KdvParams& params() const noexcept { return p_; }
    int modes() const noexcept { return p_.modes; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(2 * p_.modes + 1); }

    double c0() const noexcept { return c0_; }
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double omega() const noexcept { return omega_; }
    double kappa() const noexcept { return kappa_; }
    /// Soliton speed c0 (1 + h / (2 delta)).
    double speed() const noexcept { return speed_; }
    /// Time for the soliton to cross one spatial period.
    double travel_period() const noexcept { return p_.period / speed_; }

    /// h sech^2(kappa x) prolonged periodically from [-X/2, X/2].
    double initial_profile(double x) const;
    double exact(double x, double t) const;

    /// Trapezoidal Fourier coefficients of the initial profile on 2M + 1 points.
    ComplexVector initial() const;
    /// Coefficients of the translated initial data, initial()_m exp(-i m omega c t).
    ComplexVector exact_coefficients(double t) const;
    /// sqrt(X sum_m |u_m - exact_m|^2), the L2 norm over one period.
    double l2_error(std::span<const Complex> u, double t) const;

    /// Truncated product: modes outside |m| <= M are dropped.
    ComplexVector convolve(std::span<const Complex> a, std::span<const Complex> b) const;
    ComplexVector rhs(std::span<const Complex> u) const;
    /// Coefficient k + 1 of the time series from coefficients 0..k.
    ComplexVector taylor_next(std::span<const ComplexVector> coeffs) const;

    OdeField field() const;
    TaylorGenerator taylor() const;

    /// max_m |u_{-m} - conj(u_m)|.
    double conjugate_asymmetry(std::span<const Complex> u) const;

    /// Nonlinear term switch, for checking the linear dispersion relation.
    void set_alpha(double alpha) noexcept { alpha_ = alpha; }

private:
    Complex linear(int m) const noexcept;

    KdvParams p_;
    double c0_, alpha_, beta_, omega_, kappa_, speed_;
};

}  // namespace geoint
