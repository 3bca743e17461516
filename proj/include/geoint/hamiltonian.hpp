#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "geoint/numerics.hpp"
#include "geoint/taylor.hpp"

namespace geoint {

/// Canonical coordinates u = (q_1..q_d, p_1..p_d).
class PhaseState {
public:
    PhaseState() = default;
    explicit PhaseState(Vector u);
    PhaseState(std::span<const double> q, std::span<const double> p);

    std::size_t dof() const noexcept { return u_.size() / 2; }
    std::span<const double> q() const noexcept { return {u_.data(), dof()}; }
    std::span<const double> p() const noexcept { return {u_.data() + dof(), dof()}; }
    std::span<double> q() noexcept { return {u_.data(), dof()}; }
    std::span<double> p() noexcept { return {u_.data() + dof(), dof()}; }

    const Vector& values() const noexcept { return u_; }
    Vector& values() noexcept { return u_; }
    std::size_t size() const noexcept { return u_.size(); }
    double operator[](std::size_t i) const { return u_[i]; }
    double& operator[](std::size_t i) { return u_[i]; }

    bool finite() const noexcept;

    friend bool operator==(const PhaseState&, const PhaseState&) = default;

private:
    Vector u_;
};

/// Autonomous Hamiltonian H(q, p) with its analytic gradient (dH/dq, dH/dp).
struct HamiltonianSystem {
    std::size_t dof = 0;
    std::function<double(std::span<const double>)> energy;
    std::function<Vector(std::span<const double>)> gradient;
    /// H = T(p) + V(q): dH/dq depends on q only and dH/dp on p only.
    bool separable = false;
    /// Taylor recurrence of u' = J grad H, when the problem provides one.
    std::optional<TaylorGenerator> taylor;

    /// J grad H(u).
    Vector vector_field(std::span<const double> u) const;
};

/// Gradient by central differences; a fallback for systems without a closed form.
Vector fd_gradient(const std::function<double(std::span<const double>)>& energy, std::span<const double> u);

/// J v = (v_p, -v_q).
Vector apply_J(std::span<const double> v);

/// v^T J w = sum_i (v_qi w_pi - v_pi w_qi).
double pairing(std::span<const double> v, std::span<const double> w);

using OneStepMap = std::function<PhaseState(const PhaseState&, double dt)>;

/// || (grad phi)^T J (grad phi) - J ||_F with grad phi the central-difference
/// Jacobian of the one-step map at u.
double symplecticity_defect(const OneStepMap& stepper, const PhaseState& u, double dt);
double symplecticity_defect(const HamiltonianSystem& system, const OneStepMap& stepper, const PhaseState& u,
                            double dt);

/// Same defect for an arbitrary map u -> phi(u) (Jacobian taken numerically).
double map_symplecticity_defect(const VectorFunction& map, std::span<const double> u);

/// |H(u^n) - H(u^0)| / |H(u^0)| for every sample.
Vector hamiltonian_drift(std::span<const PhaseState> trajectory, const HamiltonianSystem& system);

/// Relative error series of any scalar first integral against its first value.
Vector relative_drift(std::span<const double> values);

}  // namespace geoint
