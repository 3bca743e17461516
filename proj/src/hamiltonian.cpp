#include "geoint/hamiltonian.hpp"

#include <cmath>

#include "geoint/errors.hpp"

namespace geoint {

PhaseState::PhaseState(Vector u) : u_(std::move(u)) {
    if (u_.size() % 2 != 0) fail(ErrorKind::odd_length, "phase state needs an even number of entries");
}

PhaseState::PhaseState(std::span<const double> q, std::span<const double> p) {
    if (q.size() != p.size()) fail(ErrorKind::length_mismatch, "q and p differ in length");
    u_.reserve(2 * q.size());
    u_.insert(u_.end(), q.begin(), q.end());
    u_.insert(u_.end(), p.begin(), p.end());
}

bool PhaseState::finite() const noexcept {
    for (double x : u_)
        if (!std::isfinite(x)) return false;
    return true;
}

Vector HamiltonianSystem::vector_field(std::span<const double> u) const { return apply_J(gradient(u)); }

Vector fd_gradient(const std::function<double(std::span<const double>)>& energy, std::span<const double> u) {
    const double h = default_fd_step(u);
    Vector probe(u.begin(), u.end());
    Vector g(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        probe[j] = u[j] + h;
        const double plus = energy(probe);
        probe[j] = u[j] - h;
        const double minus = energy(probe);
        probe[j] = u[j];
        if (!std::isfinite(plus) || !std::isfinite(minus))
            fail(ErrorKind::non_finite_evaluation, "energy is not finite near the probe point");
        g[j] = (plus - minus) / (2.0 * h);
    }
    return g;
}

Vector apply_J(std::span<const double> v) {
    if (v.size() % 2 != 0) fail(ErrorKind::odd_length, "apply_J needs an even-length vector");
    const std::size_t d = v.size() / 2;
    Vector out(v.size());
    for (std::size_t i = 0; i < d; ++i) {
        out[i] = v[d + i];
        out[d + i] = -v[i];
    }
    return out;
}

double pairing(std::span<const double> v, std::span<const double> w) {
    if (v.size() != w.size()) fail(ErrorKind::length_mismatch, "pairing of vectors with different lengths");
    if (v.size() % 2 != 0) fail(ErrorKind::odd_length, "pairing needs even-length vectors");
    const std::size_t d = v.size() / 2;
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += v[i] * w[d + i] - v[d + i] * w[i];
    return s;
}

double map_symplecticity_defect(const VectorFunction& map, std::span<const double> u) {
    const Matrix jac = fd_jacobian(map, u);
    const std::size_t n = jac.cols();
    if (n % 2 != 0) fail(ErrorKind::odd_length, "symplecticity needs an even dimension");
    // (grad phi)^T J (grad phi): entry (i, j) = pairing(column i, column j).
    double s = 0.0;
    const std::size_t d = n / 2;
    for (std::size_t i = 0; i < n; ++i) {
        const Vector ci = jac.column(i);
        for (std::size_t j = 0; j < n; ++j) {
            double target = 0.0;
            if (i < d && j == i + d) target = 1.0;
            if (i >= d && j + d == i) target = -1.0;
            const double diff = pairing(ci, jac.column(j)) - target;
            s += diff * diff;
        }
    }
    return std::sqrt(s);
}

double symplecticity_defect(const OneStepMap& stepper, const PhaseState& u, double dt) {
    if (dt == 0.0) return 0.0;
    const VectorFunction map = [&](std::span<const double> x) {
        return stepper(PhaseState(Vector(x.begin(), x.end())), dt).values();
    };
    return map_symplecticity_defect(map, u.values());
}

double symplecticity_defect(const HamiltonianSystem& system, const OneStepMap& stepper, const PhaseState& u,
                            double dt) {
    if (u.dof() != system.dof) fail(ErrorKind::length_mismatch, "state does not match the system dimension");
    return symplecticity_defect(stepper, u, dt);
}

Vector hamiltonian_drift(std::span<const PhaseState> trajectory, const HamiltonianSystem& system) {
    if (trajectory.empty()) fail(ErrorKind::validation, "empty trajectory");
    Vector energies;
    energies.reserve(trajectory.size());
    for (const PhaseState& s : trajectory) energies.push_back(system.energy(s.values()));
    return relative_drift(energies);
}

Vector relative_drift(std::span<const double> values) {
    if (values.empty()) fail(ErrorKind::validation, "empty series");
    const double ref = values.front();
    if (ref == 0.0) fail(ErrorKind::zero_initial_energy, "reference value is zero");
    Vector out;
    out.reserve(values.size());
    for (double v : values) out.push_back(std::abs(v - ref) / std::abs(ref));
    return out;
}

}  // namespace geoint
