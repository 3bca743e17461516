#include "geoint/problems/nbody.hpp"

#include <cmath>

#include "geoint/errors.hpp"
#include "geoint/integrators.hpp"

namespace geoint {

namespace {

constexpr double collision_distance = 1e-8;

void check_layout(const NBody& nb, std::span<const double> u) {
    if (nb.masses.empty()) fail(ErrorKind::validation, "n-body problem without bodies");
    if (u.size() != 4 * nb.bodies()) fail(ErrorKind::length_mismatch, "n-body state has the wrong length");
}

}  // namespace

double NBody::hamiltonian(std::span<const double> u) const {
    check_layout(*this, u);
    const std::size_t n = bodies();
    const double* q = u.data();
    const double* p = u.data() + 2 * n;
    double kinetic = 0.0, potential = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        kinetic += 0.5 * (p[2 * k] * p[2 * k] + p[2 * k + 1] * p[2 * k + 1]) / masses[k];
        for (std::size_t l = k + 1; l < n; ++l) {
            const double r = std::hypot(q[2 * l] - q[2 * k], q[2 * l + 1] - q[2 * k + 1]);
            if (r <= collision_distance) fail(ErrorKind::collision_singularity, "bodies collide");
            potential -= G * masses[k] * masses[l] / r;
        }
    }
    return kinetic + potential;
}

Vector NBody::gradient(std::span<const double> u) const {
    check_layout(*this, u);
    const std::size_t n = bodies();
    const double* q = u.data();
    const double* p = u.data() + 2 * n;
    Vector g(4 * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        g[2 * n + 2 * k] = p[2 * k] / masses[k];
        g[2 * n + 2 * k + 1] = p[2 * k + 1] / masses[k];
        for (std::size_t l = k + 1; l < n; ++l) {
            const double dx = q[2 * l] - q[2 * k];
            const double dy = q[2 * l + 1] - q[2 * k + 1];
            const double r = std::hypot(dx, dy);
            if (r <= collision_distance) fail(ErrorKind::collision_singularity, "bodies collide");
            const double c = G * masses[k] * masses[l] / (r * r * r);
            // dV/dq_k = -c (q_l - q_k), dV/dq_l = c (q_l - q_k)
            g[2 * k] -= c * dx;
            g[2 * k + 1] -= c * dy;
            g[2 * l] += c * dx;
            g[2 * l + 1] += c * dy;
        }
    }
    return g;
}

double NBody::angular_momentum(std::span<const double> u) const {
    check_layout(*this, u);
    const std::size_t n = bodies();
    double l = 0.0;
    for (std::size_t k = 0; k < n; ++k) l += u[2 * k] * u[2 * n + 2 * k + 1] - u[2 * k + 1] * u[2 * n + 2 * k];
    return l;
}

HamiltonianSystem NBody::system() const {
    HamiltonianSystem sys;
    sys.dof = 2 * bodies();
    sys.separable = true;
    const NBody self = *this;
    sys.energy = [self](std::span<const double> u) { return self.hamiltonian(u); };
    sys.gradient = [self](std::span<const double> u) { return self.gradient(u); };
    return sys;
}

NBody figure_eight_problem() { return NBody{Vector{1.0, 1.0, 1.0}, 1.0}; }

PhaseState figure_eight_initial() {
    const double x1 = 0.97000436, y1 = -0.24308753;
    const double vx3 = -0.93240737, vy3 = -0.86473146;
    return PhaseState(Vector{x1, y1, -x1, -y1, 0.0, 0.0},
                      Vector{-vx3 / 2, -vy3 / 2, -vx3 / 2, -vy3 / 2, vx3, vy3});
}

PhaseState perturbed_initial() {
    const HamiltonianSystem sys = figure_eight_problem().system();
    PhaseState u = figure_eight_initial();
    const int steps = 2000;
    const double dt = figure_eight_period / 80.0 / steps;
    PhaseState s = u;
    for (int i = 0; i < steps; ++i) s = rk4_step(sys, s, dt);
    // Body 3 occupies q[4..5] and p[4..5].
    for (std::size_t c : {4u, 5u}) {
        u.q()[c] = s.q()[c];
        u.p()[c] = s.p()[c];
    }
    return u;
}

}  // namespace geoint
