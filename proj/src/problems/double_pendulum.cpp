#include "geoint/problems/double_pendulum.hpp"

#include <cmath>
#include <numbers>

#include "geoint/errors.hpp"

namespace geoint {

ConstrainedSystem DoublePendulum::system() const {
    const DoublePendulum dp = *this;
    ConstrainedSystem sys;
    sys.dim = 4;
    sys.constraints = 2;
    sys.mass = Matrix::diagonal(Vector{m1, m1, m2, m2});
    sys.potential = [dp](std::span<const double> q) { return dp.g * (dp.m1 * q[1] + dp.m2 * q[3]); };
    sys.grad_potential = [dp](std::span<const double>) { return Vector{0.0, dp.g * dp.m1, 0.0, dp.g * dp.m2}; };
    sys.constraint_values = [dp](std::span<const double> q) {
        const double dx = q[2] - q[0], dy = q[3] - q[1];
        return Vector{q[0] * q[0] + q[1] * q[1] - dp.l1 * dp.l1, dx * dx + dy * dy - dp.l2 * dp.l2};
    };
    sys.constraint_jacobian = [](std::span<const double> q) {
        const double dx = q[2] - q[0], dy = q[3] - q[1];
        return Matrix{{2 * q[0], 2 * q[1], 0, 0}, {-2 * dx, -2 * dy, 2 * dx, 2 * dy}};
    };
    sys.constraint_hessian_vector = [](std::span<const double>, std::span<const double> v, std::size_t a) {
        if (a == 0) return Vector{2 * v[0], 2 * v[1], 0, 0};
        const double dx = v[2] - v[0], dy = v[3] - v[1];
        return Vector{-2 * dx, -2 * dy, 2 * dx, 2 * dy};
    };
    return sys;
}

DiracState DoublePendulum::state_from_angles(double theta1, double theta2) const {
    DiracState st;
    const double x1 = l1 * std::sin(theta1), y1 = -l1 * std::cos(theta1);
    st.q = {x1, y1, x1 + l2 * std::sin(theta2), y1 - l2 * std::cos(theta2)};
    st.p = {0.0, 0.0, 0.0, 0.0};
    st.lambda = {0.0, 0.0};
    return st;
}

std::pair<double, double> DoublePendulum::angles(const Vector& q) const {
    if (q.size() != 4) fail(ErrorKind::length_mismatch, "double pendulum configuration has four entries");
    return {std::atan2(q[0], -q[1]), std::atan2(q[2] - q[0], -(q[3] - q[1]))};
}

DiracState double_pendulum_initial(const DoublePendulum& dp) {
    return dp.state_from_angles(0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
}

ConstrainedSystem simple_pendulum(double g) {
    ConstrainedSystem sys;
    sys.dim = 2;
    sys.constraints = 1;
    sys.mass = Matrix::identity(2);
    sys.potential = [g](std::span<const double> q) { return g * q[1]; };
    sys.grad_potential = [g](std::span<const double>) { return Vector{0.0, g}; };
    sys.constraint_values = [](std::span<const double> q) { return Vector{q[0] * q[0] + q[1] * q[1] - 1.0}; };
    sys.constraint_jacobian = [](std::span<const double> q) { return Matrix{{2 * q[0], 2 * q[1]}}; };
    sys.constraint_hessian_vector = [](std::span<const double>, std::span<const double> v, std::size_t) {
        return Vector{2 * v[0], 2 * v[1]};
    };
    return sys;
}

ConstrainedSystem free_particle(const Matrix& mass) {
    ConstrainedSystem sys;
    sys.dim = mass.rows();
    sys.constraints = 0;
    sys.mass = mass;
    const std::size_t d = mass.rows();
    sys.potential = [](std::span<const double>) { return 0.0; };
    sys.grad_potential = [d](std::span<const double>) { return Vector(d, 0.0); };
    return sys;
}

}  // namespace geoint
