#pragma once

#include <utility>

#include "geoint/dirac.hpp"

namespace geoint {

/// Planar double pendulum in Cartesian coordinates q = (x1, y1, x2, y2) with
/// y pointing up, U = g (m1 y1 + m2 y2) and constraints
/// |q1|^2 - l1^2 = 0, |q2 - q1|^2 - l2^2 = 0.
struct DoublePendulum {
    double m1 = 1.0;
    double m2 = 1.0;
    double l1 = 1.0;
    double l2 = 1.0;
    double g = 9.81;

    ConstrainedSystem system() const;
    /// Rest state at the given angles from the downward vertical.
    DiracState state_from_angles(double theta1, double theta2) const;
    /// Angles of each rod from the downward vertical.
    std::pair<double, double> angles(const Vector& q) const;
};

/// Both rods horizontal, at rest.
DiracState double_pendulum_initial(const DoublePendulum& dp = {});

/// Single pendulum of length 1 (d = 2, m = 1), the same conventions.
ConstrainedSystem simple_pendulum(double g = 9.81);

/// Free particle with the given mass matrix and no potential or constraints.
ConstrainedSystem free_particle(const Matrix& mass);

}  // namespace geoint
