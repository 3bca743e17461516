#include <cmath>
#include <numbers>

#include "doctest.h"
#include "geoint/dirac.hpp"
#include "geoint/errors.hpp"
#include "geoint/hamiltonian.hpp"
#include "geoint/problems/double_pendulum.hpp"

using namespace geoint;

namespace {

double trend_slope(const Vector& t, const Vector& y) {
    double mt = 0.0, my = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        mt += t[i];
        my += y[i];
    }
    mt /= static_cast<double>(t.size());
    my /= static_cast<double>(t.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        num += (t[i] - mt) * (y[i] - my);
        den += (t[i] - mt) * (t[i] - mt);
    }
    return num / den;
}

DiracState pendulum_state(double x, double y) {
    DiracState st;
    st.q = {x, y};
    st.p = {0.0, 0.0};
    st.lambda = {0.0};
    return st;
}

double angle_distance(double a, double b) {
    return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi));
}

}  // namespace

TEST_CASE("free particle: Dirac-1 is a drift with constant momentum") {
    const ConstrainedSystem sys = free_particle(Matrix{{2.0, 0.0}, {0.0, 4.0}});
    DiracState st;
    st.q = {1.0, -1.0};
    st.p = {2.0, 2.0};
    const DiracState next = dirac1_step(sys, st, 0.1);
    CHECK(next.q[0] == doctest::Approx(1.1).epsilon(1e-14));
    CHECK(next.q[1] == doctest::Approx(-0.95).epsilon(1e-14));
    CHECK(next.p[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(next.p[1] == doctest::Approx(2.0).epsilon(1e-14));
    REQUIRE(next.previous_q);
    CHECK(*next.previous_q == st.q);
}

TEST_CASE("free particle: Dirac-2 keeps uniform motion") {
    const ConstrainedSystem sys = free_particle(Matrix::identity(2));
    DiracState st;
    st.q = {0.0, 0.0};
    st.p = {1.0, -0.5};
    const double dt = 0.05;
    st = dirac1_step(sys, st, dt);
    for (int n = 1; n < 40; ++n) st = dirac2_step(sys, st, dt);
    CHECK(st.q[0] == doctest::Approx(40 * dt).epsilon(1e-12));
    CHECK(st.q[1] == doctest::Approx(-0.5 * 40 * dt).epsilon(1e-12));
    CHECK(st.p[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Dirac-2 without history is refused") {
    const ConstrainedSystem sys = simple_pendulum();
    try {
        (void)dirac2_step(sys, pendulum_state(0.0, -1.0), 1e-3);
        FAIL("expected MissingHistory");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::missing_history);
    }
}

TEST_CASE("degenerate constraint gradient is reported") {
    const ConstrainedSystem sys = simple_pendulum();
    try {
        (void)dirac1_step(sys, pendulum_state(0.0, 0.0), 1e-3);
        FAIL("expected RankDeficientConstraints");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::rank_deficient_constraints);
    }
}

TEST_CASE("velocity constraint holds after each step") {
    const ConstrainedSystem sys = simple_pendulum();
    const double dt = 1e-2;
    for (const DiscreteForm form : {DiscreteForm::tangent, DiscreteForm::midpoint}) {
        DiracOptions opts;
        opts.form = form;
        DiracState st = pendulum_state(std::sin(0.3), -std::cos(0.3));
        for (int n = 0; n < 50; ++n) {
            const DiracState next = dirac1_step(sys, st, dt, opts);
            Vector v(2);
            for (std::size_t i = 0; i < 2; ++i) v[i] = (next.q[i] - st.q[i]) / dt;
            CHECK(velocity_constraint_residual(sys, st.q, next.q, v, form) <= 1e-10);
            st = next;
        }
        const DiracState bottom = dirac1_step(sys, pendulum_state(0.0, -1.0), dt, opts);
        const Vector rest{0.0, -1.0};
        const Vector v{(bottom.q[0] - rest[0]) / dt, (bottom.q[1] - rest[1]) / dt};
        CHECK(velocity_constraint_residual(sys, rest, bottom.q, v, form) <= 1e-12);
        CHECK(bottom.q[0] == doctest::Approx(0.0));
    }
}

TEST_CASE("constraint residual evaluation") {
    const ConstrainedSystem sys = simple_pendulum();
    CHECK(constraint_residual(sys, pendulum_state(0.0, -1.0)) <= 1e-10);
    CHECK(constraint_residual(sys, pendulum_state(0.0, -1.001)) == doctest::Approx(2.001e-3).epsilon(1e-9));
    const DoublePendulum dp;
    CHECK(constraint_residual(dp.system(), double_pendulum_initial(dp)) <= 1e-10);
}

TEST_CASE("unconstrained Dirac-1 is symplectic") {
    ConstrainedSystem sys = free_particle(Matrix{{2.0}});
    sys.potential = [](std::span<const double> q) { return 0.5 * q[0] * q[0] + 0.25 * std::pow(q[0], 4); };
    sys.grad_potential = [](std::span<const double> q) { return Vector{q[0] + q[0] * q[0] * q[0]}; };
    const OneStepMap step = [&](const PhaseState& u, double dt) {
        DiracState st;
        st.q = {u[0]};
        st.p = {u[1]};
        const DiracState next = dirac1_step(sys, st, dt);
        return PhaseState(next.q, next.p);
    };
    CHECK(symplecticity_defect(step, PhaseState(Vector{0.7, -0.3}), 0.1) <= 1e-6);
    CHECK(symplecticity_defect(step, PhaseState(Vector{-1.2, 0.9}), 0.05) <= 1e-6);
}

TEST_CASE("double pendulum: constraints stay bounded, the Euler control drifts") {
    const DoublePendulum dp;
    const ConstrainedSystem sys = dp.system();
    const double dt = 1e-4;
    const int steps = 100000;
    DiracState d = double_pendulum_initial(dp);
    DiracState e = d;
    Vector t, rd, re;
    double worst = 0.0;
    for (int n = 1; n <= steps; ++n) {
        d = dirac1_step(sys, d, dt);
        e = euler_constrained_control(sys, e, dt);
        worst = std::max(worst, constraint_residual(sys, d));
        if (n % 100 == 0) {
            t.push_back(n * dt);
            rd.push_back(constraint_residual(sys, d));
            re.push_back(constraint_residual(sys, e));
        }
    }
    CHECK(worst <= 1e-5);
    CHECK(std::abs(trend_slope(t, rd)) <= 1e-8);
    CHECK(trend_slope(t, re) > 0.0);
    CHECK(re.back() >= 100.0 * rd.back());
}

TEST_CASE("Euler control") {
    const ConstrainedSystem free = free_particle(Matrix::identity(2));
    DiracState st;
    st.q = {0.5, 0.5};
    st.p = {1.0, 2.0};
    const DiracState a = euler_constrained_control(free, st, 0.1);
    const DiracState b = dirac1_step(free, st, 0.1);
    CHECK(a.q[0] == doctest::Approx(b.q[0]).epsilon(1e-14));
    CHECK(a.q[1] == doctest::Approx(b.q[1]).epsilon(1e-14));
    CHECK(a.p == b.p);

    const ConstrainedSystem pend = simple_pendulum();
    const DiracState s0 = pendulum_state(std::sin(1.0), -std::cos(1.0));
    const DiracState same = euler_constrained_control(pend, s0, 0.0);
    CHECK(same.q == s0.q);
    CHECK(same.p == s0.p);

    DiracState d = s0, e = s0;
    for (int n = 0; n < 10000; ++n) {
        d = dirac1_step(pend, d, 1e-3);
        e = euler_constrained_control(pend, e, 1e-3);
    }
    CHECK(constraint_residual(pend, e) >= 100.0 * constraint_residual(pend, d));
}

TEST_CASE("Dirac-2 follows the Euler control while the two agree") {
    const DoublePendulum dp;
    const ConstrainedSystem sys = dp.system();
    const double dt = 1e-4;
    DiracState d = dirac1_step(sys, double_pendulum_initial(dp), dt);
    DiracState e = euler_constrained_control(sys, double_pendulum_initial(dp), dt);
    double worst = 0.0;
    for (int n = 1; n < 20000; ++n) {
        d = dirac2_step(sys, d, dt);
        e = euler_constrained_control(sys, e, dt);
        const auto [d1, d2] = dp.angles(d.q);
        const auto [e1, e2] = dp.angles(e.q);
        worst = std::max({worst, angle_distance(d1, e1), angle_distance(d2, e2)});
    }
    CHECK(worst <= 1e-2);
}

TEST_CASE("Dirac-2 energy stays below its initial value over horizon 100") {
    const DoublePendulum dp;
    const ConstrainedSystem sys = dp.system();
    const double dt = 1e-4;
    const int steps = 1000000;
    DiracState d = double_pendulum_initial(dp);
    const double e0 = sys.energy(d.q, d.p);
    d = dirac1_step(sys, d, dt);
    double highest = sys.energy(d.q, d.p);
    for (int n = 1; n < steps; ++n) {
        d = dirac2_step(sys, d, dt);
        highest = std::max(highest, sys.energy(d.q, d.p));
    }
    CHECK(std::isfinite(highest));
    CHECK(highest <= e0 + 1e-9);
    // Kinetic energy at the bottom of the swing is 4 g; the loss must stay a fraction of it.
    CHECK(e0 - sys.energy(d.q, d.p) <= 0.25 * 4.0 * dp.g);
}
