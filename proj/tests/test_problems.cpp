#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "geoint/errors.hpp"
#include "geoint/hamiltonian.hpp"
#include "geoint/integrators.hpp"
#include "geoint/problems/duffing.hpp"
#include "geoint/problems/kdv.hpp"
#include "geoint/problems/nbody.hpp"
#include "geoint/problems/toda.hpp"

using namespace geoint;

namespace {

double relative_gradient_error(const HamiltonianSystem& sys, std::span<const double> u) {
    const Vector exact = sys.gradient(u);
    const Vector fd = fd_gradient(sys.energy, u);
    double err = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) err = std::max(err, std::abs(exact[i] - fd[i]));
    return err / std::max(1.0, inf_norm(exact));
}

ComplexVector to_complex(std::span<const double> v) { return ComplexVector(v.begin(), v.end()); }

Vector real_part(std::span<const Complex> v) {
    Vector out;
    for (const Complex& c : v) out.push_back(c.real());
    return out;
}

}  // namespace

TEST_CASE("Toda Hamiltonian and gradient") {
    const PhaseState u0 = toda_initial();
    CHECK(toda_hamiltonian(u0.values()) ==
          doctest::Approx(1.75 + std::exp(-2.0) + std::exp(-1.0) + std::exp(3.0)).epsilon(1e-15));
    CHECK(toda_hamiltonian(u0.values()) == doctest::Approx(22.3387).epsilon(1e-5));

    const Vector rest{0.4, 0.4, 0.4, 0.0, 0.0, 0.0};
    CHECK(inf_norm(toda_grad(rest)) <= 1e-15);

    const HamiltonianSystem sys = toda_system(3);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int k = 0; k < 100; ++k) {
        Vector u(6);
        for (double& x : u) x = dist(rng);
        CHECK(relative_gradient_error(sys, u) <= 1e-6);
    }
}

TEST_CASE("Lax matrix") {
    const PhaseState u0 = toda_initial();
    const Matrix l = lax_matrix(u0.values());
    double trace = 0.0;
    for (std::size_t i = 0; i < 3; ++i) trace += l(i, i);
    CHECK(trace == doctest::Approx(-0.5 * (0.5 - 1.5 + 1.0)));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(l(i, j) == l(j, i));

    const Vector ev = lax_eigenvalues(Vector{0.2, 0.2, 0.2, 0.0, 0.0, 0.0});
    CHECK(ev[0] == doctest::Approx(-0.5));
    CHECK(ev[1] == doctest::Approx(-0.5));
    CHECK(ev[2] == doctest::Approx(1.0));

    const HamiltonianSystem sys = toda_system(3);
    const Vector e0 = lax_eigenvalues(u0.values());
    PhaseState u = u0;
    double drift = 0.0;
    for (int n = 0; n < 10000; ++n) {
        u = rk4_step(sys, u, 1e-3);
        const Vector e = lax_eigenvalues(u.values());
        for (std::size_t i = 0; i < 3; ++i) drift = std::max(drift, std::abs(e[i] - e0[i]));
    }
    CHECK(drift <= 1e-6);
}

TEST_CASE("n-body evaluation") {
    NBody two;
    two.masses = {2.0, 3.0};
    two.G = 1.5;
    const Vector at_rest{0.0, 0.0, 4.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    CHECK(two.hamiltonian(at_rest) == doctest::Approx(-1.5 * 2.0 * 3.0 / 4.0));

    const NBody eight = figure_eight_problem();
    const HamiltonianSystem sys = eight.system();
    const PhaseState u0 = figure_eight_initial();
    CHECK(relative_gradient_error(sys, u0.values()) <= 1e-7);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        Vector u = u0.values();
        for (double& x : u) x += 0.2 * dist(rng);
        CHECK(relative_gradient_error(sys, u) <= 1e-6);
    }

    const Vector collided{1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0};
    try {
        (void)two.gradient(collided);
        FAIL("expected CollisionSingularity");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::collision_singularity);
    }
}

TEST_CASE("figure-eight data") {
    const PhaseState u0 = figure_eight_initial();
    double px = 0.0, py = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        cx += u0.q()[2 * k];
        cy += u0.q()[2 * k + 1];
        px += u0.p()[2 * k];
        py += u0.p()[2 * k + 1];
    }
    CHECK(std::abs(px) <= 1e-12);
    CHECK(std::abs(py) <= 1e-12);
    CHECK(std::abs(cx) <= 1e-12);
    CHECK(std::abs(cy) <= 1e-12);

    const HamiltonianSystem sys = figure_eight_problem().system();
    const int steps = 100000;
    const double dt = figure_eight_period / steps;
    PhaseState u = u0;
    for (int n = 0; n < steps; ++n) u = rk4_step(sys, u, dt);
    double gap = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) gap = std::max(gap, std::abs(u[i] - u0[i]));
    CHECK(gap <= 1e-6);

    const PhaseState moved = perturbed_initial();
    for (std::size_t i : {0u, 1u, 2u, 3u}) {
        CHECK(moved.q()[i] == u0.q()[i]);
        CHECK(moved.p()[i] == u0.p()[i]);
    }
    for (std::size_t i : {4u, 5u}) {
        CHECK(moved.q()[i] != u0.q()[i]);
        CHECK(moved.p()[i] != u0.p()[i]);
    }
}

TEST_CASE("Duffing first integrals") {
    CHECK(duffing_I1(Vector{1.0, 0.0}, 0.0) == doctest::Approx(11.0 / 18.0));
    CHECK(duffing_H2(Vector{1.0, 0.0}) == doctest::Approx(0.75));

    const DuffingProblem c1 = DuffingProblem::case1();
    const Vector u{0.7, -0.4};
    const double t = 1.3;
    const ComplexVector f = c1.rhs(to_complex(u), t);
    const double h = 1e-5;
    const Vector plus{u[0] + h * f[0].real(), u[1] + h * f[1].real()};
    const Vector minus{u[0] - h * f[0].real(), u[1] - h * f[1].real()};
    const double rate = (duffing_I1(plus, t + h) - duffing_I1(minus, t - h)) / (2.0 * h);
    CHECK(std::abs(rate) <= 1e-8);

    const DuffingProblem c2 = DuffingProblem::case2();
    for (const DuffingProblem* d : {&c1, &c2}) {
        const OdeField field = d->field();
        ComplexVector s{1.0, 0.0};
        const double i1_0 = duffing_I1(real_part(s), 0.0);
        const double h2_0 = duffing_H2(real_part(s));
        double worst = 0.0;
        const double dt = 1e-4;
        for (int n = 1; n <= 100000; ++n) {
            s = rk4_ode_step(field, s, (n - 1) * dt, dt);
            const double err = d == &c1 ? std::abs(duffing_I1(real_part(s), n * dt) - i1_0) / i1_0
                                        : std::abs(duffing_H2(real_part(s)) - h2_0) / h2_0;
            worst = std::max(worst, err);
        }
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("Duffing series start with the field, forcing included") {
    const DuffingProblem forced = DuffingProblem::forced(0.5);
    const TaylorGenerator gen = forced.taylor();
    const ComplexVector u0{0.3, -0.8};
    const double t0 = 2.1;
    std::vector<ComplexVector> coeffs{u0};
    coeffs.push_back(gen.next(coeffs, t0));
    const ComplexVector f = forced.rhs(u0, t0);
    CHECK(std::abs(coeffs[1][0] - f[0]) <= 1e-14);
    CHECK(std::abs(coeffs[1][1] - f[1]) <= 1e-14);

    // Second coefficient is F' / 2 along the solution.
    coeffs.push_back(gen.next(coeffs, t0));
    const double h = 1e-5;
    ComplexVector ahead(2), behind(2);
    for (std::size_t i = 0; i < 2; ++i) {
        ahead[i] = u0[i] + h * f[i];
        behind[i] = u0[i] - h * f[i];
    }
    const ComplexVector fa = forced.rhs(ahead, t0 + h);
    const ComplexVector fb = forced.rhs(behind, t0 - h);
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(coeffs[2][i] - (fa[i] - fb[i]) / (4.0 * h)) <= 1e-8);

    const OdeField field = forced.field();
    ComplexVector s{1.0, 0.0};
    double peak = 0.0;
    for (int n = 0; n < 20000; ++n) {
        s = rk4_ode_step(field, s, n * 0.01, 0.01);
        peak = std::max(peak, inf_norm(s));
    }
    CHECK(std::isfinite(peak));
    CHECK(peak <= 10.0);
}

TEST_CASE("KdV constants") {
    const KdvSpectral kdv;
    CHECK(kdv.c0() == doctest::Approx(std::sqrt(20.0)));
    CHECK(kdv.speed() == doctest::Approx(5.03115).epsilon(1e-5));
    CHECK(kdv.travel_period() == doctest::Approx(14.986).epsilon(1e-4));
    CHECK(kdv.kappa() == doctest::Approx(0.21651).epsilon(1e-4));
    CHECK(kdv.alpha() == doctest::Approx(1.5 * std::sqrt(5.0)));
    CHECK(kdv.beta() == doctest::Approx(4.0 * std::sqrt(20.0) / 6.0));
    CHECK(kdv.omega() == doctest::Approx(2.0 * std::numbers::pi / (24.0 * std::numbers::pi)));
}

TEST_CASE("KdV Taylor recurrence") {
    KdvParams params;
    params.modes = 8;
    KdvSpectral kdv(params);
    const std::size_t n = kdv.size();
    const std::size_t mid = static_cast<std::size_t>(params.modes);

    std::vector<ComplexVector> zero{ComplexVector(n, 0.0)};
    CHECK(inf_norm(kdv.taylor_next(zero)) == 0.0);

    kdv.set_alpha(0.0);
    const double eps = 1e-3;
    std::vector<ComplexVector> single{ComplexVector(n, 0.0)};
    single[0][mid + 1] = eps;
    single[0][mid - 1] = eps;
    const Complex rate(0.0, -kdv.c0() * kdv.omega() + kdv.beta() * std::pow(kdv.omega(), 3));
    Complex expected = eps;
    for (int k = 1; k <= 6; ++k) {
        single.push_back(kdv.taylor_next(single));
        expected *= rate / static_cast<double>(k);
        CHECK(std::abs(single.back()[mid + 1] - expected) <= 1e-15);
        CHECK(std::abs(single.back()[mid - 1] - std::conj(expected)) <= 1e-15);
    }

    const KdvSpectral full(params);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> dist;
    ComplexVector u(n);
    u[mid] = dist(rng);
    for (std::size_t m = 1; m <= mid; ++m) {
        u[mid + m] = Complex(dist(rng), dist(rng));
        u[mid - m] = std::conj(u[mid + m]);
    }
    std::vector<ComplexVector> coeffs{u};
    for (int k = 0; k < 10; ++k) {
        coeffs.push_back(full.taylor_next(coeffs));
        CHECK(full.conjugate_asymmetry(coeffs.back()) <= 1e-12 * std::max(1.0, inf_norm(coeffs.back())));
    }
}

TEST_CASE("KdV initial data and error") {
    const KdvSpectral kdv;
    const ComplexVector u0 = kdv.initial();
    CHECK(u0.size() == 129);
    CHECK(kdv.conjugate_asymmetry(u0) <= 1e-12);
    CHECK(kdv.l2_error(kdv.exact_coefficients(3.0), 3.0) <= 1e-12);
    CHECK(kdv.exact(0.0, 0.0) == doctest::Approx(0.5));
    CHECK(kdv.exact(kdv.speed() * 2.0, 2.0) == doctest::Approx(0.5));

    const OdeField field = kdv.field();
    const double t_final = kdv.travel_period() / 10.0;
    const int steps = 2000;
    const double dt = t_final / steps;
    ComplexVector u = u0;
    for (int n = 0; n < steps; ++n) u = rk4_ode_step(field, u, n * dt, dt);
    CHECK(kdv.l2_error(u, t_final) <= 1e-5);
    CHECK(kdv.conjugate_asymmetry(u) <= 1e-12);
}
