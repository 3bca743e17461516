#include "geoint/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "geoint/errors.hpp"

namespace geoint {

namespace {

void require_finite(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) fail(ErrorKind::non_finite_evaluation, what);
}

void require_finite(std::span<const Complex> v, const char* what) {
    for (const Complex& x : v)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) fail(ErrorKind::non_finite_evaluation, what);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

struct ImplicitSolution {
    Vector x;
    int iterations = 0;
    double residual = 0.0;
};

// x = g(x): fixed-point iteration, then Newton on x - g(x) with a
// finite-difference Jacobian if the iteration stalls or diverges.
ImplicitSolution solve_implicit(const VectorFunction& g, Vector x, double tol, const StageSolverOptions& opts) {
    int iterations = 0;
    for (int it = 0; it < opts.max_fixed_point; ++it) {
        Vector next = g(x);
        ++iterations;
        bool finite = true;
        for (double v : next) finite = finite && std::isfinite(v);
        if (!finite) break;
        const double change = max_abs_diff(next, x);
        x = std::move(next);
        if (change <= tol) return {std::move(x), iterations, change};
    }

    for (int it = 0; it < opts.max_newton; ++it) {
        const Vector gx = g(x);
        Vector residual(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) residual[i] = x[i] - gx[i];
        require_finite(residual, "non-finite stage residual");
        const double rnorm = inf_norm(residual);
        if (rnorm <= tol) return {std::move(x), iterations, rnorm};
        Matrix jac = fd_jacobian(g, x);
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = 0; j < x.size(); ++j) jac(i, j) = (i == j ? 1.0 : 0.0) - jac(i, j);
        Vector delta;
        try {
            delta = solve_dense(std::move(jac), residual);
        } catch (const Error&) {
            fail(ErrorKind::stage_solve_failure, "singular Newton matrix in stage solve");
        }
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= delta[i];
        ++iterations;
        if (inf_norm(delta) <= tol) {
            const Vector g2 = g(x);
            return {std::move(x), iterations, max_abs_diff(x, g2)};
        }
    }
    fail(ErrorKind::stage_solve_failure, "implicit stage equations did not converge");
}

double solver_scale(std::span<const double> u) { return std::max(1.0, inf_norm(u)); }

}  // namespace

PhaseState explicit_euler_step(const HamiltonianSystem& system, const PhaseState& u, double dt) {
    const Vector f = system.vector_field(u.values());
    require_finite(f, "vector field is not finite");
    Vector next = u.values();
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += dt * f[i];
    return PhaseState(std::move(next));
}

StepReport implicit_euler_step(const HamiltonianSystem& system, const PhaseState& u, double dt,
                               const StageSolverOptions& opts) {
    if (dt == 0.0) return {u, 0, 0.0};
    const Vector& u0 = u.values();
    const VectorFunction g = [&](std::span<const double> x) {
        Vector out = system.vector_field(x);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = u0[i] + dt * out[i];
        return out;
    };
    ImplicitSolution sol = solve_implicit(g, explicit_euler_step(system, u, dt).values(),
                                          opts.tolerance * solver_scale(u0), opts);
    return {PhaseState(std::move(sol.x)), sol.iterations, sol.residual};
}

StepReport symplectic_euler_step(const HamiltonianSystem& system, const PhaseState& u, double dt,
                                 EulerVariant variant, const StageSolverOptions& opts) {
    if (dt == 0.0) return {u, 0, 0.0};
    const std::size_t d = u.dof();
    const Vector q0(u.q().begin(), u.q().end());
    const Vector p0(u.p().begin(), u.p().end());
    Vector work(2 * d);
    auto grad_at = [&](std::span<const double> q, std::span<const double> p) {
        std::copy(q.begin(), q.end(), work.begin());
        std::copy(p.begin(), p.end(), work.begin() + static_cast<std::ptrdiff_t>(d));
        Vector g = system.gradient(work);
        require_finite(g, "gradient is not finite");
        return g;
    };

    const double tol = opts.tolerance * solver_scale(u.values());
    Vector q1(d), p1(d);
    int iterations = 0;
    double residual = 0.0;
    if (variant == EulerVariant::a) {
        const VectorFunction g = [&](std::span<const double> p) {
            const Vector grad = grad_at(q0, p);
            Vector out(d);
            for (std::size_t i = 0; i < d; ++i) out[i] = p0[i] - dt * grad[i];
            return out;
        };
        if (system.separable) {
            p1 = g(p0);
        } else {
            ImplicitSolution sol = solve_implicit(g, p0, tol, opts);
            p1 = std::move(sol.x);
            iterations = sol.iterations;
            residual = sol.residual;
        }
        const Vector grad = grad_at(q0, p1);
        for (std::size_t i = 0; i < d; ++i) q1[i] = q0[i] + dt * grad[d + i];
    } else {
        const VectorFunction g = [&](std::span<const double> q) {
            const Vector grad = grad_at(q, p0);
            Vector out(d);
            for (std::size_t i = 0; i < d; ++i) out[i] = q0[i] + dt * grad[d + i];
            return out;
        };
        if (system.separable) {
            q1 = g(q0);
        } else {
            ImplicitSolution sol = solve_implicit(g, q0, tol, opts);
            q1 = std::move(sol.x);
            iterations = sol.iterations;
            residual = sol.residual;
        }
        const Vector grad = grad_at(q1, p0);
        for (std::size_t i = 0; i < d; ++i) p1[i] = p0[i] - dt * grad[i];
    }
    return {PhaseState(q1, p1), iterations, residual};
}

StepReport stormer_verlet_step(const HamiltonianSystem& system, const PhaseState& u, double dt,
                               const StageSolverOptions& opts) {
    StepReport first = symplectic_euler_step(system, u, 0.5 * dt, EulerVariant::a, opts);
    StepReport second = symplectic_euler_step(system, first.state, 0.5 * dt, EulerVariant::b, opts);
    second.iterations += first.iterations;
    second.residual = std::max(first.residual, second.residual);
    return second;
}

PhaseState rk4_step(const HamiltonianSystem& system, const PhaseState& u, double dt) {
    const Vector& u0 = u.values();
    const std::size_t n = u0.size();
    Vector tmp(n);
    auto stage = [&](const Vector& k, double c) {
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u0[i] + c * dt * k[i];
        return system.vector_field(tmp);
    };
    const Vector f1 = system.vector_field(u0);
    const Vector f2 = stage(f1, 0.5);
    const Vector f3 = stage(f2, 0.5);
    const Vector f4 = stage(f3, 1.0);
    Vector next(n);
    for (std::size_t i = 0; i < n; ++i) next[i] = u0[i] + dt * (f1[i] + 2.0 * f2[i] + 2.0 * f3[i] + f4[i]) / 6.0;
    require_finite(next, "RK4 produced a non-finite state");
    return PhaseState(std::move(next));
}

bool ButcherTableau::is_explicit() const noexcept {
    for (std::size_t i = 0; i < stages; ++i)
        for (std::size_t j = i; j < stages; ++j)
            if (alpha(i, j) != 0.0) return false;
    return true;
}

void ButcherTableau::validate() const {
    if (stages == 0 || alpha.rows() != stages || alpha.cols() != stages || beta.size() != stages)
        fail(ErrorKind::validation, "tableau dimensions are inconsistent");
    double sum = 0.0;
    for (double b : beta) sum += b;
    if (std::abs(sum - 1.0) > 1e-14) fail(ErrorKind::validation, "tableau weights do not sum to one");
}

ButcherTableau rk4sym_tableau() {
    const double b = 1.0 / (2.0 - std::cbrt(2.0));
    ButcherTableau tab{"rk4sym", 3, Matrix{{b / 2, 0, 0}, {b, 0.5 - b, 0}, {b, 1 - 2 * b, b / 2}},
                       Vector{b, 1 - 2 * b, b}, 4};
    return tab;
}

ButcherTableau classical_rk4_tableau() {
    return {"rk4", 4, Matrix{{0, 0, 0, 0}, {0.5, 0, 0, 0}, {0, 0.5, 0, 0}, {0, 0, 1, 0}},
            Vector{1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6}, 4};
}

ButcherTableau implicit_midpoint_tableau() { return {"midpoint", 1, Matrix{{0.5}}, Vector{1.0}, 2}; }

ButcherTableau parse_tableau(std::string_view text, std::string name) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<double> numbers;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double v = 0.0;
        while (ls >> v) numbers.push_back(v);
        if (!ls.eof()) fail(ErrorKind::validation, "tableau contains a non-numeric token");
    }
    if (numbers.size() < 2) fail(ErrorKind::validation, "tableau header missing");
    const double s_raw = numbers[0];
    if (s_raw < 1 || s_raw != std::floor(s_raw)) fail(ErrorKind::validation, "stage count must be a positive integer");
    const auto s = static_cast<std::size_t>(s_raw);
    if (numbers.size() != 2 + s * s + s) fail(ErrorKind::validation, "tableau has the wrong number of coefficients");
    ButcherTableau tab{std::move(name), s, Matrix(s, s), Vector(s), static_cast<int>(numbers[1])};
    std::size_t k = 2;
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) tab.alpha(i, j) = numbers[k++];
    for (std::size_t i = 0; i < s; ++i) tab.beta[i] = numbers[k++];
    tab.validate();
    return tab;
}

ButcherTableau load_tableau(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io_failure, "cannot open tableau file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_tableau(buf.str(), path.stem().string());
}

double check_symplectic_condition(const ButcherTableau& tab) {
    double worst = 0.0;
    for (std::size_t i = 0; i < tab.stages; ++i)
        for (std::size_t j = 0; j < tab.stages; ++j)
            worst = std::max(worst, std::abs(tab.beta[i] * tab.beta[j] - tab.beta[i] * tab.alpha(i, j) -
                                             tab.beta[j] * tab.alpha(j, i)));
    return worst;
}

StepReport irk_step(const HamiltonianSystem& system, const PhaseState& u, double dt, const ButcherTableau& tab,
                    const StageSolverOptions& opts) {
    tab.validate();
    if (dt == 0.0) return {u, 0, 0.0};
    const Vector& u0 = u.values();
    const std::size_t n = u0.size();
    const std::size_t s = tab.stages;

    Vector stage_state(n);
    auto stage_input = [&](std::span<const double> k, std::size_t i) -> const Vector& {
        for (std::size_t c = 0; c < n; ++c) {
            double acc = 0.0;
            for (std::size_t j = 0; j < s; ++j) acc += tab.alpha(i, j) * k[j * n + c];
            stage_state[c] = u0[c] + dt * acc;
        }
        return stage_state;
    };

    Vector k(s * n, 0.0);
    int iterations = 0;
    double residual = 0.0;
    if (tab.is_explicit()) {
        for (std::size_t i = 0; i < s; ++i) {
            const Vector f = system.vector_field(stage_input(k, i));
            std::copy(f.begin(), f.end(), k.begin() + static_cast<std::ptrdiff_t>(i * n));
        }
    } else {
        const Vector f0 = system.vector_field(u0);
        for (std::size_t i = 0; i < s; ++i) std::copy(f0.begin(), f0.end(), k.begin() + static_cast<std::ptrdiff_t>(i * n));
        const VectorFunction g = [&](std::span<const double> kk) {
            Vector out(s * n);
            for (std::size_t i = 0; i < s; ++i) {
                const Vector f = system.vector_field(stage_input(kk, i));
                std::copy(f.begin(), f.end(), out.begin() + static_cast<std::ptrdiff_t>(i * n));
            }
            return out;
        };
        // Stage increments dt * K are compared against the state scale.
        const double tol = opts.tolerance * solver_scale(u0) / std::abs(dt);
        ImplicitSolution sol = solve_implicit(g, std::move(k), tol, opts);
        k = std::move(sol.x);
        iterations = sol.iterations;
        residual = sol.residual * std::abs(dt);
    }

    Vector next = u0;
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t c = 0; c < n; ++c) next[c] += dt * tab.beta[i] * k[i * n + c];
    require_finite(next, "Runge-Kutta step produced a non-finite state");
    return {PhaseState(std::move(next)), iterations, residual};
}

ComplexVector rk4_ode_step(const OdeField& field, std::span<const Complex> u, double t, double dt) {
    const std::size_t n = u.size();
    ComplexVector tmp(n);
    auto stage = [&](const ComplexVector& k, double c) {
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + c * dt * k[i];
        return field(tmp, t + c * dt);
    };
    const ComplexVector f1 = field(u, t);
    const ComplexVector f2 = stage(f1, 0.5);
    const ComplexVector f3 = stage(f2, 0.5);
    const ComplexVector f4 = stage(f3, 1.0);
    ComplexVector next(n);
    for (std::size_t i = 0; i < n; ++i) next[i] = u[i] + dt * (f1[i] + 2.0 * f2[i] + 2.0 * f3[i] + f4[i]) / 6.0;
    require_finite(next, "RK4 produced a non-finite state");
    return next;
}

double AdaptiveRk4Result::mean_step() const {
    if (steps.empty()) return 0.0;
    double s = 0.0;
    for (double h : steps) s += h;
    return s / static_cast<double>(steps.size());
}

AdaptiveRk4Result adaptive_rk4(const OdeField& field, ComplexVector u0, double t0, double t1,
                               const AdaptiveRk4Options& opts, bool record, const Rk4Observer& observer) {
    if (!(t1 > t0)) fail(ErrorKind::validation, "adaptive RK4 needs t1 > t0");
    AdaptiveRk4Result out;
    double t = t0;
    double h = std::min(opts.initial_step, opts.max_step);
    ComplexVector u = std::move(u0);
    if (record) {
        out.times.push_back(t);
        out.states.push_back(u);
    }
    while (t < t1) {
        const bool last = t + h >= t1;
        const double step = last ? t1 - t : h;
        const ComplexVector full = rk4_ode_step(field, u, t, step);
        const ComplexVector half = rk4_ode_step(field, u, t, 0.5 * step);
        const ComplexVector two_half = rk4_ode_step(field, half, t + 0.5 * step, 0.5 * step);
        double err = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(two_half[i] - full[i]));
        err /= 15.0;
        if (err <= opts.tolerance) {
            t = last ? t1 : t + step;
            // Richardson-extrapolated update keeps fifth-order local accuracy.
            for (std::size_t i = 0; i < u.size(); ++i) u[i] = two_half[i] + (two_half[i] - full[i]) / 15.0;
            out.steps.push_back(step);
            if (record) {
                out.times.push_back(t);
                out.states.push_back(u);
            }
            if (observer) observer(t, u, step);
            const double grow = err == 0.0 ? 5.0 : std::min(5.0, opts.safety * std::pow(opts.tolerance / err, 0.2));
            if (!last) h = std::min(opts.max_step, step * grow);
        } else {
            h = step * std::max(0.1, opts.safety * std::pow(opts.tolerance / err, 0.25));
            if (h < opts.min_step) fail(ErrorKind::step_collapse, "adaptive RK4 step fell below the minimum");
        }
    }
    out.final_state = std::move(u);
    return out;
}

}  // namespace geoint
