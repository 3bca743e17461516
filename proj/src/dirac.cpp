#include "geoint/dirac.hpp"

#include <algorithm>
#include <cmath>

#include "geoint/errors.hpp"

namespace geoint {

namespace {

constexpr double rank_tolerance = 1e-10;

void check_state(const ConstrainedSystem& sys, const DiracState& st) {
    if (st.q.size() != sys.dim || st.p.size() != sys.dim)
        fail(ErrorKind::length_mismatch, "state does not match the configuration dimension");
}

Matrix jacobian_at(const ConstrainedSystem& sys, std::span<const double> q) {
    if (sys.constraints == 0) return Matrix(0, sys.dim);
    Matrix a = sys.constraint_jacobian(q);
    if (a.rows() != sys.constraints || a.cols() != sys.dim)
        fail(ErrorKind::length_mismatch, "constraint Jacobian has the wrong shape");
    return a;
}

void require_full_rank(const Matrix& a) {
    if (a.rows() == 0) return;
    const Svd s = svd_small(a);
    if (s.sigma.back() <= rank_tolerance * std::max(1.0, s.sigma.front()))
        fail(ErrorKind::rank_deficient_constraints, "constraint gradients are linearly dependent");
}

Vector hessian_vector(const ConstrainedSystem& sys, std::span<const double> q, std::span<const double> v,
                      std::size_t a) {
    if (sys.constraint_hessian_vector) return sys.constraint_hessian_vector(q, v, a);
    const double h = default_fd_step(q);
    Vector plus(q.begin(), q.end()), minus(q.begin(), q.end());
    for (std::size_t i = 0; i < q.size(); ++i) {
        plus[i] += h * v[i];
        minus[i] -= h * v[i];
    }
    const Matrix jp = jacobian_at(sys, plus);
    const Matrix jm = jacobian_at(sys, minus);
    Vector out(sys.dim);
    for (std::size_t i = 0; i < sys.dim; ++i) out[i] = (jp(a, i) - jm(a, i)) / (2.0 * h);
    return out;
}

// Solves M v + A^T lambda = r, A v = 0.
std::pair<Vector, Vector> saddle_solve(const Matrix& mass, const Matrix& a, std::span<const double> r) {
    const std::size_t d = mass.rows();
    const std::size_t m = a.rows();
    Matrix k(d + m, d + m);
    Vector rhs(d + m, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) k(i, j) = mass(i, j);
        rhs[i] = r[i];
    }
    for (std::size_t c = 0; c < m; ++c)
        for (std::size_t i = 0; i < d; ++i) {
            k(i, d + c) = a(c, i);
            k(d + c, i) = a(c, i);
        }
    Vector x;
    try {
        x = solve_dense(std::move(k), rhs);
    } catch (const Error&) {
        fail(ErrorKind::solve_failure, "singular saddle-point system");
    }
    return {Vector(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(d)),
            Vector(x.begin() + static_cast<std::ptrdiff_t>(d), x.end())};
}

// Shared step: q^{n+1} = anchor + span * dt * v, alpha_d taken at q^n or at
// the midpoint of anchor and q^{n+1}.
DiracState dirac_step(const ConstrainedSystem& sys, const DiracState& st, std::span<const double> anchor,
                      double span, double dt, const DiracOptions& opts) {
    const std::size_t d = sys.dim;
    const std::size_t m = sys.constraints;
    const Matrix a_n = jacobian_at(sys, st.q);
    require_full_rank(a_n);

    const Vector grad = sys.grad_potential(st.q);
    Vector r(d);
    for (std::size_t i = 0; i < d; ++i) r[i] = st.p[i] - dt * grad[i];

    auto [v, lambda] = saddle_solve(sys.mass, a_n, r);

    auto next_q = [&](std::span<const double> vel) {
        Vector q1(d);
        for (std::size_t i = 0; i < d; ++i) q1[i] = anchor[i] + span * dt * vel[i];
        return q1;
    };

    if (opts.form == DiscreteForm::midpoint && m > 0) {
        auto form_point = [&](std::span<const double> vel) {
            Vector mid(d);
            for (std::size_t i = 0; i < d; ++i) mid[i] = anchor[i] + 0.5 * span * dt * vel[i];
            return mid;
        };
        const VectorFunction residual = [&](std::span<const double> x) {
            const std::span<const double> vel = x.subspan(0, d);
            const std::span<const double> lam = x.subspan(d, m);
            const Matrix a = jacobian_at(sys, form_point(vel));
            Vector res = sys.mass * vel;
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t c = 0; c < m; ++c) res[i] += a(c, i) * lam[c];
                res[i] -= r[i];
            }
            const Vector av = a * vel;
            res.insert(res.end(), av.begin(), av.end());
            return res;
        };
        Vector x(v);
        x.insert(x.end(), lambda.begin(), lambda.end());
        const double tol = opts.tolerance * std::max(1.0, inf_norm(r));
        bool converged = false;
        for (int it = 0; it <= opts.max_newton; ++it) {
            const Vector res = residual(x);
            if (!std::isfinite(inf_norm(res))) fail(ErrorKind::solve_failure, "non-finite Dirac residual");
            if (inf_norm(res) <= tol) {
                converged = true;
                break;
            }
            if (it == opts.max_newton) break;
            Vector delta;
            try {
                delta = solve_dense(fd_jacobian(residual, x), res);
            } catch (const Error&) {
                fail(ErrorKind::solve_failure, "singular Newton matrix in Dirac step");
            }
            for (std::size_t i = 0; i < x.size(); ++i) x[i] -= delta[i];
        }
        if (!converged) fail(ErrorKind::solve_failure, "Dirac step did not converge");
        v.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(d));
        lambda.assign(x.begin() + static_cast<std::ptrdiff_t>(d), x.end());
    }

    DiracState out;
    out.q = next_q(v);
    out.p = sys.mass * v;
    out.previous_q = st.q;
    out.lambda = std::move(lambda);
    return out;
}

}  // namespace

void ConstrainedSystem::validate() const {
    if (dim == 0) fail(ErrorKind::validation, "configuration dimension must be positive");
    if (mass.rows() != dim || mass.cols() != dim) fail(ErrorKind::validation, "mass matrix has the wrong shape");
    if (!potential || !grad_potential) fail(ErrorKind::validation, "potential and its gradient are required");
    if (constraints > 0 && (!constraint_values || !constraint_jacobian))
        fail(ErrorKind::validation, "constraint functions are required");
    const SymmetricEigen e = sym_eigen(mass);
    if (e.values.front() <= 0.0) fail(ErrorKind::validation, "mass matrix is not positive definite");
}

double ConstrainedSystem::energy(std::span<const double> q, std::span<const double> p) const {
    const Vector v = solve_dense(mass, p);
    return 0.5 * dot(p, v) + potential(q);
}

DiracState dirac1_step(const ConstrainedSystem& sys, const DiracState& st, double dt, const DiracOptions& opts) {
    check_state(sys, st);
    if (!(dt > 0.0)) fail(ErrorKind::validation, "Dirac step needs dt > 0");
    return dirac_step(sys, st, st.q, 1.0, dt, opts);
}

DiracState dirac2_step(const ConstrainedSystem& sys, const DiracState& st, double dt, const DiracOptions& opts) {
    check_state(sys, st);
    if (!st.previous_q) fail(ErrorKind::missing_history, "Dirac-2 needs q^{n-1}; start with a Dirac-1 step");
    if (st.previous_q->size() != sys.dim) fail(ErrorKind::length_mismatch, "history has the wrong length");
    if (!(dt > 0.0)) fail(ErrorKind::validation, "Dirac step needs dt > 0");
    const Vector anchor = *st.previous_q;
    return dirac_step(sys, st, anchor, 2.0, dt, opts);
}

double constraint_residual(const ConstrainedSystem& sys, const DiracState& st) {
    if (sys.constraints == 0) return 0.0;
    return inf_norm(sys.constraint_values(st.q));
}

double velocity_constraint_residual(const ConstrainedSystem& sys, std::span<const double> q0,
                                    std::span<const double> q1, std::span<const double> v, DiscreteForm form) {
    if (sys.constraints == 0) return 0.0;
    Vector point(q0.begin(), q0.end());
    if (form == DiscreteForm::midpoint)
        for (std::size_t i = 0; i < point.size(); ++i) point[i] = 0.5 * (q0[i] + q1[i]);
    return inf_norm(jacobian_at(sys, point) * v);
}

DiracState euler_constrained_control(const ConstrainedSystem& sys, const DiracState& st, double dt) {
    check_state(sys, st);
    if (dt == 0.0) return st;
    const std::size_t d = sys.dim;
    const std::size_t m = sys.constraints;
    const Vector qdot = solve_dense(sys.mass, st.p);
    const Vector grad = sys.grad_potential(st.q);
    Vector force(d);
    for (std::size_t i = 0; i < d; ++i) force[i] = -grad[i];

    Vector lambda;
    if (m > 0) {
        const Matrix a = jacobian_at(sys, st.q);
        require_full_rank(a);
        // Columns of M^{-1} A^T.
        Matrix minv_at(d, m);
        for (std::size_t c = 0; c < m; ++c) {
            const Vector col = solve_dense(sys.mass, a.row(c));
            for (std::size_t i = 0; i < d; ++i) minv_at(i, c) = col[i];
        }
        const Matrix schur = a * minv_at;
        const Vector minv_grad = solve_dense(sys.mass, grad);
        const Vector a_minv_grad = a * minv_grad;
        Vector rhs(m);
        for (std::size_t c = 0; c < m; ++c) rhs[c] = dot(qdot, hessian_vector(sys, st.q, qdot, c)) - a_minv_grad[c];
        try {
            lambda = solve_dense(schur, rhs);
        } catch (const Error&) {
            fail(ErrorKind::rank_deficient_constraints, "singular constraint Schur complement");
        }
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t c = 0; c < m; ++c) force[i] -= a(c, i) * lambda[c];
    }

    DiracState out;
    out.q.resize(d);
    out.p.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        out.q[i] = st.q[i] + dt * qdot[i];
        out.p[i] = st.p[i] + dt * force[i];
    }
    out.previous_q = st.q;
    out.lambda = std::move(lambda);
    return out;
}

}  // namespace geoint
