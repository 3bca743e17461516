#include "geoint/bpl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geoint/errors.hpp"

namespace geoint {

namespace {

constexpr double pade_rank_tol = 1e-12;
constexpr double pole_relative_distance = 1e-3;
constexpr double rounding_floor = 256.0 * std::numeric_limits<double>::epsilon();

bool finite(const ComplexVector& v) {
    for (const Complex& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

double norm_inf(std::span<const Complex> v) {
    double m = 0.0;
    for (const Complex& z : v) m = std::max(m, std::abs(z));
    return m;
}

}  // namespace

ComplexVector TaylorSeries::component(std::size_t i) const {
    ComplexVector out;
    out.reserve(coeffs.size());
    for (const ComplexVector& c : coeffs) out.push_back(c.at(i));
    return out;
}

ComplexVector TaylorSeries::evaluate(double tau) const {
    ComplexVector out(dimension(), Complex(0.0));
    for (std::size_t n = coeffs.size(); n-- > 0;)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] * tau + coeffs[n][i];
    return out;
}

Complex RationalApproximant::operator()(Complex xi) const noexcept {
    return poly_eval(numerator, xi) / poly_eval(denominator, xi);
}

Complex RationalApproximant::derivative(Complex xi) const noexcept {
    const Complex num = poly_eval(numerator, xi);
    const Complex den = poly_eval(denominator, xi);
    return (poly_derivative(numerator, xi) * den - num * poly_derivative(denominator, xi)) / (den * den);
}

ComplexVector RationalApproximant::poles() const { return polynomial_roots(denominator); }

void BplConfig::validate() const {
    if (order < 1) fail(ErrorKind::validation, "series order must be at least 1");
    if (pade_num < 0 || pade_den < 0) fail(ErrorKind::validation, "Pade degrees must be nonnegative");
    if (pade_num + pade_den + 1 > order)
        fail(ErrorKind::validation, "Pade degrees need more Borel coefficients than the series provides");
    if (quad_nodes < 1 || quad_nodes > 64) fail(ErrorKind::validation, "quadrature nodes must be in [1, 64]");
    if (!(eps_res >= 0.0)) fail(ErrorKind::validation, "eps_res must be nonnegative");
    if (!(growth > 1.0)) fail(ErrorKind::validation, "step growth factor must exceed 1");
    if (!(min_step > 0.0) || !(max_step >= min_step)) fail(ErrorKind::validation, "invalid step bounds");
    if (!(initial_step > 0.0)) fail(ErrorKind::validation, "initial step must be positive");
    if (max_trials < 1) fail(ErrorKind::validation, "max_trials must be positive");
    if (!(refine_ratio > 1.0)) fail(ErrorKind::validation, "refine_ratio must exceed 1");
}

BplConfig BplConfig::with_order(int order, double eps_res) {
    BplConfig cfg;
    cfg.order = order;
    cfg.pade_num = (order - 1) / 2;
    cfg.pade_den = order - 1 - cfg.pade_num;
    cfg.eps_res = eps_res;
    return cfg;
}

TaylorSeries generate_series(const TaylorGenerator& gen, std::span<const Complex> u0, double t0, int order) {
    if (order < 1) fail(ErrorKind::validation, "series order must be at least 1");
    if (u0.size() != gen.dimension) fail(ErrorKind::length_mismatch, "initial state does not match the generator");
    TaylorSeries s;
    s.t0 = t0;
    s.coeffs.reserve(static_cast<std::size_t>(order) + 1);
    s.coeffs.emplace_back(u0.begin(), u0.end());
    if (!finite(s.coeffs.front())) fail(ErrorKind::non_finite_coefficient, "initial state is not finite");
    for (int n = 0; n < order; ++n) {
        ComplexVector next = gen.next(s.coeffs, t0);
        if (next.size() != gen.dimension) fail(ErrorKind::length_mismatch, "generator returned the wrong length");
        if (!finite(next)) fail(ErrorKind::non_finite_coefficient, "Taylor coefficient of order " + std::to_string(n + 1));
        s.coeffs.push_back(std::move(next));
    }
    return s;
}

TaylorSeries borel_transform(const TaylorSeries& series) {
    if (series.order() < 1) fail(ErrorKind::validation, "Borel transform needs order >= 1");
    TaylorSeries out;
    out.t0 = series.t0;
    out.coeffs.reserve(series.order());
    double factorial = 1.0;
    for (std::size_t n = 0; n < series.order(); ++n) {
        if (n > 0) factorial *= static_cast<double>(n);
        ComplexVector c = series.coeffs[n + 1];
        for (Complex& z : c) z /= factorial;
        out.coeffs.push_back(std::move(c));
    }
    return out;
}

RationalApproximant pade_fit(std::span<const Complex> c, int num, int den) {
    if (num < 0 || den < 0) fail(ErrorKind::validation, "Pade degrees must be nonnegative");
    const auto m = static_cast<std::size_t>(num);
    if (m + static_cast<std::size_t>(den) + 1 > c.size())
        fail(ErrorKind::validation, "not enough coefficients for the requested Pade degrees");

    if (norm_inf(c.subspan(0, m + static_cast<std::size_t>(den) + 1)) == 0.0)
        return {ComplexVector(m + 1, Complex(0.0)), ComplexVector{Complex(1.0)}};

    // Fit in zeta = xi / rho with rho balancing the first and last coefficient.
    const std::size_t last = m + static_cast<std::size_t>(den);
    double rho = 1.0;
    if (std::abs(c[0]) > 0.0 && std::abs(c[last]) > 0.0 && last > 0) {
        rho = std::pow(std::abs(c[0]) / std::abs(c[last]), 1.0 / static_cast<double>(last));
        if (!std::isfinite(rho) || rho <= 0.0) rho = 1.0;
    }
    ComplexVector scaled(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(last + 1));
    for (std::size_t k = 0; k <= last; ++k) scaled[k] *= std::pow(rho, static_cast<double>(k));
    auto coef = [&](std::ptrdiff_t k) { return k < 0 ? Complex(0.0) : scaled[static_cast<std::size_t>(k)]; };

    for (auto n = static_cast<std::size_t>(den);; --n) {
        ComplexVector b{Complex(1.0)};
        if (n > 0) {
            // Rows k = m+1 .. m+n of sum_j b_j c_{k-j} = 0, embedded as a real
            // 2n x 2(n+1) system [Re -Im; Im Re].
            Matrix r(2 * n, 2 * (n + 1));
            for (std::size_t row = 0; row < n; ++row) {
                const auto k = static_cast<std::ptrdiff_t>(m + 1 + row);
                for (std::size_t j = 0; j <= n; ++j) {
                    const Complex z = coef(k - static_cast<std::ptrdiff_t>(j));
                    r(row, j) = z.real();
                    r(row, n + 1 + j) = -z.imag();
                    r(n + row, j) = z.imag();
                    r(n + row, n + 1 + j) = z.real();
                }
            }
            const Vector sigma = padded_singular_values(r);
            if (sigma.front() == 0.0 || sigma[2 * n - 1] < pade_rank_tol * sigma.front()) continue;
            const Vector v = smallest_right_singular_vector(r);
            b.assign(n + 1, Complex(0.0));
            double bmax = 0.0;
            for (std::size_t j = 0; j <= n; ++j) {
                b[j] = Complex(v[j], v[n + 1 + j]);
                bmax = std::max(bmax, std::abs(b[j]));
            }
            if (std::abs(b[0]) < 1e-10 * bmax) continue;
            const Complex b0 = b[0];
            for (Complex& z : b) z /= b0;
        }
        ComplexVector a(m + 1, Complex(0.0));
        for (std::size_t k = 0; k <= m; ++k)
            for (std::size_t j = 0; j <= std::min(k, n); ++j) a[k] += b[j] * scaled[k - j];
        for (std::size_t k = 0; k <= m; ++k) a[k] /= std::pow(rho, static_cast<double>(k));
        for (std::size_t j = 0; j < b.size(); ++j) b[j] /= std::pow(rho, static_cast<double>(j));
        if (!finite(a) || !finite(b)) fail(ErrorKind::degenerate_fit, "Pade coefficients are not finite");
        return {std::move(a), std::move(b)};
    }
}

std::vector<RationalApproximant> pade_fit(const TaylorSeries& borel, int num, int den) {
    std::vector<RationalApproximant> fits;
    fits.reserve(borel.dimension());
    for (std::size_t i = 0; i < borel.dimension(); ++i) fits.push_back(pade_fit(borel.component(i), num, den));
    return fits;
}

double pole_guard(const RationalApproximant& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const Complex& z : p.poles()) best = std::min(best, z.real() >= 0.0 ? std::abs(z.imag()) : std::abs(z));
    return best;
}

namespace {

bool near_nodes(std::span<const Complex> poles, double t, const QuadratureRule& rule) {
    for (const Complex& z : poles)
        for (double x : rule.nodes)
            if (std::abs(z - t * x) <= pole_relative_distance * t * x) return true;
    return false;
}

Complex quadrature_value(const RationalApproximant& p, double t, const QuadratureRule& rule) {
    Complex acc(0.0);
    for (std::size_t k = 0; k < rule.size(); ++k) acc += rule.weights[k] * p(t * rule.nodes[k]);
    return acc * t;
}

Complex quadrature_derivative(const RationalApproximant& p, double t, const QuadratureRule& rule) {
    Complex acc(0.0);
    for (std::size_t k = 0; k < rule.size(); ++k) {
        const double xi = t * rule.nodes[k];
        acc += rule.weights[k] * (p(xi) + xi * p.derivative(xi));
    }
    return acc;
}

}  // namespace

bool pole_near_nodes(const RationalApproximant& p, double t, const QuadratureRule& rule) {
    if (p.denominator_degree() == 0) return false;
    return near_nodes(p.poles(), t, rule);
}

Complex laplace_eval(const RationalApproximant& p, Complex u0, double t, const QuadratureRule& rule) {
    if (!(t >= 0.0)) fail(ErrorKind::validation, "Laplace evaluation needs t >= 0");
    if (t == 0.0) return u0;
    if (pole_near_nodes(p, t, rule)) fail(ErrorKind::pole_on_path, "Pade pole on the integration path");
    return u0 + quadrature_value(p, t, rule);
}

Complex laplace_derivative(const RationalApproximant& p, double t, const QuadratureRule& rule) {
    if (!(t >= 0.0)) fail(ErrorKind::validation, "Laplace evaluation needs t >= 0");
    if (t > 0.0 && pole_near_nodes(p, t, rule)) fail(ErrorKind::pole_on_path, "Pade pole on the integration path");
    return quadrature_derivative(p, t, rule);
}

BorelSum::BorelSum(const TaylorSeries& series, int num, int den, QuadratureRule rule)
    : t0_(series.t0), u0_(series.coeffs.at(0)), fits_(pade_fit(borel_transform(series), num, den)),
      rule_(std::move(rule)) {
    poles_.reserve(fits_.size());
    for (const RationalApproximant& p : fits_) poles_.push_back(p.poles());
}

void BorelSum::check_path(double tau) const {
    if (!(tau >= 0.0)) fail(ErrorKind::validation, "Laplace evaluation needs t >= 0");
    if (tau == 0.0) return;
    for (const ComplexVector& poles : poles_)
        if (near_nodes(poles, tau, rule_)) fail(ErrorKind::pole_on_path, "Pade pole on the integration path");
}

ComplexVector BorelSum::value(double tau) const {
    check_path(tau);
    ComplexVector out(u0_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = u0_[i] + quadrature_value(fits_[i], tau, rule_);
    return out;
}

ComplexVector BorelSum::derivative(double tau) const {
    check_path(tau);
    ComplexVector out(u0_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = quadrature_derivative(fits_[i], tau, rule_);
    return out;
}

namespace {

struct Probe {
    double value;
    double floor;  // rounding level of the residual at this point
};

Probe probe_residual(const TaylorGenerator& gen, const BorelSum& sum, double tau, ResidualScale scale) {
    const ComplexVector s = sum.value(tau);
    const ComplexVector ds = sum.derivative(tau);
    const ComplexVector f = gen.field(s, sum.t0() + tau);
    double r = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) r = std::max(r, std::abs(ds[i] - f[i]));
    const double fmax = norm_inf(f);
    double floor = rounding_floor * std::max(fmax, norm_inf(ds));
    if (scale == ResidualScale::mixed) {
        r /= std::max(1.0, fmax);
        floor /= std::max(1.0, fmax);
    }
    if (!std::isfinite(r)) r = std::numeric_limits<double>::infinity();
    return {r, floor};
}

}  // namespace

double residual(const TaylorGenerator& gen, const BorelSum& sum, double tau, ResidualScale scale) {
    return probe_residual(gen, sum, tau, scale).value;
}

BplStepResult bpl_step(const TaylorGenerator& gen, std::span<const Complex> u0, double t0, const BplConfig& cfg,
                       double trial_step, double step_cap) {
    cfg.validate();
    const double cap = std::min(cfg.max_step, step_cap);
    if (!(cap > 0.0)) fail(ErrorKind::validation, "step cap must be positive");

    const TaylorSeries series = generate_series(gen, u0, t0, cfg.order);
    const BorelSum sum(series, cfg.pade_num, cfg.pade_den, gauss_laguerre(cfg.quad_nodes));

    auto threshold = [&](const Probe& p) { return cfg.eps_res > 0.0 ? std::max(cfg.eps_res, p.floor) : 0.0; };
    int trials = 0;
    double last_end = 0.0, last_mid = 0.0;
    auto accept = [&](double h) {
        ++trials;
        try {
            const Probe end = probe_residual(gen, sum, h, cfg.scale);
            last_end = end.value;
            if (last_end > threshold(end)) return false;
            const Probe mid = probe_residual(gen, sum, 0.5 * h, cfg.scale);
            last_mid = mid.value;
            return last_mid <= threshold(mid);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::pole_on_path) return false;
            throw;
        }
    };

    double h = std::clamp(trial_step, std::min(cfg.min_step, cap), cap);
    double lo = 0.0, hi = 0.0;
    if (accept(h)) {
        lo = h;
        hi = h;
        while (lo < cap && trials < cfg.max_trials) {
            const double next = std::min(lo * cfg.growth, cap);
            if (!accept(next)) {
                hi = next;
                break;
            }
            lo = next;
            hi = next;
        }
    } else {
        hi = h;
        for (;;) {
            h *= 0.5;
            if (h < cfg.min_step || trials >= cfg.max_trials)
                fail(ErrorKind::step_collapse, "no step above the minimum meets eps_res at t = " + std::to_string(t0));
            if (accept(h)) break;
            hi = h;
        }
        lo = h;
    }
    while (hi > lo * cfg.refine_ratio && trials < cfg.max_trials) {
        const double mid = std::sqrt(lo * hi);
        if (accept(mid))
            lo = mid;
        else
            hi = mid;
    }

    BplStepResult out;
    out.step = lo;
    out.t1 = t0 + lo;
    out.state = sum.value(lo);
    out.residual_end = residual(gen, sum, lo, cfg.scale);
    out.residual_mid = residual(gen, sum, 0.5 * lo, cfg.scale);
    out.trials = trials;
    return out;
}

BplStepResult bpl_step(const TaylorGenerator& gen, std::span<const Complex> u0, double t0, const BplConfig& cfg) {
    return bpl_step(gen, u0, t0, cfg, cfg.initial_step, cfg.max_step);
}

double BplTrajectory::mean_step() const {
    if (steps.empty()) return 0.0;
    double s = 0.0;
    for (double h : steps) s += h;
    return s / static_cast<double>(steps.size());
}

BplTrajectory bpl_integrate(const TaylorGenerator& gen, ComplexVector u0, double t0, double t_final,
                            const BplConfig& cfg, bool record, const BplObserver& observer) {
    cfg.validate();
    if (!(t_final > t0)) fail(ErrorKind::validation, "t_final must exceed the start time");
    BplTrajectory traj;
    traj.times.push_back(t0);
    traj.states.push_back(u0);
    traj.residuals.push_back(0.0);
    if (observer) observer(t0, u0, 0.0, 0.0);

    double t = t0;
    double trial = cfg.initial_step;
    ComplexVector u = std::move(u0);
    while (t < t_final) {
        const double remaining = t_final - t;
        BplStepResult r = bpl_step(gen, u, t, cfg, trial, remaining);
        const bool last = r.step >= remaining * (1.0 - 1e-14);
        t = last ? t_final : r.t1;
        // Restart from the previous accepted step; a step clipped by the
        // final time says nothing about the admissible window.
        if (!last) trial = r.step;
        u = std::move(r.state);
        traj.steps.push_back(r.step);
        if (record) {
            traj.times.push_back(t);
            traj.states.push_back(u);
            traj.residuals.push_back(std::max(r.residual_end, r.residual_mid));
        }
        if (observer) observer(t, u, r.step, std::max(r.residual_end, r.residual_mid));
    }
    if (!record) {
        traj.times.push_back(t);
        traj.states.push_back(u);
        traj.residuals.push_back(0.0);
    }
    return traj;
}

double series_symplectic_defect(const HamiltonianSystem& system, const PhaseState& u, int order, double t) {
    if (!system.taylor) fail(ErrorKind::validation, "system has no Taylor generator");
    if (t == 0.0) return 0.0;
    const TaylorGenerator& gen = *system.taylor;
    const VectorFunction map = [&](std::span<const double> x) {
        ComplexVector z(x.begin(), x.end());
        const ComplexVector s = generate_series(gen, z, 0.0, order).evaluate(t);
        Vector out(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i].real();
        return out;
    };
    return map_symplecticity_defect(map, u.values());
}

}  // namespace geoint
