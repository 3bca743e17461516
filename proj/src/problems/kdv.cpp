#include "geoint/problems/kdv.hpp"

#include <cmath>

#include "geoint/errors.hpp"

namespace geoint {

KdvSpectral::KdvSpectral(KdvParams params) : p_(params) {
    if (p_.modes < 1) fail(ErrorKind::validation, "KdV needs at least one mode");
    if (!(p_.period > 0.0 && p_.depth > 0.0 && p_.gravity > 0.0 && p_.height > 0.0))
        fail(ErrorKind::validation, "KdV parameters must be positive");
    c0_ = std::sqrt(p_.gravity * p_.depth);
    alpha_ = 1.5 * std::sqrt(p_.gravity / p_.depth);
    beta_ = p_.depth * p_.depth * c0_ / 6.0;
    omega_ = 2.0 * std::numbers::pi / p_.period;
    kappa_ = std::sqrt(3.0 * p_.height / (4.0 * p_.depth * p_.depth * p_.depth));
    speed_ = c0_ * (1.0 + p_.height / (2.0 * p_.depth));
}

double KdvSpectral::initial_profile(double x) const {
    const double X = p_.period;
    x -= X * std::floor((x + 0.5 * X) / X);
    const double s = 1.0 / std::cosh(kappa_ * x);
    return p_.height * s * s;
}

double KdvSpectral::exact(double x, double t) const { return initial_profile(x - speed_ * t); }

ComplexVector KdvSpectral::initial() const {
    const int M = p_.modes;
    const int P = 2 * M + 1;
    const double X = p_.period;
    Vector samples(static_cast<std::size_t>(P));
    Vector xs(samples.size());
    for (int j = 0; j < P; ++j) {
        xs[static_cast<std::size_t>(j)] = -0.5 * X + X * j / P;
        samples[static_cast<std::size_t>(j)] = initial_profile(xs[static_cast<std::size_t>(j)]);
    }
    ComplexVector u(size());
    for (int m = 0; m <= M; ++m) {
        Complex acc(0.0);
        for (int j = 0; j < P; ++j)
            acc += samples[static_cast<std::size_t>(j)] * std::polar(1.0, -m * omega_ * xs[static_cast<std::size_t>(j)]);
        acc /= static_cast<double>(P);
        if (m == 0) acc = Complex(acc.real(), 0.0);
        u[static_cast<std::size_t>(M + m)] = acc;
        u[static_cast<std::size_t>(M - m)] = std::conj(acc);
    }
    return u;
}

ComplexVector KdvSpectral::exact_coefficients(double t) const {
    ComplexVector u = initial();
    const int M = p_.modes;
    for (int m = -M; m <= M; ++m) u[static_cast<std::size_t>(m + M)] *= std::polar(1.0, -m * omega_ * speed_ * t);
    return u;
}

double KdvSpectral::l2_error(std::span<const Complex> u, double t) const {
    if (u.size() != size()) fail(ErrorKind::length_mismatch, "KdV state has the wrong number of modes");
    const ComplexVector ex = exact_coefficients(t);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += std::norm(u[i] - ex[i]);
    return std::sqrt(p_.period * s);
}

ComplexVector KdvSpectral::convolve(std::span<const Complex> a, std::span<const Complex> b) const {
    const int M = p_.modes;
    ComplexVector out(size(), Complex(0.0));
    for (int m = -M; m <= M; ++m) {
        const int lo = std::max(-M, m - M);
        const int hi = std::min(M, m + M);
        Complex acc(0.0);
        for (int j = lo; j <= hi; ++j) acc += a[static_cast<std::size_t>(j + M)] * b[static_cast<std::size_t>(m - j + M)];
        out[static_cast<std::size_t>(m + M)] = acc;
    }
    return out;
}

Complex KdvSpectral::linear(int m) const noexcept {
    const double w = omega_ * m;
    return Complex(0.0, -c0_ * w + beta_ * w * w * w);
}

ComplexVector KdvSpectral::rhs(std::span<const Complex> u) const {
    if (u.size() != size()) fail(ErrorKind::length_mismatch, "KdV state has the wrong number of modes");
    const int M = p_.modes;
    const ComplexVector sq = convolve(u, u);
    ComplexVector f(size());
    for (int m = -M; m <= M; ++m) {
        const auto i = static_cast<std::size_t>(m + M);
        f[i] = linear(m) * u[i] - Complex(0.0, 0.5 * alpha_ * m * omega_) * sq[i];
    }
    return f;
}

ComplexVector KdvSpectral::taylor_next(std::span<const ComplexVector> coeffs) const {
    const int M = p_.modes;
    const std::size_t k = coeffs.size() - 1;
    // sum_{n=0}^{k} u_n * u_{k-n}, pairing n with k - n.
    ComplexVector sum(size(), Complex(0.0));
    for (std::size_t n = 0; 2 * n <= k; ++n) {
        const ComplexVector c = convolve(coeffs[n], coeffs[k - n]);
        const double weight = (2 * n == k) ? 1.0 : 2.0;
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += weight * c[i];
    }
    const double inv = 1.0 / static_cast<double>(k + 1);
    ComplexVector out(size());
    for (int m = -M; m <= M; ++m) {
        const auto i = static_cast<std::size_t>(m + M);
        out[i] = (linear(m) * coeffs[k][i] - Complex(0.0, 0.5 * alpha_ * m * omega_) * sum[i]) * inv;
    }
    return out;
}

OdeField KdvSpectral::field() const {
    const KdvSpectral self = *this;
    return [self](std::span<const Complex> u, double) { return self.rhs(u); };
}

TaylorGenerator KdvSpectral::taylor() const {
    const KdvSpectral self = *this;
    TaylorGenerator gen;
    gen.dimension = size();
    gen.field = [self](std::span<const Complex> u, double) { return self.rhs(u); };
    gen.next = [self](std::span<const ComplexVector> coeffs, double) { return self.taylor_next(coeffs); };
    return gen;
}

double KdvSpectral::conjugate_asymmetry(std::span<const Complex> u) const {
    const int M = p_.modes;
    double worst = 0.0;
    for (int m = 0; m <= M; ++m)
        worst = std::max(worst, std::abs(u[static_cast<std::size_t>(M - m)] - std::conj(u[static_cast<std::size_t>(M + m)])));
    return worst;
}

}  // namespace geoint
