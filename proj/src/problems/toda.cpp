#include "geoint/problems/toda.hpp"

#include <cmath>

#include "geoint/errors.hpp"

namespace geoint {

namespace {

std::size_t lattice_size(std::span<const double> u) {
    if (u.size() % 2 != 0) fail(ErrorKind::odd_length, "Toda state needs (q, p)");
    const std::size_t d = u.size() / 2;
    if (d < 2) fail(ErrorKind::validation, "Toda lattice needs at least two particles");
    return d;
}

}  // namespace

double toda_hamiltonian(std::span<const double> u) {
    const std::size_t d = lattice_size(u);
    double h = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double p = u[d + k];
        h += 0.5 * p * p + std::exp(u[k] - u[(k + 1) % d]);
    }
    return h;
}

Vector toda_grad(std::span<const double> u) {
    const std::size_t d = lattice_size(u);
    Vector g(2 * d);
    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t next = (k + 1) % d;
        const std::size_t prev = (k + d - 1) % d;
        g[k] = std::exp(u[k] - u[next]) - std::exp(u[prev] - u[k]);
        g[d + k] = u[d + k];
    }
    return g;
}

HamiltonianSystem toda_system(std::size_t d) {
    if (d < 2) fail(ErrorKind::validation, "Toda lattice needs at least two particles");
    HamiltonianSystem sys;
    sys.dof = d;
    sys.separable = true;
    sys.energy = toda_hamiltonian;
    sys.gradient = toda_grad;

    TaylorGenerator gen;
    gen.dimension = 2 * d;
    gen.field = [d](std::span<const Complex> u, double) {
        ComplexVector f(2 * d);
        for (std::size_t k = 0; k < d; ++k) {
            const std::size_t next = (k + 1) % d;
            const std::size_t prev = (k + d - 1) % d;
            f[k] = u[d + k];
            f[d + k] = std::exp(u[prev] - u[k]) - std::exp(u[k] - u[next]);
        }
        return f;
    };
    // w_k = exp(s_k), s_k = q_k - q_{k+1}: w_0 = exp(s_0),
    // n w_n = sum_{j=1}^{n} j s_j w_{n-j}.
    gen.next = [d](std::span<const ComplexVector> c, double) {
        const std::size_t n = c.size() - 1;
        std::vector<ComplexVector> w(n + 1, ComplexVector(d));
        for (std::size_t k = 0; k < d; ++k) {
            auto s = [&](std::size_t j) { return c[j][k] - c[j][(k + 1) % d]; };
            w[0][k] = std::exp(s(0));
            for (std::size_t m = 1; m <= n; ++m) {
                Complex acc(0.0);
                for (std::size_t j = 1; j <= m; ++j) acc += static_cast<double>(j) * s(j) * w[m - j][k];
                w[m][k] = acc / static_cast<double>(m);
            }
        }
        const double inv = 1.0 / static_cast<double>(n + 1);
        ComplexVector out(2 * d);
        for (std::size_t k = 0; k < d; ++k) {
            const std::size_t prev = (k + d - 1) % d;
            out[k] = c[n][d + k] * inv;
            out[d + k] = (w[n][prev] - w[n][k]) * inv;
        }
        return out;
    };
    sys.taylor = std::move(gen);
    return sys;
}

PhaseState toda_initial() { return PhaseState(Vector{0.0, 2.0, 3.0}, Vector{0.5, -1.5, 1.0}); }

Matrix lax_matrix(std::span<const double> u) {
    const std::size_t d = lattice_size(u);
    Matrix l(d, d);
    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t next = (k + 1) % d;
        l(k, k) = -0.5 * u[d + k];
        const double b = 0.5 * std::exp(0.5 * (u[k] - u[next]));
        l(k, next) += b;
        l(next, k) += b;
    }
    return l;
}

Vector lax_eigenvalues(std::span<const double> u) { return sym_eigenvalues(lax_matrix(u)); }

}  // namespace geoint
