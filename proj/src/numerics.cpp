#include "geoint/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "geoint/errors.hpp"

namespace geoint {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) fail(ErrorKind::length_mismatch, "ragged matrix initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
    Matrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

Vector Matrix::column(std::size_t j) const {
    Vector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::max_abs() const noexcept {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

double Matrix::frobenius_norm() const noexcept {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
}

double Matrix::inf_norm() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (double x : row(i)) s += std::abs(x);
        m = std::max(m, s);
    }
    return m;
}

double Matrix::trace() const {
    if (!square()) fail(ErrorKind::length_mismatch, "trace of a non-square matrix");
    double t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) fail(ErrorKind::length_mismatch, "matrix sum");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) fail(ErrorKind::length_mismatch, "matrix difference");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) fail(ErrorKind::length_mismatch, "matrix product");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Vector operator*(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) fail(ErrorKind::length_mismatch, "matrix-vector product");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

double inf_norm(std::span<const double> v) noexcept {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double inf_norm(std::span<const Complex> v) noexcept {
    double m = 0.0;
    for (const Complex& x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) fail(ErrorKind::length_mismatch, "dot product");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vector solve_dense(Matrix a, std::span<const double> b) {
    const std::size_t n = a.rows();
    if (!a.square() || b.size() != n) fail(ErrorKind::length_mismatch, "solve_dense expects square A and matching b");
    const double threshold = 1e-14 * a.max_abs();
    Vector x(b.begin(), b.end());
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (std::abs(a(piv, k)) <= threshold || a(piv, k) == 0.0)
            fail(ErrorKind::singular_matrix, "pivot " + std::to_string(k) + " below threshold");
        if (piv != k) {
            std::swap_ranges(a.row(k).begin(), a.row(k).end(), a.row(piv).begin());
            std::swap(x[k], x[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            x[i] -= f * x[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        double s = x[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * x[j];
        x[k] = s / a(k, k);
    }
    return x;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

}  // namespace

SymmetricEigen sym_eigen(const Matrix& input) {
    if (!input.square()) fail(ErrorKind::not_symmetric, "matrix is not square");
    const std::size_t n = input.rows();
    const double scale = input.max_abs();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(input(i, j) - input(j, i)) > 1e-12 * scale)
                fail(ErrorKind::not_symmetric, "asymmetry exceeds 1e-12 relative");

    Matrix a = input;
    Matrix v = Matrix::identity(n);
    const double target = 1e-13 * input.frobenius_norm();
    int sweep = 0;
    while (off_diagonal_norm(a) > target) {
        if (++sweep > 100) fail(ErrorKind::no_convergence, "Jacobi eigenvalue sweeps exhausted");
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
    SymmetricEigen out{Vector(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

Vector sym_eigenvalues(const Matrix& a) { return sym_eigen(a).values; }

namespace {

struct ColumnJacobi {
    Matrix work;   // columns become U * diag(sigma)
    Matrix v;      // accumulated right rotations
};

// Hestenes one-sided Jacobi on a tall (rows >= cols) matrix.
ColumnJacobi orthogonalize_columns(Matrix work) {
    const std::size_t m = work.rows(), n = work.cols();
    Matrix v = Matrix::identity(n);
    const double tol = std::max(1e-15, static_cast<double>(m) * std::numeric_limits<double>::epsilon());
    // Columns below this squared norm are numerically zero; rotating them only churns rounding noise.
    const double negligible = 1e-30 * std::max(1e-300, work.frobenius_norm() * work.frobenius_norm());
    for (int sweep = 0;; ++sweep) {
        if (sweep > 80) fail(ErrorKind::no_convergence, "one-sided Jacobi SVD sweeps exhausted");
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t k = 0; k < m; ++k) {
                    alpha += work(k, i) * work(k, i);
                    beta += work(k, j) * work(k, j);
                    gamma += work(k, i) * work(k, j);
                }
                if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                if (std::min(alpha, beta) <= negligible) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t k = 0; k < m; ++k) {
                    const double wi = work(k, i), wj = work(k, j);
                    work(k, i) = c * wi - s * wj;
                    work(k, j) = s * wi + c * wj;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vi = v(k, i), vj = v(k, j);
                    v(k, i) = c * vi - s * vj;
                    v(k, j) = s * vi + c * vj;
                }
            }
        }
        if (!rotated) break;
    }
    return {std::move(work), std::move(v)};
}

double column_norm(const Matrix& a, std::size_t j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

// Fills columns flagged as missing with unit vectors orthogonal to the rest.
void complete_orthonormal(Matrix& u, const std::vector<bool>& missing) {
    const std::size_t m = u.rows(), k = u.cols();
    std::size_t candidate = 0;
    for (std::size_t j = 0; j < k; ++j) {
        if (!missing[j]) continue;
        while (true) {
            if (candidate >= m) fail(ErrorKind::no_convergence, "cannot complete orthonormal basis");
            Vector e(m, 0.0);
            e[candidate++] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t c = 0; c < k; ++c) {
                    if (c == j || (missing[c] && c > j)) continue;
                    double proj = 0.0;
                    for (std::size_t i = 0; i < m; ++i) proj += u(i, c) * e[i];
                    for (std::size_t i = 0; i < m; ++i) e[i] -= proj * u(i, c);
                }
            }
            const double norm = std::sqrt(dot(e, e));
            if (norm > 1e-8) {
                for (std::size_t i = 0; i < m; ++i) u(i, j) = e[i] / norm;
                break;
            }
        }
    }
}

Svd svd_tall(const Matrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    ColumnJacobi cj = orthogonalize_columns(a);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Vector norms(n);
    for (std::size_t j = 0; j < n; ++j) norms[j] = column_norm(cj.work, j);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });

    Svd out{Matrix(m, n), Vector(n), Matrix(n, n)};
    const double cutoff = (norms.empty() ? 0.0 : norms[order[0]]) * 1e-14;
    std::vector<bool> missing(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        out.sigma[k] = norms[j];
        for (std::size_t i = 0; i < n; ++i) out.v(i, k) = cj.v(i, j);
        if (norms[j] > cutoff && norms[j] > 0.0) {
            for (std::size_t i = 0; i < m; ++i) out.u(i, k) = cj.work(i, j) / norms[j];
        } else {
            missing[k] = true;
        }
    }
    complete_orthonormal(out.u, missing);
    return out;
}

}  // namespace

Svd svd_small(const Matrix& a) {
    if (a.rows() > 64 || a.cols() > 64) fail(ErrorKind::validation, "svd_small is limited to 64 x 64");
    if (a.rows() >= a.cols()) return svd_tall(a);
    Svd t = svd_tall(a.transpose());
    return {std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

namespace {

Matrix pad_rows(const Matrix& a) {
    if (a.rows() >= a.cols()) return a;
    Matrix padded(a.cols(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) padded(i, j) = a(i, j);
    return padded;
}

}  // namespace

Vector smallest_right_singular_vector(const Matrix& a) {
    if (a.cols() == 0) return {};
    ColumnJacobi cj = orthogonalize_columns(pad_rows(a));
    std::size_t best = 0;
    double best_norm = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < a.cols(); ++j) {
        const double nrm = column_norm(cj.work, j);
        if (nrm < best_norm) {
            best_norm = nrm;
            best = j;
        }
    }
    return cj.v.column(best);
}

Vector padded_singular_values(const Matrix& a) {
    ColumnJacobi cj = orthogonalize_columns(pad_rows(a));
    Vector s(a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) s[j] = column_norm(cj.work, j);
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
}

namespace {

// Laguerre polynomials L_0..L_{n} at x (orthonormal for e^{-x} on [0, inf)).
Vector laguerre_values(int n, double x) {
    Vector l(static_cast<std::size_t>(n) + 1);
    l[0] = 1.0;
    if (n >= 1) l[1] = 1.0 - x;
    for (int k = 1; k < n; ++k)
        l[k + 1] = ((2.0 * k + 1.0 - x) * l[k] - k * l[k - 1]) / (k + 1.0);
    return l;
}

}  // namespace

QuadratureRule gauss_laguerre(int n) {
    if (n < 1 || n > 64) fail(ErrorKind::validation, "gauss_laguerre supports 1 <= n <= 64");
    const auto un = static_cast<std::size_t>(n);
    Matrix jacobi(un, un);
    for (std::size_t k = 0; k < un; ++k) {
        jacobi(k, k) = 2.0 * static_cast<double>(k) + 1.0;
        if (k + 1 < un) jacobi(k, k + 1) = jacobi(k + 1, k) = static_cast<double>(k + 1);
    }
    QuadratureRule rule{sym_eigenvalues(jacobi), Vector(un)};
    for (std::size_t k = 0; k < un; ++k) {
        double& x = rule.nodes[k];
        // Newton polish on L_n; the Jacobi eigenvalue is already close.
        for (int it = 0; it < 3; ++it) {
            const Vector l = laguerre_values(n, x);
            const double deriv = n * (l[un] - l[un - 1]) / x;
            if (deriv == 0.0) break;
            x -= l[un] / deriv;
        }
        // First eigenvector component squared, written through the orthonormal
        // polynomials: the eigenvector of lambda is (L_0(lambda), ..., L_{n-1}(lambda)).
        const Vector l = laguerre_values(n - 1, x);
        double s = 0.0;
        for (double v : l) s += v * v;
        rule.weights[k] = 1.0 / s;
    }
    return rule;
}

double default_fd_step(std::span<const double> x) noexcept {
    return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, inf_norm(x));
}

Matrix fd_jacobian(const VectorFunction& f, std::span<const double> x, double h) {
    if (!(h > 0.0)) fail(ErrorKind::validation, "finite-difference step must be positive");
    Vector probe(x.begin(), x.end());
    Matrix jac;
    for (std::size_t j = 0; j < x.size(); ++j) {
        probe[j] = x[j] + h;
        const Vector plus = f(probe);
        probe[j] = x[j] - h;
        const Vector minus = f(probe);
        probe[j] = x[j];
        if (j == 0) jac = Matrix(plus.size(), x.size());
        if (plus.size() != jac.rows() || minus.size() != jac.rows())
            fail(ErrorKind::length_mismatch, "function output size changed between probes");
        for (std::size_t i = 0; i < plus.size(); ++i) {
            if (!std::isfinite(plus[i]) || !std::isfinite(minus[i]))
                fail(ErrorKind::non_finite_evaluation, "non-finite value in finite-difference probe");
            jac(i, j) = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    return jac;
}

Matrix fd_jacobian(const VectorFunction& f, std::span<const double> x) {
    return fd_jacobian(f, x, default_fd_step(x));
}

Complex poly_eval(std::span<const Complex> coeffs, Complex x) noexcept {
    Complex acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
    return acc;
}

Complex poly_derivative(std::span<const Complex> coeffs, Complex x) noexcept {
    Complex acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * coeffs[k];
    return acc;
}

namespace {

using ComplexMatrix = std::vector<ComplexVector>;

// Eigenvalues of an upper Hessenberg matrix by explicitly shifted complex QR.
ComplexVector hessenberg_eigenvalues(ComplexMatrix h) {
    const int n = static_cast<int>(h.size());
    ComplexVector eig;
    eig.reserve(static_cast<std::size_t>(n));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    int hi = n - 1;
    int iter = 0;
    while (hi >= 0) {
        if (hi == 0) {
            eig.push_back(h[0][0]);
            break;
        }
        int l = hi;
        while (l > 0) {
            const double scale = std::abs(h[l - 1][l - 1]) + std::abs(h[l][l]);
            if (std::abs(h[l][l - 1]) <= eps * (scale == 0.0 ? 1.0 : scale)) {
                h[l][l - 1] = 0.0;
                break;
            }
            --l;
        }
        if (l == hi) {
            eig.push_back(h[hi][hi]);
            --hi;
            iter = 0;
            continue;
        }
        if (++iter > 60 * n) fail(ErrorKind::no_convergence, "companion QR iteration did not converge");

        Complex shift;
        if (iter % 11 == 0) {
            shift = h[hi][hi] + std::abs(h[hi][hi - 1]) * Complex(0.75, 0.5);
        } else {
            const Complex a = h[hi - 1][hi - 1], b = h[hi - 1][hi], c = h[hi][hi - 1], d = h[hi][hi];
            const Complex tr = 0.5 * (a + d);
            const Complex disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
            const Complex r1 = tr + disc, r2 = tr - disc;
            shift = std::abs(r1 - d) < std::abs(r2 - d) ? r1 : r2;
        }

        for (int k = l; k <= hi; ++k) h[k][k] -= shift;
        std::vector<std::pair<Complex, Complex>> rotations;
        for (int k = l; k < hi; ++k) {
            const Complex x = h[k][k], y = h[k + 1][k];
            const double r = std::hypot(std::abs(x), std::abs(y));
            Complex c = 1.0, s = 0.0;
            if (r != 0.0) {
                c = x / r;
                s = y / r;
            }
            rotations.emplace_back(c, s);
            for (int j = k; j <= hi; ++j) {
                const Complex t1 = h[k][j], t2 = h[k + 1][j];
                h[k][j] = std::conj(c) * t1 + std::conj(s) * t2;
                h[k + 1][j] = -s * t1 + c * t2;
            }
        }
        for (int k = l; k < hi; ++k) {
            const auto [c, s] = rotations[static_cast<std::size_t>(k - l)];
            const int top = std::min(k + 2, hi);
            for (int i = l; i <= top; ++i) {
                const Complex t1 = h[i][k], t2 = h[i][k + 1];
                h[i][k] = t1 * c + t2 * s;
                h[i][k + 1] = -t1 * std::conj(s) + t2 * std::conj(c);
            }
        }
        for (int k = l; k <= hi; ++k) h[k][k] += shift;
    }
    return eig;
}

}  // namespace

ComplexVector polynomial_roots(std::span<const Complex> coeffs) {
    double largest = 0.0;
    for (const Complex& c : coeffs) largest = std::max(largest, std::abs(c));
    std::size_t degree = coeffs.size();
    while (degree > 0 && std::abs(coeffs[degree - 1]) <= 1e-14 * largest) --degree;
    if (degree <= 1) return {};
    const std::size_t n = degree - 1;
    const Complex lead = coeffs[n];
    ComplexMatrix companion(n, ComplexVector(n, 0.0));
    for (std::size_t i = 1; i < n; ++i) companion[i][i - 1] = 1.0;
    for (std::size_t i = 0; i < n; ++i) companion[i][n - 1] = -coeffs[i] / lead;
    return hessenberg_eigenvalues(std::move(companion));
}

}  // namespace geoint
