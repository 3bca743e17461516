#pragma once

// Small dense numerical kernels. Everything here targets matrices of at most
// a few dozen rows; algorithms favour accuracy and simplicity over asymptotics.

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace geoint {

using Vector = std::vector<double>;
using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Dense row-major real matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    Vector column(std::size_t j) const;

    std::span<const double> data() const noexcept { return data_; }

    Matrix transpose() const;
    double max_abs() const noexcept;
    double frobenius_norm() const noexcept;
    double inf_norm() const noexcept;
    double trace() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Vector operator*(const Matrix& a, std::span<const double> x);

double inf_norm(std::span<const double> v) noexcept;
double inf_norm(std::span<const Complex> v) noexcept;
double dot(std::span<const double> a, std::span<const double> b);

/// Solves A x = b by LU with partial pivoting. Throws SingularMatrix when a
/// pivot falls below 1e-14 times the largest entry of A.
Vector solve_dense(Matrix a, std::span<const double> b);

struct SymmetricEigen {
    Vector values;   // ascending
    Matrix vectors;  // column k is the unit eigenvector of values[k]
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// 1e-13 ||A||_F. Throws NotSymmetric / NoConvergence (100 sweeps).
SymmetricEigen sym_eigen(const Matrix& a);
Vector sym_eigenvalues(const Matrix& a);

struct Svd {
    Matrix u;      // rows x k, orthonormal columns
    Vector sigma;  // k = min(rows, cols), descending, nonnegative
    Matrix v;      // cols x k, orthonormal columns
};

/// One-sided (Hestenes) Jacobi SVD for matrices up to 64 x 64.
Svd svd_small(const Matrix& a);

/// Unit right singular vector belonging to the smallest singular value,
/// counting the structural zeros of a wide matrix. Spans the null space of a
/// rank-(cols-1) matrix.
Vector smallest_right_singular_vector(const Matrix& a);

/// Singular values of the matrix padded to at least as many rows as columns
/// (so a wide matrix reports its structural zeros), descending.
Vector padded_singular_values(const Matrix& a);

struct QuadratureRule {
    Vector nodes;    // strictly increasing
    Vector weights;  // positive, sum to 1 for the Laguerre weight

    std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point Gauss-Laguerre rule for the weight e^{-x} on [0, inf), by the
/// Golub-Welsch eigenproblem of the Jacobi matrix.
QuadratureRule gauss_laguerre(int n);

using VectorFunction = std::function<Vector(std::span<const double>)>;

/// Central-difference Jacobian, column j from f(x + h e_j) - f(x - h e_j).
Matrix fd_jacobian(const VectorFunction& f, std::span<const double> x, double h);
/// Same with h = eps^{1/3} max(1, ||x||_inf).
Matrix fd_jacobian(const VectorFunction& f, std::span<const double> x);
double default_fd_step(std::span<const double> x) noexcept;

// Polynomials are stored lowest degree first.
Complex poly_eval(std::span<const Complex> coeffs, Complex x) noexcept;
Complex poly_derivative(std::span<const Complex> coeffs, Complex x) noexcept;

/// Roots of a complex polynomial as eigenvalues of its companion matrix
/// (shifted complex QR on the Hessenberg form). Leading zero coefficients are
/// trimmed; a constant polynomial has no roots.
ComplexVector polynomial_roots(std::span<const Complex> coeffs);

}  // namespace geoint
