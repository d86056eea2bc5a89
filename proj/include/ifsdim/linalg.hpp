#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ifsdim {

using Vector = std::vector<double>;

// Small dense square matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}
    Matrix(std::size_t n, std::vector<double> row_major);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> d);
    static Matrix scalar(std::size_t n, double s);

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    const std::vector<double>& data() const noexcept { return a_; }

    Matrix transpose() const;
    double trace() const;
    double frobenius() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vector operator*(const Matrix& a, std::span<const double> x);

Vector operator+(std::span<const double> a, std::span<const double> b);
Vector operator-(std::span<const double> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

double determinant(const Matrix& a);
// Gaussian elimination with partial pivoting. Throws Singular when a pivot
// falls below pivot_tol times the largest entry of the matrix.
Vector solve(const Matrix& a, std::span<const double> b, double pivot_tol = 1e-12);
Matrix inverse(const Matrix& a);

// Descending singular values. Closed form for 2x2, one-sided Jacobi otherwise.
Vector singular_values(const Matrix& a);

}  // namespace ifsdim
