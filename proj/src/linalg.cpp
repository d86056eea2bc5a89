#include "ifsdim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ifsdim/error.hpp"

namespace ifsdim {

Matrix::Matrix(std::size_t n, std::vector<double> row_major) : n_(n), a_(std::move(row_major)) {
    if (a_.size() != n * n)
        throw Error(ErrorKind::DimensionMismatch, "matrix data length " + std::to_string(a_.size()) +
                                                      " does not match " + std::to_string(n) + "x" +
                                                      std::to_string(n));
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) : n_(rows.size()) {
    a_.reserve(n_ * n_);
    for (const auto& r : rows) {
        if (r.size() != n_) throw Error(ErrorKind::DimensionMismatch, "matrix rows must form a square");
        a_.insert(a_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) { return scalar(n, 1.0); }

Matrix Matrix::scalar(std::size_t n, double s) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = s;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
    Matrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double Matrix::frobenius() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

static void require_same(std::size_t a, std::size_t b) {
    if (a != b)
        throw Error(ErrorKind::DimensionMismatch,
                    "dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    require_same(a.size(), b.size());
    const std::size_t n = a.size();
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

template <class Op>
static Matrix elementwise(const Matrix& a, const Matrix& b, Op op) {
    require_same(a.size(), b.size());
    std::vector<double> out(a.data().size());
    std::transform(a.data().begin(), a.data().end(), b.data().begin(), out.begin(), op);
    return Matrix(a.size(), std::move(out));
}

Matrix operator+(const Matrix& a, const Matrix& b) { return elementwise(a, b, std::plus<>{}); }
Matrix operator-(const Matrix& a, const Matrix& b) { return elementwise(a, b, std::minus<>{}); }

Matrix operator*(double s, const Matrix& a) {
    std::vector<double> out(a.data());
    for (double& v : out) v *= s;
    return Matrix(a.size(), std::move(out));
}

Vector operator*(const Matrix& a, std::span<const double> x) {
    require_same(a.size(), x.size());
    Vector y(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

Vector operator+(std::span<const double> a, std::span<const double> b) {
    require_same(a.size(), b.size());
    Vector c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    return c;
}

Vector operator-(std::span<const double> a, std::span<const double> b) {
    require_same(a.size(), b.size());
    Vector c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
    return c;
}

double dot(std::span<const double> a, std::span<const double> b) {
    require_same(a.size(), b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

namespace {

// In-place LU with partial pivoting; returns permutation sign, or 0 when singular.
int lu_decompose(Matrix& a, std::vector<std::size_t>& perm, double pivot_tol) {
    const std::size_t n = a.size();
    double scale = 0.0;
    for (double v : a.data()) scale = std::max(scale, std::abs(v));
    perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    int sign = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (std::abs(a(p, k)) <= pivot_tol * std::max(scale, 1.0)) return 0;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(perm[k], perm[p]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            a(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return sign;
}

}  // namespace

double determinant(const Matrix& a) {
    const std::size_t n = a.size();
    if (n == 1) return a(0, 0);
    if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    Matrix lu = a;
    std::vector<std::size_t> perm;
    const int sign = lu_decompose(lu, perm, 0.0);
    if (sign == 0) return 0.0;
    double d = sign;
    for (std::size_t i = 0; i < n; ++i) d *= lu(i, i);
    return d;
}

Vector solve(const Matrix& a, std::span<const double> b, double pivot_tol) {
    require_same(a.size(), b.size());
    const std::size_t n = a.size();
    Matrix lu = a;
    std::vector<std::size_t> perm;
    if (lu_decompose(lu, perm, pivot_tol) == 0) throw Error(ErrorKind::Singular, "matrix is singular");
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[perm[i]];
        for (std::size_t j = 0; j < i; ++j) s -= lu(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= lu(i, j) * x[j];
        x[i] = s / lu(i, i);
    }
    return x;
}

Matrix inverse(const Matrix& a) {
    const std::size_t n = a.size();
    Matrix inv(n);
    Vector e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        const Vector col = solve(a, e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

Vector singular_values(const Matrix& a) {
    const std::size_t n = a.size();
    if (n == 0) return {};
    if (n == 1) return {std::abs(a(0, 0))};
    if (n == 2) {
        // sigma_max^2 = (F + sqrt(F^2 - 4 det^2)) / 2; sigma_min from the determinant to avoid cancellation
        const double f = a(0, 0) * a(0, 0) + a(0, 1) * a(0, 1) + a(1, 0) * a(1, 0) + a(1, 1) * a(1, 1);
        const double d = std::abs(determinant(a));
        const double disc = std::sqrt(std::max(0.0, (f - 2 * d) * (f + 2 * d)));
        const double smax = std::sqrt((f + disc) / 2);
        return {smax, smax > 0 ? d / smax : 0.0};
    }

    // Hestenes one-sided Jacobi on the columns of a copy.
    Matrix u = a;
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0, beta = 0, gamma = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    alpha += u(i, p) * u(i, p);
                    beta += u(i, q) * u(i, q);
                    gamma += u(i, p) * u(i, q);
                }
                if (gamma == 0.0) continue;
                off = std::max(off, std::abs(gamma) / std::sqrt(alpha * beta));
                const double zeta = (beta - alpha) / (2 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1 + zeta * zeta));
                const double c = 1 / std::sqrt(1 + t * t), s = c * t;
                for (std::size_t i = 0; i < n; ++i) {
                    const double up = u(i, p), uq = u(i, q);
                    u(i, p) = c * up - s * uq;
                    u(i, q) = s * up + c * uq;
                }
            }
        if (off < 1e-15) break;
    }
    Vector sv(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += u(i, j) * u(i, j);
        sv[j] = std::sqrt(s);
    }
    std::sort(sv.begin(), sv.end(), std::greater<>{});
    return sv;
}

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid_argument";
        case ErrorKind::DimensionMismatch: return "dimension_mismatch";
        case ErrorKind::Singular: return "singular";
        case ErrorKind::NoFixedPoint: return "no_fixed_point";
        case ErrorKind::NotSimilarity: return "not_similarity";
        case ErrorKind::TooLarge: return "too_large";
        case ErrorKind::NonPlanar: return "non_planar";
        case ErrorKind::GuardRefusal: return "guard_refusal";
        case ErrorKind::NoRoot: return "no_root";
        case ErrorKind::MultipleRoots: return "multiple_roots";
        case ErrorKind::NotContractive: return "not_contractive";
        case ErrorKind::Divergence: return "divergence";
        case ErrorKind::Degenerate: return "degenerate";
        case ErrorKind::EmptyOverlap: return "empty_overlap";
        case ErrorKind::HypothesisNotMet: return "hypothesis_not_met";
        case ErrorKind::Config: return "config";
    }
    return "unknown";
}

}  // namespace ifsdim
