#include "chawkes/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chawkes {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("multiply: shape mismatch");
    Matrix c(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                c(i, j) += aik * b(k, j);
            }
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

double inf_norm(const Matrix& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) row += std::abs(a(i, j));
        best = std::max(best, row);
    }
    return best;
}

std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve_linear: shape mismatch");

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > best) {
                best = std::abs(a(r, col));
                pivot = r;
            }
        }
        if (best == 0.0) throw std::runtime_error("solve_linear: singular matrix");
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            a(r, col) = 0.0;
            for (std::size_t j = col + 1; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }

    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

double spectral_radius(const Matrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("spectral_radius: matrix not square");
    for (double v : a.data()) {
        if (!(v >= 0.0)) throw std::invalid_argument("spectral_radius: negative or NaN entry");
    }
    if (n == 0) return 0.0;

    double s0 = inf_norm(a);
    if (s0 == 0.0) return 0.0;

    Matrix m(n, n);
    for (std::size_t i = 0; i < n * n; ++i) m.data()[i] = a.data()[i] / s0;

    // a^(2^k) = m * exp(log_scale); estimate log(rho) = log_scale / 2^k.
    double log_scale = std::log(s0);
    double prev = log_scale;
    double denom = 1.0;
    for (int k = 1; k <= 64; ++k) {
        m = multiply(m, m);
        const double s = inf_norm(m);
        if (s == 0.0) return 0.0; // nilpotent
        for (double& v : m.data()) v /= s;
        denom *= 2.0;
        log_scale = 2.0 * log_scale + std::log(s);
        const double est = log_scale / denom;
        if (k > 4 && std::abs(est - prev) <= 1e-15 * std::max(1.0, std::abs(est))) {
            return std::exp(est);
        }
        prev = est;
    }
    return std::exp(prev);
}

double min_singular_value(const Matrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("min_singular_value: matrix not square");
    if (n == 0) return 0.0;

    Matrix g = multiply(transpose(a), a);

    // Cyclic Jacobi sweeps on the symmetric Gram matrix.
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += g(i, j) * g(i, j);
        double diag = 0.0;
        for (std::size_t i = 0; i < n; ++i) diag += g(i, i) * g(i, i);
        if (off <= 1e-30 * std::max(diag, 1e-300)) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double gpq = g(p, q);
                if (gpq == 0.0) continue;
                const double theta = (g(q, q) - g(p, p)) / (2.0 * gpq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double gkp = g(k, p);
                    const double gkq = g(k, q);
                    g(k, p) = c * gkp - s * gkq;
                    g(k, q) = s * gkp + c * gkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double gpk = g(p, k);
                    const double gqk = g(q, k);
                    g(p, k) = c * gpk - s * gqk;
                    g(q, k) = s * gpk + c * gqk;
                }
            }
        }
    }

    double lo = g(0, 0);
    for (std::size_t i = 1; i < n; ++i) lo = std::min(lo, g(i, i));
    return std::sqrt(std::max(lo, 0.0));
}

} // namespace chawkes
