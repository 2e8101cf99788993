#pragma once

#include <cstddef>
#include <vector>

namespace chawkes {

// Dense row-major matrix. Model dimensions stay small (a handful of marks),
// so everything here is plain O(n^3) with no blocking.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool operator==(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

// max_i sum_j |a_ij|
double inf_norm(const Matrix& a);

// Solves a x = b by Gaussian elimination with partial pivoting.
// Throws std::invalid_argument on shape mismatch, std::runtime_error if singular.
std::vector<double> solve_linear(Matrix a, std::vector<double> b);

// Perron root of an entrywise non-negative matrix, computed by repeated
// squaring of the normalized matrix: rho = lim ||A^(2^k)||^(2^-k). Converges
// for every non-negative matrix (reducible and defective included) because
// the powers involve no cancellation. Relative accuracy ~1e-13.
double spectral_radius(const Matrix& a);

// Smallest singular value via cyclic Jacobi on A^T A.
double min_singular_value(const Matrix& a);

} // namespace chawkes
