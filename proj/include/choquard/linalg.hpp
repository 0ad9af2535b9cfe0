#pragma once

#include <cstddef>
#include <vector>

namespace choquard {

// Dense row-major matrix, just enough for the bordered Nystrom systems.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    double* row(std::size_t i) { return a_.data() + i * cols_; }
    const double* row(std::size_t i) const { return a_.data() + i * cols_; }
    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

    static Matrix identity(std::size_t n);
    Matrix transposed() const;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);

// PA = LU with partial pivoting; solves reuse the factorization.
class LuFactor {
  public:
    explicit LuFactor(Matrix a);
    std::vector<double> solve(const std::vector<double>& b) const;
    std::vector<double> solve_transposed(const std::vector<double>& b) const;
    double det_sign() const { return det_sign_; }
    double log_abs_det() const { return log_abs_det_; }

  private:
    Matrix lu_;
    std::vector<int> piv_;
    double det_sign_ = 1.0;
    double log_abs_det_ = 0.0;
};

// Largest singular value by power iteration on A^T A.
double largest_singular_value(const Matrix& a, int iters = 200);

struct SingularPairs {
    std::vector<double> sigma;            // ascending
    std::vector<std::vector<double>> right_vectors;
};

// k smallest singular values and right singular vectors via block inverse
// iteration with the LU of A, Rayleigh-Ritz refined.
SingularPairs smallest_singular_pairs(const Matrix& a, int k, int iters = 60);

// Eigen-decomposition of a small symmetric matrix (cyclic Jacobi).
void symmetric_eigen(const Matrix& a, std::vector<double>& eigvals, Matrix& eigvecs);

}  // namespace choquard
