#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qiforest/common.hpp"

namespace qiforest {

using Vector = std::vector<double>;

// Dense row-major matrix: rows are samples, columns are features.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix from_rows(const std::vector<Vector>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix& other) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

bool all_finite(std::span<const double> values);
bool all_finite(const Matrix& m);

// Throws InvalidInput when m contains NaN or infinity.
void require_finite(const Matrix& m, const char* what);
void require_finite(std::span<const double> values, const char* what);

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, std::span<const double> x);

// y = a^T x without forming the transpose.
Vector transposed_matvec(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double frobenius_norm(const Matrix& a);

Vector column_means(const Matrix& a);

// Diagonal of a^T a: per-column sum of squares.
Vector column_energies(const Matrix& a);

Matrix gather_rows(const Matrix& a, std::span<const std::size_t> row_indices);
Matrix gather_columns(const Matrix& a, std::span<const std::size_t> col_indices);

}  // namespace qiforest
