#include "qiforest/matrix.hpp"

#include <cmath>
#include <string>

namespace qiforest {

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) {
            throw InvalidInput("from_rows: ragged row " + std::to_string(i));
        }
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

bool all_finite(std::span<const double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

bool all_finite(const Matrix& m) { return all_finite(std::span(m.data())); }

void require_finite(const Matrix& m, const char* what) {
    if (!all_finite(m)) throw InvalidInput(std::string(what) + ": non-finite entries");
}

void require_finite(std::span<const double> values, const char* what) {
    if (!all_finite(values)) throw InvalidInput(std::string(what) + ": non-finite entries");
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    }
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw InvalidInput("matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw InvalidInput("matvec: dimension mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

Vector transposed_matvec(const Matrix& a, std::span<const double> x) {
    if (a.rows() != x.size()) throw InvalidInput("transposed_matvec: dimension mismatch");
    Vector y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        const auto row = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += row[j] * xi;
    }
    return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

Vector column_means(const Matrix& a) {
    Vector means(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto row = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) means[j] += row[j];
    }
    for (double& m : means) m /= static_cast<double>(a.rows());
    return means;
}

Vector column_energies(const Matrix& a) {
    Vector energy(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto row = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) energy[j] += row[j] * row[j];
    }
    return energy;
}

Matrix gather_rows(const Matrix& a, std::span<const std::size_t> row_indices) {
    Matrix out(row_indices.size(), a.cols());
    for (std::size_t i = 0; i < row_indices.size(); ++i) {
        if (row_indices[i] >= a.rows()) throw InvalidInput("gather_rows: index out of range");
        const auto src = a.row(row_indices[i]);
        auto dst = out.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) dst[j] = src[j];
    }
    return out;
}

Matrix gather_columns(const Matrix& a, std::span<const std::size_t> col_indices) {
    Matrix out(a.rows(), col_indices.size());
    for (std::size_t j = 0; j < col_indices.size(); ++j) {
        if (col_indices[j] >= a.cols()) throw InvalidInput("gather_columns: index out of range");
    }
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto src = a.row(i);
        auto dst = out.row(i);
        for (std::size_t j = 0; j < col_indices.size(); ++j) dst[j] = src[col_indices[j]];
    }
    return out;
}

}  // namespace qiforest
