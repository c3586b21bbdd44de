#include "qiforest/pca.hpp"

#include <cmath>

#include "qiforest/svd.hpp"

namespace qiforest {

namespace {

// Extends r orthonormal columns to a full m-column orthonormal basis by
// orthogonalizing standard basis vectors, largest residual first.
void complete_basis(Matrix& basis, std::size_t filled) {
    const std::size_t m = basis.rows();
    std::vector<bool> used(m, false);
    while (filled < m) {
        std::size_t best_axis = m;
        double best_norm = -1.0;
        Vector best_residual;
        for (std::size_t axis = 0; axis < m; ++axis) {
            if (used[axis]) continue;
            Vector residual(m, 0.0);
            residual[axis] = 1.0;
            // Two Gram-Schmidt passes keep orthogonality near machine epsilon.
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t j = 0; j < filled; ++j) {
                    double proj = 0.0;
                    for (std::size_t i = 0; i < m; ++i) proj += residual[i] * basis(i, j);
                    for (std::size_t i = 0; i < m; ++i) residual[i] -= proj * basis(i, j);
                }
            }
            double norm = 0.0;
            for (double v : residual) norm += v * v;
            norm = std::sqrt(norm);
            if (norm > best_norm) {
                best_norm = norm;
                best_axis = axis;
                best_residual = std::move(residual);
            }
        }
        used[best_axis] = true;
        for (std::size_t i = 0; i < m; ++i) basis(i, filled) = best_residual[i] / best_norm;
        ++filled;
    }
}

}  // namespace

PcaModel pca_fit(const Matrix& x) {
    if (x.rows() < 2) throw InvalidInput("pca_fit: need at least 2 samples");
    require_finite(x, "pca_fit");

    const std::size_t m = x.cols();
    PcaModel model;
    model.column_means = column_means(x);

    Matrix centered(x.rows(), m);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < m; ++j) centered(i, j) = x(i, j) - model.column_means[j];
    }

    const SvdResult dec = svd(centered);

    model.singular_values.assign(m, 0.0);
    for (std::size_t k = 0; k < dec.rank(); ++k) model.singular_values[k] = dec.s[k];

    model.rotation = Matrix(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < dec.rank(); ++k) model.rotation(i, k) = dec.v(i, k);
    }
    complete_basis(model.rotation, dec.rank());
    return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& x) {
    const std::size_t m = model.rotation.rows();
    if (x.cols() != m) throw InvalidInput("pca_transform: column count mismatch");
    require_finite(x, "pca_transform");

    Matrix out(x.rows(), m);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                acc += (x(i, j) - model.column_means[j]) * model.rotation(j, k);
            }
            out(i, k) = acc;
        }
    }
    return out;
}

}  // namespace qiforest
