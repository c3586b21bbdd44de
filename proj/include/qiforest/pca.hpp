#pragma once

#include "qiforest/matrix.hpp"

namespace qiforest {

// Full-rank PCA: an orthogonal change of basis, never a projection. The
// rotation keeps all m directions (completed to an orthonormal basis when
// the data is rank-deficient), so transforming is lossless.
struct PcaModel {
    Matrix rotation;         // m x m, columns are principal directions
    Vector singular_values;  // m, descending, zero beyond the data rank
    Vector column_means;     // m

    bool operator==(const PcaModel&) const = default;
};

// Centers columns, decomposes, and completes the rotation. Requires n >= 2.
PcaModel pca_fit(const Matrix& x);

// (x - column_means) * rotation. Output has the same shape as the input.
Matrix pca_transform(const PcaModel& model, const Matrix& x);

}  // namespace qiforest
