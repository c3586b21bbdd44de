#pragma once

#include "qiforest/matrix.hpp"

namespace qiforest {

// Thin singular value decomposition x = u * diag(s) * v^T, truncated to the
// numerical rank r (singular values above 1e-12 relative to the largest).
// u is n x r and v is m x r, both column-orthonormal; s is descending.
struct SvdResult {
    Matrix u;
    Vector s;
    Matrix v;

    std::size_t rank() const { return s.size(); }
};

// Relative cutoff below which a singular value counts as zero.
inline constexpr double kSvdRankTol = 1e-12;

// Golub-Kahan-Reinsch SVD (Householder bidiagonalization + implicit-shift
// QR). Signs are canonicalized so each right singular vector's largest-
// magnitude entry is positive.
SvdResult svd(const Matrix& x);

// Minimum-norm least-squares solution of x * w = y via the SVD
// pseudoinverse. Rank-deficient systems are handled without failing.
Vector ols_solve(const Matrix& x, const Vector& y);

}  // namespace qiforest
