#pragma once

// Independent reference implementations used only by tests. Each one takes
// a deliberately different algorithmic route from the library code it
// checks: one-sided Jacobi rotations instead of bidiagonal QR for the SVD,
// explicit normal equations instead of the pseudoinverse for least squares,
// a symmetric Jacobi eigensolver for the PCA spectrum, and a brute-force
// recursive search for tree splits.

#include <vector>

#include "qiforest/learners.hpp"
#include "qiforest/matrix.hpp"

namespace oracle {

struct JacobiSvd {
    qiforest::Matrix u;   // n x min(n,m)
    qiforest::Vector s;   // descending, zeros kept
    qiforest::Matrix v;   // m x min(n,m)
};

// One-sided Jacobi (Hestenes) SVD.
JacobiSvd jacobi_svd(const qiforest::Matrix& x);

struct SymmetricEigen {
    qiforest::Vector values;  // descending
    qiforest::Matrix vectors; // columns are eigenvectors
};

// Cyclic Jacobi eigensolver for symmetric matrices.
SymmetricEigen symmetric_eigen(const qiforest::Matrix& a);

// (X^T X)^-1 X^T y by Gaussian elimination; requires full column rank.
qiforest::Vector normal_equation_solve(const qiforest::Matrix& x, const qiforest::Vector& y);

// Exhaustive-search CART with the same split definition as the library:
// midpoint thresholds, squared-error reduction, lowest feature then lowest
// threshold on ties, growth to purity.
struct BruteTree {
    struct Node {
        int feature = -1;
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;
    };
    std::vector<Node> nodes;

    double predict(std::span<const double> row) const;
};

BruteTree brute_force_tree(const qiforest::Matrix& columns, const qiforest::Vector& y);

// E[ a cos^2(t) / (a cos^2(t) + b sin^2(t)) ] over uniform t, by Simpson's
// rule; equals the expected first fraction-transition weight for two
// components with energies a and b under standard normal amplitudes.
double two_component_expectation(double energy_a, double energy_b);

}  // namespace oracle
