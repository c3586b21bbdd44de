#pragma once

#include <cstdint>
#include <string>

#include "qiforest/matrix.hpp"
#include "qiforest/parallel.hpp"
#include "qiforest/rng.hpp"

namespace qiforest {

// How selection probabilities over transformed features are formed:
//   fraction_transition — p_k ∝ s_k^2 t_k^2 (component energy times squared
//                         regression amplitude)
//   fraction_only       — p_k ∝ s_k^2
//   uniform             — p_k = 1/m (plain random subspace)
enum class SubsetMode { fraction_transition, fraction_only, uniform };

std::string to_string(SubsetMode mode);
SubsetMode subset_mode_from_string(const std::string& name);

struct SubspaceWeights {
    Vector p;  // nonnegative, sums to 1
    SubsetMode mode = SubsetMode::uniform;
};

// Distinct feature indices, stored sorted ascending.
struct FeatureSubset {
    std::vector<std::size_t> indices;

    bool operator==(const FeatureSubset&) const = default;
};

SubspaceWeights uniform_weights(std::size_t m);

// p_k = s_k^2 / sum s_i^2. Throws DegenerateData when every value is zero.
SubspaceWeights fraction_probabilities(const Vector& singular_values);

// OLS coefficients of the transformed data against the target.
Vector transition_amplitudes(const Matrix& x_transformed, const Vector& y);

// p_k = s_k^2 t_k^2 / sum s_i^2 t_i^2. Throws DegenerateData when every
// product vanishes; callers fall back to fraction_probabilities.
SubspaceWeights fraction_transition_probabilities(const Vector& singular_values,
                                                  const Vector& amplitudes);

// Weights for the requested mode with the degeneracy fallback ladder
// fraction_transition -> fraction_only -> uniform. Never throws on a legal
// dataset (a constant target simply drops to the next rung).
SubspaceWeights compute_weights(const Matrix& x_transformed, const Vector& y, SubsetMode mode);

// Sequential weighted sampling without replacement: draw one index in
// proportion to the current weights, zero it, renormalize, repeat. Indices
// with zero weight are drawn (uniformly) only after every positive-weight
// index is taken.
FeatureSubset sample_subset(const SubspaceWeights& weights, std::size_t k, Rng& rng);

// t_ensemble independent subsets of size k. Weights are computed once from
// the full (non-bootstrapped) training data; each subset uses a child
// stream keyed by its index, so generation order and thread count cannot
// change the result.
std::vector<FeatureSubset> generate_subsets(const Matrix& x_transformed, const Vector& y,
                                            std::size_t t_ensemble, std::size_t k,
                                            SubsetMode mode, std::uint64_t seed,
                                            Exec exec = Exec::parallel);

}  // namespace qiforest
