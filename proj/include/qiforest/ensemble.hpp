#pragma once

#include <cstdint>

#include "qiforest/learners.hpp"
#include "qiforest/parallel.hpp"
#include "qiforest/pca.hpp"

namespace qiforest {

struct EnsembleConfig {
    std::size_t ensemble_size = 30;
    double alpha = 0.5;  // subset size fraction, in (0, 1]
    LearnerKind learner_kind = LearnerKind::tree;
    SubsetMode subset_mode = SubsetMode::uniform;
    bool bootstrap = true;
    std::uint64_t seed = 0;

    bool operator==(const EnsembleConfig&) const = default;
};

struct EnsembleModel {
    std::vector<TrainedLearner> learners;
    PcaModel pca;
    EnsembleConfig config;
    // FNV digest of the bootstrap row draws, in learner order. Two models
    // trained from the same seed share it regardless of subset scheme.
    std::uint64_t bootstrap_digest = 0;

    bool operator==(const EnsembleModel&) const = default;
};

// round(alpha * m) clamped to [1, m].
std::size_t subset_size(double alpha, std::size_t feature_count);

// Shared training path: fit (or adopt) the PCA basis, transform, draw one
// feature subset and one bootstrap sample per learner, train. Per-learner
// random streams are derived from config.seed and the learner index, so
// the model is identical for any thread count. Pass a pretrained PCA model
// to reuse an existing basis instead of fitting on x.
EnsembleModel train_forest(const Matrix& x, const Vector& y, const EnsembleConfig& config,
                           const PcaModel* pretrained_pca = nullptr,
                           Exec exec = Exec::parallel);

// Baseline: uniform random subspace. Rejects other subset modes.
EnsembleModel train_random_forest(const Matrix& x, const Vector& y, const EnsembleConfig& config,
                                  const PcaModel* pretrained_pca = nullptr,
                                  Exec exec = Exec::parallel);

// Weighted subspace variant; identical to the baseline except for how
// subsets are drawn. Rejects uniform mode.
EnsembleModel train_qi_forest(const Matrix& x, const Vector& y, const EnsembleConfig& config,
                              const PcaModel* pretrained_pca = nullptr,
                              Exec exec = Exec::parallel);

// Simple-averaging prediction over the stored learners.
Vector predict_ensemble(const EnsembleModel& model, const Matrix& x, Exec exec = Exec::parallel);

// Per-learner predictions, one row per learner, one column per sample.
Matrix learner_predictions(const EnsembleModel& model, const Matrix& x,
                           Exec exec = Exec::parallel);

double mse(const Vector& predictions, const Vector& truth);

}  // namespace qiforest
