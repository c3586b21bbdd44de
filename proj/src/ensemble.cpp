#include "qiforest/ensemble.hpp"

#include <cmath>

#include "qiforest/digest.hpp"

namespace qiforest {

std::size_t subset_size(double alpha, std::size_t feature_count) {
    if (!(alpha > 0.0) || alpha > 1.0) throw InvalidInput("subset_size: alpha must be in (0, 1]");
    const auto k = static_cast<std::size_t>(std::lround(alpha * static_cast<double>(feature_count)));
    return std::min(std::max<std::size_t>(k, 1), feature_count);
}

namespace {

void validate_config(const EnsembleConfig& config) {
    if (config.ensemble_size == 0) throw InvalidInput("ensemble: ensemble_size must be >= 1");
    if (!(config.alpha > 0.0) || config.alpha > 1.0) {
        throw InvalidInput("ensemble: alpha must be in (0, 1]");
    }
}

}  // namespace

EnsembleModel train_forest(const Matrix& x, const Vector& y, const EnsembleConfig& config,
                           const PcaModel* pretrained_pca, Exec exec) {
    validate_config(config);
    if (x.rows() != y.size()) throw InvalidInput("train_forest: row count != target length");
    require_finite(x, "train_forest");
    require_finite(std::span(y), "train_forest");

    EnsembleModel model;
    model.config = config;
    model.pca = pretrained_pca ? *pretrained_pca : pca_fit(x);

    const Matrix transformed = pca_transform(model.pca, x);
    const std::size_t n = transformed.rows();
    const std::size_t m = transformed.cols();
    const std::size_t k = subset_size(config.alpha, m);
    const std::size_t t = config.ensemble_size;

    // Subsets come from the full training sample, amplitudes and all,
    // before any bootstrap draw.
    const std::vector<FeatureSubset> subsets =
        generate_subsets(transformed, y, t, k, config.subset_mode, config.seed, exec);

    model.learners.resize(t);
    std::vector<std::uint64_t> draw_digests(t, 0);

    parallel_for(t, exec, [&](std::size_t i) {
        std::vector<std::size_t> rows(n);
        if (config.bootstrap) {
            Rng rng = Rng::derive(config.seed, {stream::bootstrap, i});
            for (std::size_t r = 0; r < n; ++r) rows[r] = rng.uniform_index(n);
        } else {
            for (std::size_t r = 0; r < n; ++r) rows[r] = r;
        }
        draw_digests[i] = fnv1a(std::span<const std::size_t>(rows));

        const Matrix sample_x = gather_rows(transformed, rows);
        Vector sample_y(n);
        for (std::size_t r = 0; r < n; ++r) sample_y[r] = y[rows[r]];

        model.learners[i] = config.learner_kind == LearnerKind::tree
                                ? train_tree(sample_x, sample_y, subsets[i])
                                : train_linear(sample_x, sample_y, subsets[i]);
    });

    std::uint64_t digest = 0xcbf29ce484222325ULL;
    for (std::uint64_t d : draw_digests) {
        digest ^= d;
        digest *= 0x100000001b3ULL;
    }
    model.bootstrap_digest = digest;
    return model;
}

EnsembleModel train_random_forest(const Matrix& x, const Vector& y, const EnsembleConfig& config,
                                  const PcaModel* pretrained_pca, Exec exec) {
    if (config.subset_mode != SubsetMode::uniform) {
        throw InvalidInput("train_random_forest: subset_mode must be uniform");
    }
    return train_forest(x, y, config, pretrained_pca, exec);
}

EnsembleModel train_qi_forest(const Matrix& x, const Vector& y, const EnsembleConfig& config,
                              const PcaModel* pretrained_pca, Exec exec) {
    if (config.subset_mode == SubsetMode::uniform) {
        throw InvalidInput("train_qi_forest: subset_mode must be fraction_only or fraction_transition");
    }
    return train_forest(x, y, config, pretrained_pca, exec);
}

Vector predict_ensemble(const EnsembleModel& model, const Matrix& x, Exec exec) {
    const Matrix transformed = pca_transform(model.pca, x);
    const std::size_t t = model.learners.size();

    Vector out(transformed.rows(), 0.0);
    parallel_for(transformed.rows(), exec, [&](std::size_t row) {
        double acc = 0.0;
        for (const TrainedLearner& learner : model.learners) {
            acc += predict(learner, transformed.row(row));
        }
        out[row] = acc / static_cast<double>(t);
    });
    return out;
}

Matrix learner_predictions(const EnsembleModel& model, const Matrix& x, Exec exec) {
    const Matrix transformed = pca_transform(model.pca, x);
    Matrix preds(model.learners.size(), transformed.rows());
    parallel_for(model.learners.size(), exec, [&](std::size_t i) {
        auto row = preds.row(i);
        for (std::size_t j = 0; j < transformed.rows(); ++j) {
            row[j] = predict(model.learners[i], transformed.row(j));
        }
    });
    return preds;
}

double mse(const Vector& predictions, const Vector& truth) {
    if (predictions.size() != truth.size()) throw InvalidInput("mse: length mismatch");
    if (predictions.empty()) throw InvalidInput("mse: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - truth[i];
        acc += d * d;
    }
    return acc / static_cast<double>(predictions.size());
}

}  // namespace qiforest
