#include "qiforest/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qiforest/svd.hpp"

namespace qiforest {

std::string to_string(LearnerKind kind) {
    return kind == LearnerKind::tree ? "tree" : "linear";
}

LearnerKind learner_kind_from_string(const std::string& name) {
    if (name == "tree") return LearnerKind::tree;
    if (name == "linear") return LearnerKind::linear;
    throw InvalidInput("unknown learner kind: " + name);
}

namespace {

struct SplitChoice {
    double improvement = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

// Best (feature, threshold) over the node's samples, or feature = -1 when
// nothing reduces the squared error. columns holds the subset columns.
SplitChoice find_best_split(const Matrix& columns, const Vector& y,
                            const std::vector<std::size_t>& samples) {
    const std::size_t count = samples.size();
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t s : samples) {
        sum += y[s];
        sum_sq += y[s] * y[s];
    }
    const double parent_sse = sum_sq - sum * sum / static_cast<double>(count);

    SplitChoice best;
    std::vector<std::pair<double, double>> ordered(count);  // (feature value, target)
    Vector suffix_sum(count + 1, 0.0), suffix_sq(count + 1, 0.0);
    for (std::size_t f = 0; f < columns.cols(); ++f) {
        for (std::size_t i = 0; i < count; ++i) {
            ordered[i] = {columns(samples[i], f), y[samples[i]]};
        }
        std::sort(ordered.begin(), ordered.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        // Right-side stats accumulate from the top instead of subtracting
        // from the parent totals, so partitions that coincide across
        // features score bitwise-identically and ties stay exact.
        for (std::size_t i = count; i-- > 0;) {
            suffix_sum[i] = suffix_sum[i + 1] + ordered[i].second;
            suffix_sq[i] = suffix_sq[i + 1] + ordered[i].second * ordered[i].second;
        }

        double left_sum = 0.0, left_sq = 0.0;
        for (std::size_t i = 0; i + 1 < count; ++i) {
            left_sum += ordered[i].second;
            left_sq += ordered[i].second * ordered[i].second;
            if (!(ordered[i].first < ordered[i + 1].first)) continue;

            const double left_cnt = static_cast<double>(i + 1);
            const double right_cnt = static_cast<double>(count - i - 1);
            const double child_sse = (left_sq - left_sum * left_sum / left_cnt) +
                                     (suffix_sq[i + 1] - suffix_sum[i + 1] * suffix_sum[i + 1] / right_cnt);
            const double improvement = parent_sse - child_sse;
            if (improvement > best.improvement) {
                best.improvement = improvement;
                best.feature = static_cast<int>(f);
                best.threshold = 0.5 * (ordered[i].first + ordered[i + 1].first);
            }
        }
    }
    return best;
}

int grow(RegressionTree& tree, const Matrix& columns, const Vector& y,
         std::vector<std::size_t>&& samples) {
    double sum = 0.0;
    double lo = y[samples.front()], hi = lo;
    for (std::size_t s : samples) {
        sum += y[s];
        lo = std::min(lo, y[s]);
        hi = std::max(hi, y[s]);
    }
    const double mean = sum / static_cast<double>(samples.size());

    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    if (lo == hi) {  // pure node
        tree.nodes[node_id].value = mean;
        return node_id;
    }

    const SplitChoice split = find_best_split(columns, y, samples);
    if (split.feature < 0) {
        tree.nodes[node_id].value = mean;
        return node_id;
    }

    std::vector<std::size_t> left_samples, right_samples;
    for (std::size_t s : samples) {
        if (columns(s, static_cast<std::size_t>(split.feature)) <= split.threshold) {
            left_samples.push_back(s);
        } else {
            right_samples.push_back(s);
        }
    }
    samples.clear();
    samples.shrink_to_fit();

    tree.nodes[node_id].feature = split.feature;
    tree.nodes[node_id].threshold = split.threshold;
    const int left_id = grow(tree, columns, y, std::move(left_samples));
    const int right_id = grow(tree, columns, y, std::move(right_samples));
    tree.nodes[node_id].left = left_id;
    tree.nodes[node_id].right = right_id;
    return node_id;
}

}  // namespace

TrainedLearner train_tree(const Matrix& x, const Vector& y, const FeatureSubset& subset) {
    if (subset.indices.empty()) throw InvalidInput("train_tree: empty feature subset");
    if (x.rows() == 0) throw InvalidInput("train_tree: no samples");
    if (x.rows() != y.size()) throw InvalidInput("train_tree: row count != target length");

    const Matrix columns = gather_columns(x, subset.indices);
    TrainedLearner learner;
    learner.kind = LearnerKind::tree;
    learner.subset = subset;

    RegressionTree tree;
    std::vector<std::size_t> all(x.rows());
    std::iota(all.begin(), all.end(), 0);
    grow(tree, columns, y, std::move(all));
    learner.model = std::move(tree);
    return learner;
}

TrainedLearner train_linear(const Matrix& x, const Vector& y, const FeatureSubset& subset) {
    if (subset.indices.empty()) throw InvalidInput("train_linear: empty feature subset");
    if (x.rows() == 0) throw InvalidInput("train_linear: no samples");
    if (x.rows() != y.size()) throw InvalidInput("train_linear: row count != target length");

    const std::size_t n = x.rows();
    const std::size_t k = subset.indices.size();
    Matrix columns = gather_columns(x, subset.indices);

    Vector feature_means = column_means(columns);
    double y_mean = 0.0;
    for (double v : y) y_mean += v;
    y_mean /= static_cast<double>(n);

    Matrix centered(n, k);
    Vector centered_y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) centered(i, j) = columns(i, j) - feature_means[j];
        centered_y[i] = y[i] - y_mean;
    }

    LinearModel model;
    model.weights = ols_solve(centered, centered_y);
    double offset = 0.0;
    for (std::size_t j = 0; j < k; ++j) offset += model.weights[j] * feature_means[j];
    model.intercept = y_mean - offset;

    TrainedLearner learner;
    learner.kind = LearnerKind::linear;
    learner.subset = subset;
    learner.model = std::move(model);
    return learner;
}

double predict(const TrainedLearner& learner, std::span<const double> row) {
    for (std::size_t idx : learner.subset.indices) {
        if (idx >= row.size()) throw InvalidInput("predict: row shorter than feature subset");
    }

    if (learner.kind == LearnerKind::tree) {
        const auto& tree = std::get<RegressionTree>(learner.model);
        const auto* node = &tree.nodes.front();
        while (!node->is_leaf()) {
            const std::size_t global = learner.subset.indices[static_cast<std::size_t>(node->feature)];
            node = &tree.nodes[static_cast<std::size_t>(row[global] <= node->threshold ? node->left
                                                                                       : node->right)];
        }
        return node->value;
    }

    const auto& linear = std::get<LinearModel>(learner.model);
    double acc = linear.intercept;
    for (std::size_t j = 0; j < learner.subset.indices.size(); ++j) {
        acc += linear.weights[j] * row[learner.subset.indices[j]];
    }
    return acc;
}

}  // namespace qiforest
