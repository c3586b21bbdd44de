#pragma once

#include <span>
#include <variant>

#include "qiforest/matrix.hpp"
#include "qiforest/qis.hpp"

namespace qiforest {

enum class LearnerKind { tree, linear };

std::string to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& name);

// CART regression tree stored as a flat node array; nodes[0] is the root.
// feature indexes into the learner's subset, not the full feature space.
struct RegressionTree {
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;  // leaf mean

        bool is_leaf() const { return feature < 0; }
        bool operator==(const Node&) const = default;
    };
    std::vector<Node> nodes;

    bool operator==(const RegressionTree&) const = default;
};

struct LinearModel {
    Vector weights;  // one per subset feature
    double intercept = 0.0;

    bool operator==(const LinearModel&) const = default;
};

// A base learner plus the feature subset it was restricted to. Prediction
// takes a full-dimensional row and projects onto the subset internally.
struct TrainedLearner {
    LearnerKind kind = LearnerKind::tree;
    std::variant<RegressionTree, LinearModel> model;
    FeatureSubset subset;

    bool operator==(const TrainedLearner&) const = default;
};

// Grows a tree to purity: at every node the split maximizing the squared-
// error reduction over all subset features and all midpoint thresholds is
// taken; ties go to the lowest feature index, then the lowest threshold.
// Growth stops when a node is pure or no split reduces the error.
TrainedLearner train_tree(const Matrix& x, const Vector& y, const FeatureSubset& subset);

// Minimum-norm OLS on the subset columns, fit on centered data; the
// intercept absorbs the means.
TrainedLearner train_linear(const Matrix& x, const Vector& y, const FeatureSubset& subset);

double predict(const TrainedLearner& learner, std::span<const double> row);

}  // namespace qiforest
