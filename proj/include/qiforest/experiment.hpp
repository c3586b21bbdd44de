#pragma once

#include <optional>

#include "qiforest/dataset.hpp"
#include "qiforest/diagnostics.hpp"
#include "qiforest/ensemble.hpp"
#include "qiforest/rng.hpp"

namespace qiforest {

struct TrainTestSplit {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
};

// Random split at train_fraction; the train side is clamped to [2, n-1]
// so both sides stay usable.
TrainTestSplit split_rows(std::size_t n, double train_fraction, Rng& rng);

// Split-aware preprocessing: the target is standardized to zero mean and
// unit (population) variance using statistics from the training rows; with
// leak_statistics the statistics (and the PCA basis in shared_pca) come
// from all rows instead, mirroring pipelines that preprocess before
// splitting. Throws DegenerateData when the fitted target is constant.
struct PreparedData {
    Matrix x_train;
    Vector y_train;
    Matrix x_test;
    Vector y_test;
    double y_mean = 0.0;
    double y_scale = 1.0;
    std::optional<PcaModel> shared_pca;  // set only when leak_statistics
};

PreparedData preprocess(const Dataset& dataset, const TrainTestSplit& split,
                        bool leak_statistics = false);

struct ExperimentSpec {
    std::vector<Dataset> datasets;
    double alpha = 0.5;
    std::size_t ensemble_size = 30;
    double train_fraction = 0.6;
    std::size_t repeats = 15;
    LearnerKind learner_kind = LearnerKind::tree;
    SubsetMode treatment_mode = SubsetMode::fraction_transition;
    SubsetMode baseline_mode = SubsetMode::uniform;
    std::uint64_t master_seed = 0;
    bool leak_statistics = false;
};

struct ResultRow {
    std::string dataset;
    double treatment_mean = 0.0;
    double treatment_std = 0.0;
    double baseline_mean = 0.0;
    double baseline_std = 0.0;
    std::string verdict;  // "++", "+", "-", "--", or "=" for an exact tie
    std::string error;    // nonempty when this dataset failed

    bool operator==(const ResultRow&) const = default;
};

// Runs treatment and baseline per dataset per repeat on identical splits
// and bootstrap seeds, so any difference comes from the subset scheme
// alone. A failing dataset yields an error row; the rest proceed. Rows
// come back sorted by dataset name.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, Exec exec = Exec::parallel);

// Verdict for a (treatment, baseline) MSE comparison: "++"/"--" when the
// gap exceeds 2*sqrt(std_t^2 + std_b^2)/sqrt(repeats), "+"/"-" for any
// smaller nonzero gap, "=" for an exact tie. This convention is ours; the
// usual tables leave it undefined.
std::string verdict_for(double treatment_mean, double treatment_std, double baseline_mean,
                        double baseline_std, std::size_t repeats);

std::string format_table(const std::vector<ResultRow>& rows);

// One self-describing JSON record per row, stable field order; identical
// inputs produce byte-identical text.
std::string results_to_jsonl(const std::vector<ResultRow>& rows, const ExperimentSpec& spec);
std::vector<ResultRow> results_from_jsonl(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace qiforest
