#include "qiforest/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "qiforest/digest.hpp"

namespace qiforest {

using ordered_json = nlohmann::ordered_json;

TrainTestSplit split_rows(std::size_t n, double train_fraction, Rng& rng) {
    if (n < 3) throw InvalidInput("split_rows: need at least 3 rows");
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
        throw InvalidInput("split_rows: train_fraction must be in (0, 1)");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = rng.uniform_index(i + 1);
        std::swap(order[i], order[j]);
    }

    auto train_count = static_cast<std::size_t>(
        std::lround(train_fraction * static_cast<double>(n)));
    train_count = std::min(std::max<std::size_t>(train_count, 2), n - 1);

    TrainTestSplit split;
    split.train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_count));
    split.test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(train_count), order.end());
    return split;
}

PreparedData preprocess(const Dataset& dataset, const TrainTestSplit& split,
                        bool leak_statistics) {
    validate_dataset(dataset);
    if (split.train_rows.size() < 2 || split.test_rows.empty()) {
        throw InvalidInput("preprocess: split leaves too few rows");
    }

    PreparedData prepared;
    prepared.x_train = gather_rows(dataset.x, split.train_rows);
    prepared.x_test = gather_rows(dataset.x, split.test_rows);

    Vector y_train(split.train_rows.size());
    for (std::size_t i = 0; i < split.train_rows.size(); ++i) {
        y_train[i] = dataset.y[split.train_rows[i]];
    }
    Vector y_test(split.test_rows.size());
    for (std::size_t i = 0; i < split.test_rows.size(); ++i) {
        y_test[i] = dataset.y[split.test_rows[i]];
    }

    // Target statistics from the training rows, or from everything when the
    // caller wants split-agnostic preprocessing.
    const Vector& fit_on = leak_statistics ? dataset.y : y_train;
    double mean = 0.0;
    for (double v : fit_on) mean += v;
    mean /= static_cast<double>(fit_on.size());
    double var = 0.0;
    for (double v : fit_on) var += (v - mean) * (v - mean);
    var /= static_cast<double>(fit_on.size());
    if (!(var > 0.0)) {
        throw DegenerateData("preprocess: constant target in '" + dataset.name + "'");
    }

    prepared.y_mean = mean;
    prepared.y_scale = std::sqrt(var);
    prepared.y_train.resize(y_train.size());
    for (std::size_t i = 0; i < y_train.size(); ++i) {
        prepared.y_train[i] = (y_train[i] - mean) / prepared.y_scale;
    }
    prepared.y_test.resize(y_test.size());
    for (std::size_t i = 0; i < y_test.size(); ++i) {
        prepared.y_test[i] = (y_test[i] - mean) / prepared.y_scale;
    }

    if (leak_statistics) prepared.shared_pca = pca_fit(dataset.x);
    return prepared;
}

std::string verdict_for(double treatment_mean, double treatment_std, double baseline_mean,
                        double baseline_std, std::size_t repeats) {
    const double gap = baseline_mean - treatment_mean;  // positive: treatment better
    const double threshold =
        2.0 * std::sqrt(treatment_std * treatment_std + baseline_std * baseline_std) /
        std::sqrt(static_cast<double>(repeats));
    if (gap > threshold) return "++";
    if (gap < -threshold) return "--";
    if (gap > 0.0) return "+";
    if (gap < 0.0) return "-";
    return "=";
}

namespace {

struct Aggregate {
    double mean = 0.0;
    double std_dev = 0.0;  // sample standard deviation, n-1 denominator
};

Aggregate aggregate(const Vector& values) {
    Aggregate agg;
    for (double v : values) agg.mean += v;
    agg.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double acc = 0.0;
        for (double v : values) acc += (v - agg.mean) * (v - agg.mean);
        agg.std_dev = std::sqrt(acc / static_cast<double>(values.size() - 1));
    }
    return agg;
}

ResultRow run_dataset(const Dataset& dataset, const ExperimentSpec& spec, Exec exec) {
    ResultRow row;
    row.dataset = dataset.name;

    validate_dataset(dataset);
    const std::uint64_t name_key = fnv1a(dataset.name);

    Vector treatment_mses(spec.repeats), baseline_mses(spec.repeats);
    for (std::size_t repeat = 0; repeat < spec.repeats; ++repeat) {
        Rng split_rng = Rng::derive(spec.master_seed, {stream::split, name_key, repeat});
        const TrainTestSplit split =
            split_rows(dataset.x.rows(), spec.train_fraction, split_rng);
        const PreparedData prepared = preprocess(dataset, split, spec.leak_statistics);

        EnsembleConfig config;
        config.ensemble_size = spec.ensemble_size;
        config.alpha = spec.alpha;
        config.learner_kind = spec.learner_kind;
        config.bootstrap = true;
        config.seed = Rng::derive(spec.master_seed, {stream::model, name_key, repeat}).next_u64();

        const PcaModel* shared =
            prepared.shared_pca ? &*prepared.shared_pca : nullptr;

        EnsembleConfig treatment_config = config;
        treatment_config.subset_mode = spec.treatment_mode;
        const EnsembleModel treatment =
            train_forest(prepared.x_train, prepared.y_train, treatment_config, shared, exec);

        EnsembleConfig baseline_config = config;
        baseline_config.subset_mode = spec.baseline_mode;
        const EnsembleModel baseline =
            train_forest(prepared.x_train, prepared.y_train, baseline_config, shared, exec);

        if (treatment.bootstrap_digest != baseline.bootstrap_digest) {
            throw std::logic_error("run_experiment: bootstrap draws diverged between arms");
        }

        treatment_mses[repeat] =
            mse(predict_ensemble(treatment, prepared.x_test, exec), prepared.y_test);
        baseline_mses[repeat] =
            mse(predict_ensemble(baseline, prepared.x_test, exec), prepared.y_test);
    }

    const Aggregate t = aggregate(treatment_mses);
    const Aggregate b = aggregate(baseline_mses);
    row.treatment_mean = t.mean;
    row.treatment_std = t.std_dev;
    row.baseline_mean = b.mean;
    row.baseline_std = b.std_dev;
    row.verdict = verdict_for(t.mean, t.std_dev, b.mean, b.std_dev, spec.repeats);
    return row;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, Exec exec) {
    if (spec.datasets.empty()) throw InvalidInput("run_experiment: no datasets");
    if (spec.repeats == 0) throw InvalidInput("run_experiment: repeats must be >= 1");
    if (!(spec.train_fraction > 0.0) || !(spec.train_fraction < 1.0)) {
        throw InvalidInput("run_experiment: train_fraction must be in (0, 1)");
    }

    std::vector<ResultRow> rows;
    rows.reserve(spec.datasets.size());
    for (const Dataset& dataset : spec.datasets) {
        try {
            rows.push_back(run_dataset(dataset, spec, exec));
        } catch (const std::exception& e) {
            ResultRow failed;
            failed.dataset = dataset.name;
            failed.error = e.what();
            rows.push_back(std::move(failed));
        }
    }
    std::sort(rows.begin(), rows.end(),
              [](const ResultRow& a, const ResultRow& b) { return a.dataset < b.dataset; });
    return rows;
}

std::string format_table(const std::vector<ResultRow>& rows) {
    if (rows.empty()) throw InvalidInput("format_table: no rows");

    std::size_t name_width = 7;
    for (const ResultRow& row : rows) name_width = std::max(name_width, row.dataset.size());

    std::ostringstream out;
    out << std::left;
    out.setf(std::ios::fixed);
    out.precision(4);

    auto pad = [&](const std::string& text, std::size_t width) {
        out << text;
        for (std::size_t i = text.size(); i < width + 2; ++i) out << ' ';
    };

    pad("Dataset", name_width);
    pad("Treatment MSE", 18);
    pad("Baseline MSE", 18);
    out << "Verdict\n";
    for (std::size_t i = 0; i < name_width + 18 + 18 + 4 + 9; ++i) out << '-';
    out << '\n';

    for (const ResultRow& row : rows) {
        pad(row.dataset, name_width);
        if (!row.error.empty()) {
            out << "ERROR: " << row.error << '\n';
            continue;
        }
        std::ostringstream cell;
        cell.setf(std::ios::fixed);
        cell.precision(4);
        cell << row.treatment_mean << " +/- " << row.treatment_std;
        pad(cell.str(), 18);
        cell.str("");
        cell << row.baseline_mean << " +/- " << row.baseline_std;
        pad(cell.str(), 18);
        out << row.verdict << '\n';
    }
    return out.str();
}

std::string results_to_jsonl(const std::vector<ResultRow>& rows, const ExperimentSpec& spec) {
    std::ostringstream out;
    for (const ResultRow& row : rows) {
        ordered_json record;
        record["dataset"] = row.dataset;
        if (row.error.empty()) {
            record["treatment_mean"] = row.treatment_mean;
            record["treatment_std"] = row.treatment_std;
            record["baseline_mean"] = row.baseline_mean;
            record["baseline_std"] = row.baseline_std;
            record["verdict"] = row.verdict;
        } else {
            record["error"] = row.error;
        }
        ordered_json config;
        config["alpha"] = spec.alpha;
        config["trees"] = spec.ensemble_size;
        config["train_fraction"] = spec.train_fraction;
        config["repeats"] = spec.repeats;
        config["learner"] = to_string(spec.learner_kind);
        config["treatment_mode"] = to_string(spec.treatment_mode);
        config["baseline_mode"] = to_string(spec.baseline_mode);
        record["config"] = std::move(config);
        record["seed"] = spec.master_seed;
        out << record.dump() << '\n';
    }
    return out.str();
}

std::vector<ResultRow> results_from_jsonl(const std::string& text) {
    std::vector<ResultRow> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const ordered_json record = ordered_json::parse(line);
        ResultRow row;
        row.dataset = record.at("dataset").get<std::string>();
        if (record.contains("error")) {
            row.error = record.at("error").get<std::string>();
        } else {
            row.treatment_mean = record.at("treatment_mean").get<double>();
            row.treatment_std = record.at("treatment_std").get<double>();
            row.baseline_mean = record.at("baseline_mean").get<double>();
            row.baseline_std = record.at("baseline_std").get<double>();
            row.verdict = record.at("verdict").get<std::string>();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw IoError("write failure on " + path);
}

}  // namespace qiforest
