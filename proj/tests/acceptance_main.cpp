// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Run all criteria by default, or pass criterion numbers to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qiforest/dataset.hpp"
#include "qiforest/diagnostics.hpp"
#include "qiforest/experiment.hpp"
#include "qiforest/svd.hpp"

using namespace qiforest;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

bool close_rel(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// --- 1. decomposition identities on randomized ensembles ------------------

Outcome criterion_identities() {
    const std::size_t sizes[] = {1, 2, 5, 30};
    Rng seeds(90210);
    int checked = 0;
    for (int round = 0; round < 200; ++round) {
        const std::size_t t = sizes[round % 4];
        const LearnerKind kind = (round / 4) % 2 == 0 ? LearnerKind::tree : LearnerKind::linear;
        const std::size_t n = 40 + seeds.uniform_index(50);
        const std::size_t m = 3 + seeds.uniform_index(4);
        const Dataset ds = round % 2 == 0
                               ? make_piecewise_dataset("id", n, m, 4, 0.3, seeds.next_u64())
                               : make_linear_dataset("id", n, m, 0.3, seeds.next_u64());

        EnsembleConfig config;
        config.ensemble_size = t;
        config.alpha = 0.5;
        config.learner_kind = kind;
        config.subset_mode = SubsetMode::fraction_transition;
        config.seed = seeds.next_u64();

        const EnsembleModel model = train_qi_forest(ds.x, ds.y, config);
        const DecompositionReport r = decompose(model, ds.x, ds.y);

        const double tf = static_cast<double>(t);
        const double eq13 =
            r.avg_bias_sq + r.avg_variance / tf + (1.0 - 1.0 / tf) * r.avg_covariance;
        const double eq16 =
            r.avg_err - (1.0 - 1.0 / tf) * (r.avg_variance - r.avg_covariance);
        if (!close_rel(r.ensemble_err, r.avg_err - r.avg_ambiguity, 1e-10) ||
            !close_rel(r.ensemble_err, eq13, 1e-10) || !close_rel(r.ensemble_err, eq16, 1e-10)) {
            return {false, "identity violated on ensemble " + std::to_string(round)};
        }
        ++checked;
    }
    return {true, std::to_string(checked) + " ensembles, all three identities within 1e-10"};
}

// --- 2. oracle equivalence -------------------------------------------------

Outcome criterion_oracles() {
    Rng rng(777001);

    for (int round = 0; round < 100; ++round) {
        const std::size_t n = 15 + rng.uniform_index(20);
        const std::size_t m = 2 + rng.uniform_index(6);
        Matrix x(n, m);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) x(i, j) = rng.gaussian();
        }
        Vector y(n);
        for (double& v : y) v = rng.gaussian();

        const Vector w = ols_solve(x, y);
        const Vector ref = oracle::normal_equation_solve(x, y);
        for (std::size_t j = 0; j < m; ++j) {
            if (std::fabs(w[j] - ref[j]) > 1e-8) {
                return {false, "least-squares mismatch on instance " + std::to_string(round)};
            }
        }
    }

    FeatureSubset both;
    both.indices = {0, 1};
    for (int round = 0; round < 50; ++round) {
        Matrix x(12, 2);
        for (std::size_t i = 0; i < 12; ++i) {
            x(i, 0) = rng.gaussian();
            x(i, 1) = rng.gaussian();
        }
        Vector y(12);
        for (std::size_t i = 0; i < 12; ++i) {
            y[i] = (x(i, 0) > 0.0 ? 4.0 : -4.0) + 0.5 * rng.gaussian();
        }

        const TrainedLearner learner = train_tree(x, y, both);
        const auto& tree = std::get<RegressionTree>(learner.model);
        const oracle::BruteTree ref = oracle::brute_force_tree(x, y);
        if (tree.nodes.size() != ref.nodes.size()) {
            return {false, "tree size mismatch on instance " + std::to_string(round)};
        }
        for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
            const auto& a = tree.nodes[k];
            const auto& b = ref.nodes[k];
            const bool same = a.feature == b.feature && a.left == b.left && a.right == b.right &&
                              (a.feature < 0 ? a.value == b.value : a.threshold == b.threshold);
            if (!same) return {false, "tree node mismatch on instance " + std::to_string(round)};
        }
        for (std::size_t i = 0; i < 12; ++i) {
            if (predict(learner, x.row(i)) != ref.predict(x.row(i))) {
                return {false, "tree prediction mismatch on instance " + std::to_string(round)};
            }
        }
    }

    for (int round = 0; round < 20; ++round) {
        const std::size_t n = 10 + rng.uniform_index(40);
        const std::size_t m = 2 + rng.uniform_index(6);
        Matrix x(n, m);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) x(i, j) = rng.gaussian();
        }
        const PcaModel model = pca_fit(x);

        const Vector means = column_means(x);
        Matrix gram(m, m);
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) {
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    acc += (x(i, a) - means[a]) * (x(i, b) - means[b]);
                }
                gram(a, b) = acc;
            }
        }
        const oracle::SymmetricEigen eig = oracle::symmetric_eigen(gram);
        for (std::size_t k = 0; k < m; ++k) {
            const double expected = std::sqrt(std::max(eig.values[k], 0.0));
            if (!close_rel(model.singular_values[k], expected, 1e-8)) {
                return {false, "spectrum mismatch on instance " + std::to_string(round)};
            }
        }
    }

    return {true, "least squares (100), trees (50, exact), spectra (20) all match"};
}

// --- 3. sampler correctness ------------------------------------------------

Outcome criterion_sampler() {
    Rng rng(424242);
    const int draws = 20000;

    std::map<std::pair<std::size_t, std::size_t>, int> counts;
    for (int i = 0; i < draws; ++i) {
        const FeatureSubset s = sample_subset(uniform_weights(5), 2, rng);
        ++counts[{s.indices[0], s.indices[1]}];
    }
    if (counts.size() != 10) return {false, "some size-2 subsets of 5 never appeared"};
    const double expected = draws / 10.0;
    double chi2 = 0.0;
    for (const auto& [key, count] : counts) {
        chi2 += (count - expected) * (count - expected) / expected;
    }
    if (chi2 >= 27.877) {  // chi-square df=9, significance 0.001
        return {false, "uniform subsets fail chi-square: " + std::to_string(chi2)};
    }

    SubspaceWeights w{{0.5, 0.5, 0.0, 0.0}, SubsetMode::fraction_only};
    int third_is_two = 0;
    for (int i = 0; i < draws; ++i) {
        const FeatureSubset s = sample_subset(w, 3, rng);
        if (!(s.indices[0] == 0 && s.indices[1] == 1)) {
            return {false, "positive-weight indices not always selected first"};
        }
        if (s.indices[2] == 2) ++third_is_two;
    }
    const double sigma = std::sqrt(draws * 0.25);
    if (std::fabs(third_is_two - draws / 2.0) > 3.0 * sigma) {
        return {false, "zero-weight fill not uniform: " + std::to_string(third_is_two)};
    }

    std::ostringstream detail;
    detail << "chi-square " << chi2 << " < 27.877; zero-weight fill " << third_is_two << "/"
           << draws;
    return {true, detail.str()};
}

// --- 4. linear-theory reproduction ------------------------------------------

Outcome criterion_theory() {
    const TheoryTrialResult r = run_theory_trials(8, 200, 1.0, 4, 30, 100, 31415);

    // Enumerable two-component case: equal spectra, weights (1, 0), k = 1.
    // Expected per-learner variance is sum_k w_k^2 s_k^2 q_k / n and expected
    // pairwise covariance sum_k w_k^2 s_k^2 q_k^2 / n; with q = (1, 0) the
    // weighted scheme doubles the uniform scheme's variance and quadruples
    // its covariance.
    const std::size_t n = 8;
    Matrix x(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = 3.0 * ((i < 4 ? 1.0 : -1.0) / std::sqrt(8.0));
        x(i, 1) = 3.0 * ((i % 2 == 0 ? 1.0 : -1.0) / std::sqrt(8.0));
    }
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = x(i, 0);

    Matrix pred_first(1, n), pred_second(1, n);
    const TrainedLearner l0 = train_linear(x, y, FeatureSubset{{0}});
    const TrainedLearner l1 = train_linear(x, y, FeatureSubset{{1}});
    for (std::size_t i = 0; i < n; ++i) {
        pred_first(0, i) = predict(l0, x.row(i));
        pred_second(0, i) = predict(l1, x.row(i));
    }
    const double unit = 9.0 / static_cast<double>(n);  // w^2 s^2 / n
    const double var_first = rowwise_var_covar(pred_first).avg_variance;
    const double var_second = rowwise_var_covar(pred_second).avg_variance;
    const double e_var_qi = var_first;                        // p = (1, 0)
    const double e_var_rs = 0.5 * var_first + 0.5 * var_second;  // p = (1/2, 1/2)
    const bool enumeration_ok = std::fabs(e_var_qi - unit) <= 1e-12 &&
                                std::fabs(e_var_rs - unit / 2.0) <= 1e-12 &&
                                e_var_qi > e_var_rs;

    std::ostringstream detail;
    detail << "ambiguity majority " << r.ambi_qi_wins << "/100 (need >= 95), "
           << "variance majority " << r.var_qi_wins << "/100, two-component closed form "
           << (enumeration_ok ? "exact" : "MISMATCH");
    const bool pass = r.ambi_qi_wins >= 95 && enumeration_ok;
    if (!pass && enumeration_ok) {
        detail << "; note: at k = m/2 uniform inclusion sits at the maximum of the "
                  "per-component ambiguity factor q(1-q), so no weighting can raise "
                  "expected ambiguity there (weighted variance still wins "
               << r.var_qi_wins << "/100)";
    }
    return {pass, detail.str()};
}

// --- 5/6. directional reproduction on the benchmark suite -------------------

ExperimentSpec suite_spec(LearnerKind kind, double alpha) {
    ExperimentSpec spec;
    spec.datasets = make_benchmark_suite(1);
    spec.alpha = alpha;
    spec.ensemble_size = 30;
    spec.train_fraction = 0.6;
    spec.repeats = 15;
    spec.learner_kind = kind;
    spec.treatment_mode = SubsetMode::fraction_transition;
    spec.baseline_mode = SubsetMode::uniform;
    spec.master_seed = 20250808;
    return spec;
}

Outcome criterion_linear_direction() {
    const std::vector<ResultRow> rows = run_experiment(suite_spec(LearnerKind::linear, 0.5));
    int wins = 0;
    for (const ResultRow& r : rows) {
        if (!r.error.empty()) return {false, r.dataset + " failed: " + r.error};
        wins += r.treatment_mean < r.baseline_mean ? 1 : 0;
    }
    std::ostringstream detail;
    detail << "weighted linear ensembles win " << wins << "/10 datasets (need >= 9)";
    return {wins >= 9, detail.str()};
}

Outcome criterion_tree_direction() {
    const std::vector<ResultRow> rows = run_experiment(suite_spec(LearnerKind::tree, 0.5));
    int wins = 0;
    for (const ResultRow& r : rows) {
        if (!r.error.empty()) return {false, r.dataset + " failed: " + r.error};
        wins += r.treatment_mean <= r.baseline_mean ? 1 : 0;
    }
    std::ostringstream detail;
    detail << "weighted forests win " << wins << "/10 datasets (need >= 7)";
    return {wins >= 7, detail.str()};
}

// --- 7. subset-fraction trend ------------------------------------------------

Outcome criterion_alpha_trend() {
    auto mean_gap = [](const std::vector<ResultRow>& rows, std::string& err) {
        double gap = 0.0;
        for (const ResultRow& r : rows) {
            if (!r.error.empty()) {
                err = r.dataset + " failed: " + r.error;
                return 0.0;
            }
            gap += r.baseline_mean - r.treatment_mean;
        }
        return gap / static_cast<double>(rows.size());
    };

    std::string err;
    const double gap_narrow = mean_gap(run_experiment(suite_spec(LearnerKind::tree, 0.125)), err);
    if (!err.empty()) return {false, err};
    const double gap_wide = mean_gap(run_experiment(suite_spec(LearnerKind::tree, 0.75)), err);
    if (!err.empty()) return {false, err};

    const std::vector<ResultRow> full = run_experiment(suite_spec(LearnerKind::tree, 1.0));
    bool degenerate = true;
    for (const ResultRow& r : full) {
        if (!r.error.empty()) return {false, r.dataset + " failed: " + r.error};
        degenerate = degenerate && r.treatment_mean == r.baseline_mean && r.verdict == "=";
    }

    std::ostringstream detail;
    detail.setf(std::ios::fixed);
    detail.precision(4);
    detail << "mean gap " << gap_narrow << " at alpha=0.125 vs " << gap_wide
           << " at alpha=0.75; alpha=1.0 " << (degenerate ? "exactly degenerates" : "DIVERGES");
    return {gap_narrow > gap_wide && degenerate, detail.str()};
}

// --- 8. determinism -----------------------------------------------------------

Outcome criterion_determinism() {
    // Two full runs with the same seed under different parallelism
    // settings must emit byte-identical structured output.
    const ExperimentSpec spec = suite_spec(LearnerKind::linear, 0.5);
    const std::string parallel = results_to_jsonl(run_experiment(spec, Exec::parallel), spec);
    const std::string serial = results_to_jsonl(run_experiment(spec, Exec::serial), spec);

    if (parallel != serial) return {false, "serial and parallel runs differ"};
    std::ostringstream detail;
    detail << "parallel and serial runs byte-identical, " << parallel.size() << " bytes";
    return {true, detail.str()};
}

struct Criterion {
    int number;
    const char* name;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "decomposition identities", criterion_identities},
    {2, "oracle equivalence", criterion_oracles},
    {3, "sampler distribution", criterion_sampler},
    {4, "linear-theory reproduction", criterion_theory},
    {5, "linear ensemble direction", criterion_linear_direction},
    {6, "tree ensemble direction", criterion_tree_direction},
    {7, "subset-fraction trend", criterion_alpha_trend},
    {8, "determinism", criterion_determinism},
};

}  // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const Criterion& criterion : kCriteria) {
        if (!selected.empty() && !selected.count(criterion.number)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %d: %s — %s (%.1f s)\n", outcome.pass ? "PASS" : "FAIL",
                    criterion.number, criterion.name, outcome.detail.c_str(), secs);
        std::fflush(stdout);
        failures += outcome.pass ? 0 : 1;
    }
    return failures;
}
