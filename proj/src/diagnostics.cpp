#include "qiforest/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace qiforest {

DecompositionReport decompose_predictions(const Matrix& predictions, const Vector& y) {
    const std::size_t t = predictions.rows();
    const std::size_t n = predictions.cols();
    if (t == 0 || n == 0) throw InvalidInput("decompose_predictions: empty input");
    if (n != y.size()) throw InvalidInput("decompose_predictions: evaluation length mismatch");

    DecompositionReport report;
    report.n_eval = n;

    const double tf = static_cast<double>(t);
    for (std::size_t j = 0; j < n; ++j) {
        double ensemble_mean = 0.0;
        for (std::size_t i = 0; i < t; ++i) ensemble_mean += predictions(i, j);
        ensemble_mean /= tf;

        double err_sum = 0.0;       // sum_i (h_i - y)^2
        double deviation_sum = 0.0; // sum_i (h_i - H)
        double spread = 0.0;        // sum_i (h_i - H)^2
        for (std::size_t i = 0; i < t; ++i) {
            const double err = predictions(i, j) - y[j];
            err_sum += err * err;
            const double dev = predictions(i, j) - ensemble_mean;
            deviation_sum += dev;
            spread += dev * dev;
        }

        const double bias = ensemble_mean - y[j];
        report.avg_err += err_sum / tf;
        report.avg_ambiguity += spread / tf;
        report.ensemble_err += bias * bias;
        report.avg_bias_sq += bias * bias;
        report.avg_variance += spread / tf;
        if (t > 1) {
            // Off-diagonal pair sum: (sum_i dev)^2 - sum_i dev^2.
            report.avg_covariance += (deviation_sum * deviation_sum - spread) / (tf * (tf - 1.0));
        }
    }

    const double nf = static_cast<double>(n);
    report.avg_err /= nf;
    report.avg_ambiguity /= nf;
    report.ensemble_err /= nf;
    report.avg_bias_sq /= nf;
    report.avg_variance /= nf;
    report.avg_covariance /= nf;

    const double lhs = report.ensemble_err;
    const double rhs = report.avg_err - report.avg_ambiguity;
    const double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
    if (std::fabs(lhs - rhs) > 1e-10 * scale) {
        throw std::logic_error("decompose_predictions: error-ambiguity identity violated");
    }
    return report;
}

DecompositionReport decompose(const EnsembleModel& model, const Matrix& x, const Vector& y,
                              Exec exec) {
    if (x.rows() == 0) throw InvalidInput("decompose: empty evaluation set");
    if (x.rows() != y.size()) throw InvalidInput("decompose: row count != target length");
    return decompose_predictions(learner_predictions(model, x, exec), y);
}

RowwiseStats rowwise_var_covar(const Matrix& predictions) {
    const std::size_t t = predictions.rows();
    const std::size_t n = predictions.cols();
    if (t == 0 || n == 0) throw InvalidInput("rowwise_var_covar: empty input");

    const double nf = static_cast<double>(n);
    Vector means(t, 0.0);
    for (std::size_t i = 0; i < t; ++i) {
        double acc = 0.0;
        const auto row = predictions.row(i);
        for (std::size_t j = 0; j < n; ++j) acc += row[j];
        means[i] = acc / nf;
    }

    RowwiseStats stats;
    for (std::size_t i = 0; i < t; ++i) {
        const auto row = predictions.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = row[j] - means[i];
            acc += d * d;
        }
        stats.avg_variance += acc / nf;
    }
    stats.avg_variance /= static_cast<double>(t);

    if (t > 1) {
        double pair_sum = 0.0;
        for (std::size_t i = 0; i < t; ++i) {
            for (std::size_t k = i + 1; k < t; ++k) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    acc += (predictions(i, j) - means[i]) * (predictions(k, j) - means[k]);
                }
                pair_sum += 2.0 * (acc / nf);
            }
        }
        stats.avg_covariance = pair_sum / (static_cast<double>(t) * (static_cast<double>(t) - 1.0));
    }
    return stats;
}

namespace {

struct TrialStats {
    double var = 0.0;
    double cov = 0.0;
    double ambi = 0.0;
};

TrialStats ensemble_trial_stats(const Matrix& x_transformed, const Vector& y,
                                const SubspaceWeights& weights, std::size_t k,
                                std::size_t t_ensemble, std::uint64_t seed,
                                std::uint64_t scheme_key) {
    const std::size_t n = x_transformed.rows();
    Matrix preds(t_ensemble, n);
    for (std::size_t i = 0; i < t_ensemble; ++i) {
        Rng rng = Rng::derive(seed, {stream::subset, scheme_key, i});
        const FeatureSubset subset = sample_subset(weights, k, rng);
        const TrainedLearner learner = train_linear(x_transformed, y, subset);
        auto row = preds.row(i);
        for (std::size_t j = 0; j < n; ++j) row[j] = predict(learner, x_transformed.row(j));
    }

    TrialStats stats;
    const RowwiseStats rowwise = rowwise_var_covar(preds);
    stats.var = rowwise.avg_variance;
    stats.cov = rowwise.avg_covariance;
    stats.ambi = decompose_predictions(preds, y).avg_ambiguity;
    return stats;
}

}  // namespace

TheoryTrialResult run_theory_trials(std::size_t m_dims, std::size_t n_samples, double sigma,
                                    std::size_t k, std::size_t t_ensemble, std::size_t trials,
                                    std::uint64_t seed, double noise, Exec exec) {
    if (m_dims == 0) throw InvalidInput("run_theory_trials: m_dims must be >= 1");
    if (n_samples < 2) throw InvalidInput("run_theory_trials: n_samples must be >= 2");
    if (k == 0 || k > m_dims) throw InvalidInput("run_theory_trials: k must be in [1, m_dims]");
    if (t_ensemble == 0) throw InvalidInput("run_theory_trials: t_ensemble must be >= 1");
    if (trials == 0) throw InvalidInput("run_theory_trials: trials must be >= 1");
    if (!(sigma > 0.0)) throw InvalidInput("run_theory_trials: sigma must be positive");

    struct TrialOutcome {
        TrialStats qi, rs, qi_true;
    };
    std::vector<TrialOutcome> outcomes(trials);

    parallel_for(trials, exec, [&](std::size_t trial) {
        constexpr int max_attempts = 64;
        for (int attempt = 0;; ++attempt) {
            if (attempt >= max_attempts) {
                throw DegenerateData("run_theory_trials: persistent degenerate draws");
            }
            const std::uint64_t trial_seed =
                Rng::derive(seed, {stream::trial, trial, static_cast<std::uint64_t>(attempt)})
                    .next_u64();
            Rng rng = Rng::derive(trial_seed, {stream::data});

            Matrix design(n_samples, m_dims);
            for (std::size_t i = 0; i < n_samples; ++i) {
                for (std::size_t j = 0; j < m_dims; ++j) design(i, j) = rng.gaussian();
            }

            const PcaModel pca = pca_fit(design);
            if (pca.singular_values.back() <= 0.0) continue;  // rank-deficient draw
            const Matrix transformed = pca_transform(pca, design);

            Vector true_weights(m_dims);
            for (double& w : true_weights) w = sigma * rng.gaussian();

            Vector y(n_samples, 0.0);
            for (std::size_t i = 0; i < n_samples; ++i) {
                y[i] = dot(transformed.row(i), true_weights);
                if (noise > 0.0) y[i] += noise * rng.gaussian();
            }

            Vector scale(m_dims);
            for (std::size_t j = 0; j < m_dims; ++j) scale[j] = pca.singular_values[j];

            const Vector fitted = transition_amplitudes(transformed, y);
            double fitted_mass = 0.0, true_mass = 0.0;
            for (std::size_t j = 0; j < m_dims; ++j) {
                fitted_mass += scale[j] * scale[j] * fitted[j] * fitted[j];
                true_mass += scale[j] * scale[j] * true_weights[j] * true_weights[j];
            }
            if (!(fitted_mass > 0.0) || !(true_mass > 0.0)) continue;

            const SubspaceWeights qi_weights =
                fraction_transition_probabilities(scale, fitted);
            const SubspaceWeights qi_true_weights =
                fraction_transition_probabilities(scale, true_weights);
            const SubspaceWeights rs_weights = uniform_weights(m_dims);

            // The true-weight variant shares the fitted variant's draw
            // stream, so any difference between them comes from the weight
            // estimates alone.
            TrialOutcome out;
            out.qi = ensemble_trial_stats(transformed, y, qi_weights, k, t_ensemble, trial_seed, 1);
            out.rs = ensemble_trial_stats(transformed, y, rs_weights, k, t_ensemble, trial_seed, 2);
            out.qi_true =
                ensemble_trial_stats(transformed, y, qi_true_weights, k, t_ensemble, trial_seed, 1);
            outcomes[trial] = out;
            break;
        }
    });

    TheoryTrialResult result;
    result.trial_count = trials;
    for (const TrialOutcome& out : outcomes) {
        result.e_var_qi += out.qi.var;
        result.e_cov_qi += out.qi.cov;
        result.e_ambi_qi += out.qi.ambi;
        result.e_var_rs += out.rs.var;
        result.e_cov_rs += out.rs.cov;
        result.e_ambi_rs += out.rs.ambi;
        result.e_var_qi_true += out.qi_true.var;
        result.e_cov_qi_true += out.qi_true.cov;
        result.e_ambi_qi_true += out.qi_true.ambi;
        if (out.qi.var > out.rs.var) ++result.var_qi_wins;
        if (out.qi.cov < out.rs.cov) ++result.cov_qi_wins;
        if (out.qi.ambi > out.rs.ambi) ++result.ambi_qi_wins;
    }
    const double tf = static_cast<double>(trials);
    result.e_var_qi /= tf;
    result.e_cov_qi /= tf;
    result.e_ambi_qi /= tf;
    result.e_var_rs /= tf;
    result.e_cov_rs /= tf;
    result.e_ambi_rs /= tf;
    result.e_var_qi_true /= tf;
    result.e_cov_qi_true /= tf;
    result.e_ambi_qi_true /= tf;
    return result;
}

double verify_fraction_expectation(const Vector& singular_values, std::size_t trials,
                                   std::uint64_t seed) {
    if (singular_values.empty()) throw InvalidInput("verify_fraction_expectation: empty input");
    if (trials < 1000) throw InvalidInput("verify_fraction_expectation: need >= 1000 trials");
    require_finite(std::span(singular_values), "verify_fraction_expectation");

    const std::size_t m = singular_values.size();
    Vector energies(m);
    double total_energy = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        energies[k] = singular_values[k] * singular_values[k];
        total_energy += energies[k];
    }
    if (total_energy <= 0.0) {
        throw DegenerateData("verify_fraction_expectation: all singular values zero");
    }

    Rng rng = Rng::derive(seed, {stream::trial});
    Vector mean_p(m, 0.0);
    std::size_t accepted = 0;
    while (accepted < trials) {
        Vector products(m);
        double total = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double w = rng.gaussian();
            products[k] = w * w * energies[k];
            total += products[k];
        }
        if (!(total > 0.0)) continue;
        for (std::size_t k = 0; k < m; ++k) mean_p[k] += products[k] / total;
        ++accepted;
    }

    double worst = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double estimate = mean_p[k] / static_cast<double>(trials);
        const double fraction = energies[k] / total_energy;
        worst = std::max(worst, std::fabs(estimate - fraction));
    }
    return worst;
}

}  // namespace qiforest
