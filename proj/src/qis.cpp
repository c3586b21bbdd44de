#include "qiforest/qis.hpp"

#include <algorithm>
#include <cmath>

#include "qiforest/svd.hpp"

namespace qiforest {

std::string to_string(SubsetMode mode) {
    switch (mode) {
        case SubsetMode::fraction_transition: return "fraction_transition";
        case SubsetMode::fraction_only: return "fraction_only";
        case SubsetMode::uniform: return "uniform";
    }
    return "unknown";
}

SubsetMode subset_mode_from_string(const std::string& name) {
    if (name == "fraction_transition" || name == "qis") return SubsetMode::fraction_transition;
    if (name == "fraction_only" || name == "fraction") return SubsetMode::fraction_only;
    if (name == "uniform") return SubsetMode::uniform;
    throw InvalidInput("unknown subset mode: " + name);
}

SubspaceWeights uniform_weights(std::size_t m) {
    if (m == 0) throw InvalidInput("uniform_weights: m must be positive");
    SubspaceWeights w;
    w.mode = SubsetMode::uniform;
    w.p.assign(m, 1.0 / static_cast<double>(m));
    return w;
}

SubspaceWeights fraction_probabilities(const Vector& singular_values) {
    require_finite(std::span(singular_values), "fraction_probabilities");
    double total = 0.0;
    for (double s : singular_values) total += s * s;
    if (total <= 0.0) throw DegenerateData("fraction_probabilities: all singular values zero");

    SubspaceWeights w;
    w.mode = SubsetMode::fraction_only;
    w.p.resize(singular_values.size());
    for (std::size_t k = 0; k < singular_values.size(); ++k) {
        w.p[k] = singular_values[k] * singular_values[k] / total;
    }
    return w;
}

Vector transition_amplitudes(const Matrix& x_transformed, const Vector& y) {
    return ols_solve(x_transformed, y);
}

SubspaceWeights fraction_transition_probabilities(const Vector& singular_values,
                                                  const Vector& amplitudes) {
    if (singular_values.size() != amplitudes.size()) {
        throw InvalidInput("fraction_transition_probabilities: length mismatch");
    }
    require_finite(std::span(singular_values), "fraction_transition_probabilities");
    require_finite(std::span(amplitudes), "fraction_transition_probabilities");

    Vector products(singular_values.size());
    double total = 0.0;
    for (std::size_t k = 0; k < products.size(); ++k) {
        const double st = singular_values[k] * amplitudes[k];
        products[k] = st * st;
        total += products[k];
    }
    if (total <= 0.0) {
        throw DegenerateData("fraction_transition_probabilities: all products zero");
    }

    SubspaceWeights w;
    w.mode = SubsetMode::fraction_transition;
    w.p.resize(products.size());
    for (std::size_t k = 0; k < products.size(); ++k) w.p[k] = products[k] / total;
    return w;
}

SubspaceWeights compute_weights(const Matrix& x_transformed, const Vector& y, SubsetMode mode) {
    const std::size_t m = x_transformed.cols();
    if (mode == SubsetMode::uniform) return uniform_weights(m);

    // Column energies of the transformed matrix are the squared singular
    // values when the columns are centered, so both rungs read them.
    Vector singular_values = column_energies(x_transformed);
    for (double& e : singular_values) e = std::sqrt(e);

    if (mode == SubsetMode::fraction_transition) {
        // A (numerically) constant target makes every amplitude rounding
        // noise; treat it as the all-zero case and fall through.
        double y_mean = 0.0, y_sq = 0.0;
        for (double v : y) y_mean += v;
        y_mean /= static_cast<double>(y.size());
        double y_var = 0.0;
        for (double v : y) {
            y_var += (v - y_mean) * (v - y_mean);
            y_sq += v * v;
        }
        bool usable = y_var > 1e-24 * y_sq && y_var > 0.0;

        if (usable) {
            Vector amplitudes = transition_amplitudes(x_transformed, y);
            usable = all_finite(std::span(amplitudes));
            if (usable) {
                double total = 0.0;
                for (std::size_t k = 0; k < m; ++k) {
                    const double st = singular_values[k] * amplitudes[k];
                    total += st * st;
                }
                usable = total > 0.0;
            }
            if (usable) return fraction_transition_probabilities(singular_values, amplitudes);
        }
    }

    double energy = 0.0;
    for (double s : singular_values) energy += s * s;
    if (energy > 0.0 && all_finite(std::span(singular_values))) {
        return fraction_probabilities(singular_values);
    }
    return uniform_weights(m);
}

FeatureSubset sample_subset(const SubspaceWeights& weights, std::size_t k, Rng& rng) {
    const std::size_t m = weights.p.size();
    if (k == 0 || k > m) throw InvalidInput("sample_subset: k out of range");

    Vector remaining = weights.p;
    std::vector<bool> taken(m, false);
    FeatureSubset subset;
    subset.indices.reserve(k);

    for (std::size_t slot = 0; slot < k; ++slot) {
        double total = 0.0;
        for (double w : remaining) total += w;

        std::size_t pick = m;
        if (total > 0.0) {
            const double target = rng.uniform01() * total;
            double cumulative = 0.0;
            for (std::size_t idx = 0; idx < m; ++idx) {
                if (remaining[idx] <= 0.0) continue;
                cumulative += remaining[idx];
                pick = idx;
                if (target < cumulative) break;
            }
        } else {
            // Only zero-weight indices left: fill uniformly among them.
            std::vector<std::size_t> open;
            for (std::size_t idx = 0; idx < m; ++idx) {
                if (!taken[idx]) open.push_back(idx);
            }
            pick = open[rng.uniform_index(open.size())];
        }

        taken[pick] = true;
        remaining[pick] = 0.0;
        subset.indices.push_back(pick);
    }

    std::sort(subset.indices.begin(), subset.indices.end());
    return subset;
}

std::vector<FeatureSubset> generate_subsets(const Matrix& x_transformed, const Vector& y,
                                            std::size_t t_ensemble, std::size_t k,
                                            SubsetMode mode, std::uint64_t seed, Exec exec) {
    if (t_ensemble == 0) throw InvalidInput("generate_subsets: ensemble size must be positive");
    const SubspaceWeights weights = compute_weights(x_transformed, y, mode);

    std::vector<FeatureSubset> subsets(t_ensemble);
    parallel_for(t_ensemble, exec, [&](std::size_t i) {
        Rng rng = Rng::derive(seed, {stream::subset, i});
        subsets[i] = sample_subset(weights, k, rng);
    });
    return subsets;
}

}  // namespace qiforest
