// Times the OpenMP kernels against the serial reference path and verifies
// that both produce bit-identical results. Build with -DQIFOREST_OPENMP=OFF
// to see the plain serial build.

#include <chrono>
#include <cstdio>
#include <functional>

#include "qiforest/dataset.hpp"
#include "qiforest/diagnostics.hpp"
#include "qiforest/ensemble.hpp"

using namespace qiforest;

namespace {

double time_ms(const std::function<void()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

void report(const char* label, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-28s %10.1f ms %10.1f ms   %5.2fx   %s\n", label, serial_ms, parallel_ms,
                serial_ms / parallel_ms, identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
    std::printf("threads available: %d\n", max_threads());
    std::printf("%-28s %13s %13s %8s\n", "kernel", "serial", "parallel", "speedup");

    const Dataset ds = make_piecewise_dataset("bench", 2500, 12, 6, 0.3, 42);

    EnsembleConfig config;
    config.ensemble_size = 40;
    config.alpha = 0.5;
    config.subset_mode = SubsetMode::fraction_transition;
    config.seed = 7;

    {
        EnsembleModel serial_model, parallel_model;
        const double s = time_ms([&] { serial_model = train_forest(ds.x, ds.y, config, nullptr, Exec::serial); });
        const double p = time_ms([&] { parallel_model = train_forest(ds.x, ds.y, config, nullptr, Exec::parallel); });
        report("tree forest training", s, p, serial_model == parallel_model);

        Vector serial_pred, parallel_pred;
        const double ps = time_ms([&] { serial_pred = predict_ensemble(serial_model, ds.x, Exec::serial); });
        const double pp = time_ms([&] { parallel_pred = predict_ensemble(parallel_model, ds.x, Exec::parallel); });
        report("ensemble prediction", ps, pp, serial_pred == parallel_pred);
    }

    {
        EnsembleConfig linear_config = config;
        linear_config.learner_kind = LearnerKind::linear;
        EnsembleModel serial_model, parallel_model;
        const double s = time_ms([&] { serial_model = train_forest(ds.x, ds.y, linear_config, nullptr, Exec::serial); });
        const double p = time_ms([&] { parallel_model = train_forest(ds.x, ds.y, linear_config, nullptr, Exec::parallel); });
        report("linear forest training", s, p, serial_model == parallel_model);
    }

    {
        TheoryTrialResult serial_result, parallel_result;
        const double s = time_ms([&] { serial_result = run_theory_trials(8, 200, 1.0, 4, 30, 40, 3, 0.0, Exec::serial); });
        const double p = time_ms([&] { parallel_result = run_theory_trials(8, 200, 1.0, 4, 30, 40, 3, 0.0, Exec::parallel); });
        const bool same = serial_result.e_ambi_qi == parallel_result.e_ambi_qi &&
                          serial_result.e_var_rs == parallel_result.e_var_rs &&
                          serial_result.ambi_qi_wins == parallel_result.ambi_qi_wins;
        report("theory trials", s, p, same);
    }

    return 0;
}
