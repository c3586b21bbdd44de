// qiforest: benchmark and diagnostics CLI for weighted-subspace forest
// regression. Subcommands:
//   bench      compare a weighted-subspace ensemble against a baseline
//   theory     Monte Carlo comparison with linear learners on synthetic data
//   decompose  error/ambiguity/variance decomposition on a held-out split
//   synth      write the bundled synthetic benchmark suite as CSV files

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qiforest/dataset.hpp"
#include "qiforest/diagnostics.hpp"
#include "qiforest/experiment.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

struct DataArgs {
    std::string data_path;
    std::string target_col;  // name or zero-based index; empty = last column
    bool has_header = false;
};

void add_data_options(CLI::App* cmd, DataArgs& args) {
    cmd->add_option("--data", args.data_path, "CSV file or directory of CSV files")
        ->required();
    cmd->add_option("--target-col", args.target_col,
                    "Target column, by name (needs --header) or zero-based index; "
                    "default: last column");
    cmd->add_flag("--header", args.has_header, "First row is a header");
}

qiforest::CsvOptions csv_options(const DataArgs& args) {
    qiforest::CsvOptions options;
    options.has_header = args.has_header;
    if (!args.target_col.empty()) {
        try {
            std::size_t consumed = 0;
            const unsigned long index = std::stoul(args.target_col, &consumed);
            if (consumed == args.target_col.size()) {
                options.target_index = index;
                return options;
            }
        } catch (const std::exception&) {
            // not an integer; treat as a column name
        }
        options.target_name = args.target_col;
    }
    return options;
}

std::vector<qiforest::Dataset> load_datasets(const DataArgs& args) {
    const qiforest::CsvOptions options = csv_options(args);
    std::vector<qiforest::Dataset> datasets;
    if (fs::is_directory(args.data_path)) {
        std::vector<std::string> paths;
        for (const auto& entry : fs::directory_iterator(args.data_path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".csv") {
                paths.push_back(entry.path().string());
            }
        }
        std::sort(paths.begin(), paths.end());
        if (paths.empty()) {
            throw qiforest::InvalidInput("no .csv files in " + args.data_path);
        }
        for (const std::string& path : paths) {
            datasets.push_back(qiforest::load_csv(path, options));
        }
    } else {
        datasets.push_back(qiforest::load_csv(args.data_path, options));
    }
    return datasets;
}

int run_bench(const DataArgs& data_args, qiforest::ExperimentSpec spec,
              const std::string& out_path) {
    spec.datasets = load_datasets(data_args);
    const std::vector<qiforest::ResultRow> rows = qiforest::run_experiment(spec);
    std::cout << qiforest::format_table(rows);
    if (!out_path.empty()) {
        qiforest::write_text_file(out_path, qiforest::results_to_jsonl(rows, spec));
        std::cout << "results written to " << out_path << "\n";
    }
    return 0;
}

int run_theory(std::size_t dims, std::size_t samples, std::size_t trees, std::size_t k,
               std::size_t trials, double sigma, double noise, std::uint64_t seed,
               const std::string& out_path) {
    const qiforest::TheoryTrialResult r =
        qiforest::run_theory_trials(dims, samples, sigma, k, trees, trials, seed, noise);

    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(6);
    out << "trials: " << r.trial_count << "\n"
        << "                       weighted    uniform\n"
        << "per-learner variance   " << r.e_var_qi << "   " << r.e_var_rs << "\n"
        << "pairwise covariance    " << r.e_cov_qi << "   " << r.e_cov_rs << "\n"
        << "ensemble ambiguity     " << r.e_ambi_qi << "   " << r.e_ambi_rs << "\n"
        << "true-weight variant    var " << r.e_var_qi_true << "  cov " << r.e_cov_qi_true
        << "  ambi " << r.e_ambi_qi_true << "\n"
        << "weighted wins: variance " << r.var_qi_wins << "/" << r.trial_count
        << ", covariance " << r.cov_qi_wins << "/" << r.trial_count << ", ambiguity "
        << r.ambi_qi_wins << "/" << r.trial_count << "\n";
    std::cout << out.str();

    if (!out_path.empty()) {
        ordered_json record;
        record["trials"] = r.trial_count;
        record["e_var_qi"] = r.e_var_qi;
        record["e_var_rs"] = r.e_var_rs;
        record["e_cov_qi"] = r.e_cov_qi;
        record["e_cov_rs"] = r.e_cov_rs;
        record["e_ambi_qi"] = r.e_ambi_qi;
        record["e_ambi_rs"] = r.e_ambi_rs;
        record["e_var_qi_true"] = r.e_var_qi_true;
        record["e_cov_qi_true"] = r.e_cov_qi_true;
        record["e_ambi_qi_true"] = r.e_ambi_qi_true;
        record["var_qi_wins"] = r.var_qi_wins;
        record["cov_qi_wins"] = r.cov_qi_wins;
        record["ambi_qi_wins"] = r.ambi_qi_wins;
        qiforest::write_text_file(out_path, record.dump() + "\n");
    }
    return 0;
}

int run_decompose(const DataArgs& data_args, const qiforest::EnsembleConfig& config,
                  double train_fraction, std::uint64_t seed, const std::string& out_path) {
    const std::vector<qiforest::Dataset> datasets = load_datasets(data_args);
    std::ostringstream json_lines;
    for (const qiforest::Dataset& ds : datasets) {
        qiforest::validate_dataset(ds);
        qiforest::Rng split_rng = qiforest::Rng::derive(seed, {qiforest::stream::split});
        const qiforest::TrainTestSplit split =
            qiforest::split_rows(ds.x.rows(), train_fraction, split_rng);
        const qiforest::PreparedData prepared = qiforest::preprocess(ds, split);

        const qiforest::EnsembleModel model =
            qiforest::train_forest(prepared.x_train, prepared.y_train, config);
        const qiforest::DecompositionReport report =
            qiforest::decompose(model, prepared.x_test, prepared.y_test);

        std::cout.setf(std::ios::fixed);
        std::cout.precision(6);
        std::cout << ds.name << " (" << report.n_eval << " evaluation rows)\n"
                  << "  ensemble error     " << report.ensemble_err << "\n"
                  << "  mean learner error " << report.avg_err << "\n"
                  << "  ambiguity          " << report.avg_ambiguity << "\n"
                  << "  variance           " << report.avg_variance << "\n"
                  << "  covariance         " << report.avg_covariance << "\n"
                  << "  squared bias       " << report.avg_bias_sq << "\n";

        ordered_json record;
        record["dataset"] = ds.name;
        record["ensemble_err"] = report.ensemble_err;
        record["avg_err"] = report.avg_err;
        record["avg_ambiguity"] = report.avg_ambiguity;
        record["avg_variance"] = report.avg_variance;
        record["avg_covariance"] = report.avg_covariance;
        record["avg_bias_sq"] = report.avg_bias_sq;
        record["n_eval"] = report.n_eval;
        json_lines << record.dump() << '\n';
    }
    if (!out_path.empty()) qiforest::write_text_file(out_path, json_lines.str());
    return 0;
}

int run_synth(const std::string& out_dir, std::uint64_t seed) {
    fs::create_directories(out_dir);
    for (const qiforest::Dataset& ds : qiforest::make_benchmark_suite(seed)) {
        const std::string path = (fs::path(out_dir) / (ds.name + ".csv")).string();
        qiforest::write_csv(ds, path, true);
        std::cout << path << " (" << ds.x.rows() << " x " << ds.x.cols() << ")\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted-subspace forest regression benchmark"};
    app.require_subcommand(1);
    // Key=value config file with one [section] per subcommand, e.g.
    // `qiforest --config run.conf bench ...` with `[bench]\ntrees=50`.
    // Explicit flags override file values.
    app.set_config("--config", "", "Plain-text key=value config file; flags override it");

    auto* bench = app.add_subcommand("bench", "Run treatment-vs-baseline MSE comparisons");
    DataArgs bench_data;
    add_data_options(bench, bench_data);
    qiforest::ExperimentSpec spec;
    std::string bench_mode = "qis", bench_baseline = "uniform", bench_learner = "tree";
    std::string bench_out;
    bench->add_option("--alpha", spec.alpha, "Subset size fraction")->capture_default_str();
    bench->add_option("--trees", spec.ensemble_size, "Ensemble size")->capture_default_str();
    bench->add_option("--train-frac", spec.train_fraction, "Training fraction")
        ->capture_default_str();
    bench->add_option("--repeats", spec.repeats, "Independent repeats")->capture_default_str();
    bench->add_option("--learner", bench_learner, "Base learner: tree|linear")
        ->capture_default_str();
    bench->add_option("--mode", bench_mode, "Treatment subsets: qis|fraction|uniform")
        ->capture_default_str();
    bench->add_option("--baseline", bench_baseline, "Baseline subsets: qis|fraction|uniform")
        ->capture_default_str();
    bench->add_option("--seed", spec.master_seed, "Master seed")->capture_default_str();
    bench->add_option("--out", bench_out, "Write JSONL results here");
    bench->add_flag("--paper-leaky-preprocess", spec.leak_statistics,
                    "Fit preprocessing statistics on all rows instead of training rows");

    auto* theory = app.add_subcommand("theory", "Monte Carlo linear-ensemble comparison");
    std::size_t t_dims = 8, t_samples = 200, t_trees = 30, t_k = 4, t_trials = 100;
    double t_sigma = 1.0, t_noise = 0.0;
    std::uint64_t t_seed = 0;
    std::string theory_out;
    theory->add_option("--dims", t_dims, "Feature count")->capture_default_str();
    theory->add_option("--samples", t_samples, "Rows per trial")->capture_default_str();
    theory->add_option("--trees", t_trees, "Learners per ensemble")->capture_default_str();
    theory->add_option("--k", t_k, "Subset size")->capture_default_str();
    theory->add_option("--trials", t_trials, "Trial count")->capture_default_str();
    theory->add_option("--sigma", t_sigma, "True-weight standard deviation")
        ->capture_default_str();
    theory->add_option("--noise", t_noise, "Additive target noise level")->capture_default_str();
    theory->add_option("--seed", t_seed, "Master seed")->capture_default_str();
    theory->add_option("--out", theory_out, "Write a JSON summary here");

    auto* decompose_cmd =
        app.add_subcommand("decompose", "Train once and decompose the held-out error");
    DataArgs dec_data;
    add_data_options(decompose_cmd, dec_data);
    std::string dec_learner = "tree", dec_mode = "qis", dec_out;
    double dec_alpha = 0.5, dec_train_frac = 0.6;
    std::size_t dec_trees = 30;
    std::uint64_t dec_seed = 0;
    decompose_cmd->add_option("--alpha", dec_alpha, "Subset size fraction")
        ->capture_default_str();
    decompose_cmd->add_option("--trees", dec_trees, "Ensemble size")->capture_default_str();
    decompose_cmd->add_option("--train-frac", dec_train_frac, "Training fraction")
        ->capture_default_str();
    decompose_cmd->add_option("--learner", dec_learner, "Base learner: tree|linear")
        ->capture_default_str();
    decompose_cmd->add_option("--mode", dec_mode, "Subset mode: qis|fraction|uniform")
        ->capture_default_str();
    decompose_cmd->add_option("--seed", dec_seed, "Master seed")->capture_default_str();
    decompose_cmd->add_option("--out", dec_out, "Write JSONL reports here");

    auto* synth = app.add_subcommand("synth", "Write the synthetic benchmark suite");
    std::string synth_out = "data";
    std::uint64_t synth_seed = 0;
    synth->add_option("--out", synth_out, "Output directory")->capture_default_str();
    synth->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Exit contract: 0 success (covers --help), 1 invalid input.
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (bench->parsed()) {
            spec.learner_kind = qiforest::learner_kind_from_string(bench_learner);
            spec.treatment_mode = qiforest::subset_mode_from_string(bench_mode);
            spec.baseline_mode = qiforest::subset_mode_from_string(bench_baseline);
            return run_bench(bench_data, spec, bench_out);
        }
        if (theory->parsed()) {
            return run_theory(t_dims, t_samples, t_trees, t_k, t_trials, t_sigma, t_noise,
                              t_seed, theory_out);
        }
        if (decompose_cmd->parsed()) {
            qiforest::EnsembleConfig config;
            config.ensemble_size = dec_trees;
            config.alpha = dec_alpha;
            config.learner_kind = qiforest::learner_kind_from_string(dec_learner);
            config.subset_mode = qiforest::subset_mode_from_string(dec_mode);
            config.seed = dec_seed;
            return run_decompose(dec_data, config, dec_train_frac, dec_seed, dec_out);
        }
        if (synth->parsed()) return run_synth(synth_out, synth_seed);
    } catch (const qiforest::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
