#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qiforest/matrix.hpp"

namespace qiforest {

struct Dataset {
    std::string name;
    Matrix x;
    Vector y;
    std::string source_path;
};

struct CsvOptions {
    bool has_header = false;
    // Target column, either by name (needs a header) or by zero-based
    // index. When neither is set the last column is the target.
    std::optional<std::string> target_name;
    std::optional<std::size_t> target_index;
};

// Loads a numeric, comma-separated file. Any blank or non-numeric cell
// fails the load with an error that names the offending line(s).
Dataset load_csv(const std::string& path, const CsvOptions& options = {});

void write_csv(const Dataset& dataset, const std::string& path, bool header = true);

// Checks the invariants experiments rely on: at least 10 rows, at least
// one feature, finite values, matching target length.
void validate_dataset(const Dataset& dataset);

// Synthetic regression problems. Features live on latent factors with a
// decaying variance spectrum mixed through a random rotation, so the
// principal directions are recoverable and informative.
Dataset make_linear_dataset(const std::string& name, std::size_t n, std::size_t m,
                            double noise, std::uint64_t seed);

// Piecewise-constant target driven by step functions of the strongest
// latent factors, plus a mild linear term.
Dataset make_piecewise_dataset(const std::string& name, std::size_t n, std::size_t m,
                               std::size_t steps, double noise, std::uint64_t seed);

// Ten stand-in datasets with the instance/dimension shapes of common UCI
// regression benchmarks, used by the bundled experiments and tests.
std::vector<Dataset> make_benchmark_suite(std::uint64_t seed);

}  // namespace qiforest
